#include "polylearn/crgbs.hpp"

#include <cmath>
#include <map>

namespace polylearn {

int face_dim(int n) { return static_cast<int>(binomial(n, 2)); }

double crgbs_sub_eps(int m, int n, double eps) {
  const int k = face_dim(n);
  return 3.0 * eps / (100.0 * n * n * std::sqrt(k + 1.0) * std::pow(m + 1.0, 2.5));
}

double crgbs_query_bound(int m, int n, double eps) {
  const int k = face_dim(n);
  if (m <= k) return cdgbs_query_bound(m, n, eps);
  return binomial_real(m + 1, k + 1) * cdgbs_query_bound(k, n, crgbs_sub_eps(m, n, eps));
}

namespace {

// Face oracle that answers the face's corners from a shared cache, so every
// simplex vertex is queried once.
class FaceOracle : public LabelOracle {
 public:
  FaceOracle(LabelOracle& parent, const Face& face, const AffineMap& to_simplex, std::map<int, int>& corners)
      : parent_(parent), face_(face), map_(to_simplex), corners_(corners) {}
  int dim() const override { return face_.dim; }
  int label_count() const override { return parent_.label_count(); }
  int query(const Point& w) override {
    int corner = corner_index(w);
    if (corner >= 0) return corner_label(corner);
    ++count_;
    return parent_.query(map_.apply(w));
  }
  int corner_label(int corner) {
    int v = face_.vertex_subset[corner];
    auto it = corners_.find(v);
    if (it != corners_.end()) return it->second;
    Point e = Point::Zero(parent_.dim());
    if (v > 0) e[v - 1] = 1.0;
    ++count_;
    int l = parent_.query(e);
    corners_.emplace(v, l);
    return l;
  }
  std::uint64_t count() const { return count_; }

 private:
  // Index into vertex_subset when w is exactly a corner of Delta^k, else -1.
  static int corner_index(const Point& w) {
    int hot = -1;
    for (int i = 0; i < w.size(); ++i) {
      if (w[i] == 0.0) continue;
      if (w[i] != 1.0 || hot >= 0) return -1;
      hot = i;
    }
    return hot + 1;
  }

  LabelOracle& parent_;
  const Face& face_;
  const AffineMap& map_;
  std::map<int, int>& corners_;
  std::uint64_t count_ = 0;
};

}  // namespace

EmpiricalLabelling assemble_from_faces(int m, int n, const std::vector<FaceRun>& faces) {
  EmpiricalLabelling out(m, n);
  for (const auto& f : faces) {
    if (f.to_simplex.out_dim() != m || f.labelling.dim() != f.to_simplex.in_dim())
      throw InvalidInput("face labelling dimension mismatch");
    if (f.labelling.label_count() != n) throw InvalidInput("face labelling has a different label universe");
    for (int c : f.labelling.classes()) {
      const auto& pts = f.labelling.class_points(c);
      const auto& raw = f.labelling.class_raw_labels(c);
      for (std::size_t i = 0; i < pts.size(); ++i) out.add_query(f.to_simplex.apply(pts[i]), raw[i]);
    }
  }
  return out;
}

CrResult cr_gbs(const CrConfig& cfg, LabelOracle& oracle) {
  if (cfg.m < 0 || cfg.n < 1) throw InvalidInput("cr_gbs needs m >= 0 and n >= 1");
  if (!(cfg.eps > 0)) throw InvalidInput("eps must be positive");
  if (oracle.dim() != cfg.m || oracle.label_count() != cfg.n) throw InvalidInput("oracle does not match m, n");
  const bool adversarial = cfg.kind == OracleKind::kAdversarial;
  const int k = face_dim(cfg.n);
  CrResult res;
  if (cfg.m <= k) {
    GbsConfig g{cfg.m, cfg.n, cfg.eps, cfg.kind, cfg.seed};
    GbsResult r = adversarial ? cd_gbs_adversarial(g, oracle) : cd_gbs(g, oracle);
    res.labelling = std::move(r.labelling);
    res.stats.queries = r.stats.queries;
    res.stats.merges = r.stats.merges;
    res.stats.fell_back = true;
    return res;
  }
  if (binomial_real(cfg.m + 1, k + 1) > static_cast<double>(cfg.max_faces)) throw InvalidInput("too many faces");

  const double sub = crgbs_sub_eps(cfg.m, cfg.n, cfg.eps);
  std::map<int, int> corners;
  std::vector<FaceRun> runs;
  for (auto& [face, fwd] : enumerate_k_faces(cfg.m, k)) {
    FaceRun run{face, fwd.inverse(), EmpiricalLabelling(), 0};
    FaceOracle fo(oracle, run.face, run.to_simplex, corners);
    EmpiricalLabelling corner_labels(k, cfg.n);
    for (int c = 0; c <= k; ++c) {
      Point w = Point::Zero(k);
      if (c > 0) w[c - 1] = 1.0;
      corner_labels.add_query(w, fo.corner_label(c));
    }
    GbsConfig g{k, cfg.n, sub, cfg.kind, cfg.seed};
    GbsResult r = adversarial ? cd_gbs_adversarial(g, fo) : cd_gbs(g, fo);
    run.labelling = std::move(r.labelling);
    run.labelling.compact();
    for (int c : corner_labels.classes()) {
      const auto& pts = corner_labels.class_points(c);
      for (const auto& p : pts) run.labelling.add_query(p, c);
    }
    run.queries = fo.count();
    res.stats.queries += run.queries;
    res.stats.face_queries.push_back(run.queries);
    runs.push_back(std::move(run));
  }
  res.stats.faces = static_cast<int>(runs.size());
  res.labelling = assemble_from_faces(cfg.m, cfg.n, runs);
  // Lexicographic runs should never conflict; any conflict is merged and counted.
  while (auto c = interior_conflict(res.labelling)) {
    res.labelling.merge_labels(c->i, c->j);
    ++res.stats.merges;
    if (!adversarial) ++res.stats.lex_conflicts;
  }
  return res;
}

}  // namespace polylearn
