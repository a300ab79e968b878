#include "polylearn/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "json.hpp"

namespace polylearn {

void Uepp::validate() const {
  if (m < 0 || n < 1) throw InvalidInput("uepp needs m >= 0 and n >= 1");
  if (A.rows() != n || A.cols() != m || b.size() != n) throw InvalidInput("uepp shape mismatch");
  if (!A.allFinite() || !b.allFinite()) throw InvalidInput("uepp entries must be finite");
}

std::vector<int> uepp_label_set(const Uepp& u, const Point& y) {
  if (y.size() != u.m) throw InvalidInput("query dimension mismatch");
  if (!in_simplex(y)) throw InvalidInput("query point outside the simplex");
  Eigen::VectorXd v = u.values(y);
  double top = v.maxCoeff();
  std::vector<int> out;
  for (int i = 0; i < u.n; ++i)
    if (v[i] >= top - kEta) out.push_back(i);
  return out;
}

Uepp compose_uepp(const Uepp& u, const AffineMap& map) {
  Uepp r;
  r.m = map.in_dim();
  r.n = u.n;
  r.A = u.A * map.matrix();
  r.b = u.A * map.shift() + u.b;
  return r;
}

std::vector<int> PartitionGroundTruth::label_set(const Point& y, double tol) const {
  std::vector<int> out;
  for (const auto& c : cells)
    if (contains(c.cell, y, tol)) out.push_back(c.label);
  return out;
}

const GroundTruthCell& PartitionGroundTruth::cell_of(int label) const {
  for (const auto& c : cells)
    if (c.label == label) return c;
  throw InvalidInput("unknown label");
}

PartitionGroundTruth uepp_cells(const Uepp& u) {
  u.validate();
  if (u.m > 4 || u.n > 8) throw InvalidInput("uepp_cells supports m <= 4 and n <= 8");
  PartitionGroundTruth gt;
  gt.m = u.m;
  gt.n = u.n;
  for (int i = 0; i < u.n; ++i) {
    GroundTruthCell c;
    c.label = i;
    c.halfspaces = simplex_hpolytope(u.m);
    for (int j = 0; j < u.n; ++j) {
      if (j == i) continue;
      c.halfspaces.add_row((u.A.row(i) - u.A.row(j)).transpose(), u.b[j] - u.b[i]);
    }
    c.cell = enumerate_vertices(c.halfspaces);
    gt.cells.push_back(std::move(c));
  }
  return gt;
}

namespace {

double section_thickness(const HPolytope& h, double x) {
  return chebyshev(cross_section(h, x)).radius;
}

}  // namespace

std::vector<double> critical_coordinates(const Uepp& u, double alpha) {
  if (alpha <= 0) throw InvalidInput("alpha must be positive");
  auto gt = uepp_cells(u);
  std::vector<double> xs;
  for (const auto& c : gt.cells) {
    if (c.cell.is_empty()) continue;
    for (const auto& v : c.cell.vertices()) xs.push_back(v[0]);
    if (u.m < 2) continue;
    double lo = c.cell.lower()[0], hi = c.cell.upper()[0];
    if (hi - lo <= kEta) continue;
    // Thickness of sections is concave in x: golden-section for the peak.
    const double g = (std::sqrt(5.0) - 1) / 2;
    double a = lo, b = hi;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = section_thickness(c.halfspaces, x1), f2 = section_thickness(c.halfspaces, x2);
    for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
      if (f1 < f2) {
        a = x1, x1 = x2, f1 = f2, x2 = a + g * (b - a), f2 = section_thickness(c.halfspaces, x2);
      } else {
        b = x2, x2 = x1, f2 = f1, x1 = b - g * (b - a), f1 = section_thickness(c.halfspaces, x1);
      }
    }
    double peak = (a + b) / 2;
    if (section_thickness(c.halfspaces, peak) < alpha) continue;
    auto crossing = [&](double inside, double outside) {
      for (int it = 0; it < 60; ++it) {
        double mid = (inside + outside) / 2;
        if (section_thickness(c.halfspaces, mid) >= alpha) inside = mid;
        else outside = mid;
      }
      return inside;
    };
    xs.push_back(crossing(peak, lo));
    xs.push_back(crossing(peak, hi));
  }
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  for (double x : xs)
    if (out.empty() || x - out.back() > kEta) out.push_back(x);
  return out;
}

Uepp random_uepp(int m, int n, std::uint64_t seed, const RandomUeppOptions& options) {
  if (m < 1 || n < 1) throw InvalidInput("random_uepp needs m, n >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(-1.0, 1.0), ub(-0.5, 0.5);
  Uepp u;
  u.m = m;
  u.n = n;
  u.A.resize(n, m);
  u.b.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) u.A(i, j) = ua(rng);
    u.b[i] = ub(rng);
  }
  int next = n - 1;
  if (options.duplicate_rows > 0 && n >= 2) {
    Point centroid = Point::Constant(m, 1.0 / (m + 1));
    int src = 0;
    u.values(centroid).maxCoeff(&src);
    for (int d = 0; d < options.duplicate_rows && next >= 0; ++d, --next) {
      if (next == src) --next;
      if (next < 0) break;
      u.A.row(next) = u.A.row(src);
      u.b[next] = u.b[src];
    }
  }
  for (int e = 0; e < options.empty_cells && next >= 0; ++e, --next) {
    u.A.row(next).setZero();
    u.b[next] = -10.0;
  }
  return u;
}

void QueryLog::reserve_one() const {
  if (budget_ && transcript_.size() >= *budget_) throw BudgetExhausted();
}

void QueryLog::write_jsonl(std::ostream& os) const {
  for (std::size_t i = 0; i < transcript_.size(); ++i) {
    const auto& r = transcript_[i];
    nlohmann::json j;
    j["index"] = i;
    j["point"] = std::vector<double>(r.point.data(), r.point.data() + r.point.size());
    j["label"] = r.label;
    os << j.dump() << '\n';
  }
}

Oracle::Oracle(int m, int n, LabelSetFn truth, OracleKind kind, TiePolicy policy, std::uint64_t seed,
               std::optional<std::uint64_t> budget)
    : m_(m), n_(n), truth_(std::move(truth)), kind_(kind), policy_(policy), seed_(seed), log_(budget),
      answered_(static_cast<std::size_t>(n)) {}

int Oracle::query(const Point& y) {
  if (y.size() != m_) throw InvalidInput("query dimension mismatch");
  if (!in_simplex(y)) throw InvalidInput("query point outside the simplex");
  log_.reserve_one();
  std::vector<int> ties = truth_(y);
  if (ties.empty()) throw GeometryError("ground truth returned no label");
  int label = kind_ == OracleKind::kLexicographic ? ties.front() : choose(ties, y);
  log_.record(y, label);
  if (policy_ == TiePolicy::kAntiLearner) answered_[label].push_back(y);
  return label;
}

int Oracle::choose(const std::vector<int>& ties, const Point& y) {
  if (ties.size() == 1) return ties.front();
  switch (policy_) {
    case TiePolicy::kMaxIndex:
      return ties.back();
    case TiePolicy::kRoundRobin:
      return ties[round_robin_++ % ties.size()];
    case TiePolicy::kSeeded: {
      // Same tie set, same answer.
      std::uint64_t h = seed_ ^ 0x9E3779B97F4A7C15ULL;
      for (int t : ties) {
        h ^= static_cast<std::uint64_t>(t) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
        h *= 0xBF58476D1CE4E5B9ULL;
      }
      h ^= h >> 31;
      return ties[h % ties.size()];
    }
    case TiePolicy::kAntiLearner: {
      int best = ties.front();
      double growth = std::numeric_limits<double>::infinity();
      for (int t : ties) {
        double g = project_onto_points(y, answered_[t]).dist;
        if (g < growth) growth = g, best = t;
      }
      return best;
    }
  }
  return ties.front();
}

Oracle Oracle::clone() const { return Oracle(m_, n_, truth_, kind_, policy_, seed_, log_.budget()); }

Oracle make_oracle(const Uepp& u, OracleKind kind, TiePolicy policy, std::uint64_t seed,
                   std::optional<std::uint64_t> budget) {
  u.validate();
  return Oracle(u.m, u.n, [u](const Point& y) { return uepp_label_set(u, y); }, kind, policy, seed, budget);
}

Oracle make_oracle(const PartitionGroundTruth& gt, OracleKind kind, TiePolicy policy, std::uint64_t seed,
                   std::optional<std::uint64_t> budget) {
  return Oracle(gt.m, gt.n, [gt](const Point& y) { return gt.label_set(y); }, kind, policy, seed, budget);
}

}  // namespace polylearn
