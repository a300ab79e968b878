#include "polylearn/cdgbs.hpp"

#include <algorithm>
#include <cmath>

namespace polylearn {

double DyadicInterval::lo() const { return x - std::ldexp(1.0, -level); }
double DyadicInterval::midpoint() const { return x - std::ldexp(1.0, -(level + 1)); }

std::uint64_t uncovered_cap(int m, int n) { return 2 * (binomial(n + m, m) + 2 * static_cast<std::uint64_t>(n)); }

double sub_eps(int m, int n, double eps, double t, double floor) {
  double s = eps * eps / (85.0 * (1.0 - t) * n * std::pow(static_cast<double>(m), 2.5));
  // The floor never lets a section run be coarser than eps / 16.
  return std::max(s, std::min(floor, eps / 16));
}

int dyadic_levels(double eps) {
  if (!(eps > 0)) throw InvalidInput("eps must be positive");
  return std::max(0, static_cast<int>(std::ceil(std::log2(2.0 / eps))));
}

double cdgbs_query_bound(int m, int n, double eps) {
  if (m == 0) return 1.0;
  double prod = 1.0;
  for (int i = 1; i <= m; ++i) prod *= binomial_real(n + i, i) + 2.0 * n;
  double lg = std::log2(170.0 * n * std::pow(static_cast<double>(m), 2.5) / eps);
  return prod * std::pow(2.0, 2.0 * m * m) * std::pow(lg, m);
}

double binary_search_bound(int n, double eps) { return n * std::ceil(std::log2(2.0 / eps)) + 2.0 * n; }

std::vector<DyadicInterval> uncovered_intervals(const EmpiricalLabelling& l, int k, double eps) {
  std::vector<DyadicInterval> out;
  const std::int64_t count = std::int64_t{1} << k;
  for (std::int64_t i = 1; i <= count; ++i) {
    DyadicInterval iv{k, static_cast<double>(i) / static_cast<double>(count)};
    if (!is_slice_covered(l, iv.lo(), iv.hi(), eps)) out.push_back(iv);
  }
  return out;
}

namespace {

class CountingOracle : public LabelOracle {
 public:
  explicit CountingOracle(LabelOracle& inner) : inner_(inner) {}
  int dim() const override { return inner_.dim(); }
  int label_count() const override { return inner_.label_count(); }
  int query(const Point& y) override {
    int l = inner_.query(y);
    ++count_;
    return l;
  }
  std::uint64_t count() const { return count_; }

 private:
  LabelOracle& inner_;
  std::uint64_t count_ = 0;
};

double van_der_corput(std::uint64_t k) {
  double v = 0.0, f = 0.5;
  while (k) {
    if (k & 1) v += f;
    k >>= 1;
    f *= 0.5;
  }
  return v;
}

int resolve_conflicts(EmpiricalLabelling& l) {
  int merges = 0;
  while (auto c = interior_conflict(l)) {
    l.merge_labels(c->i, c->j);
    ++merges;
  }
  return merges;
}

class Runner {
 public:
  Runner(const GbsConfig& cfg, bool adversarial) : cfg_(cfg), adversarial_(adversarial) {}

  EmpiricalLabelling run(int m, double eps, LabelOracle& q, GbsStats* stats) {
    if (m == 0) {
      EmpiricalLabelling l(0, cfg_.n);
      l.add_query(Point::Zero(0), q.query(Point::Zero(0)));
      return l;
    }
    if (m == 1) return binary_search(eps, q, stats);
    return sweep(m, eps, q, stats);
  }

 private:
  EmpiricalLabelling binary_search(double eps, LabelOracle& q, GbsStats* stats) {
    EmpiricalLabelling l(1, cfg_.n);
    auto ask = [&](double t) {
      Point y = Point::Constant(1, t);
      int lab = q.query(y);
      l.add_query(y, lab);
      if (adversarial_) {
        int k = resolve_conflicts(l);
        if (stats) stats->merges += k;
      }
      return lab;
    };
    int la = ask(0.0), lb = ask(1.0);
    struct Gap {
      double a, b;
      int la, lb;
    };
    std::vector<Gap> stack{{0.0, 1.0, la, lb}};
    while (!stack.empty()) {
      Gap g = stack.back();
      stack.pop_back();
      if (l.same_class(g.la, g.lb) || g.b - g.a <= eps) continue;
      double t = (g.a + g.b) / 2;
      int lt = ask(t);
      stack.push_back({t, g.b, lt, g.lb});
      stack.push_back({g.a, t, g.la, lt});
    }
    return l;
  }

  void section(EmpiricalLabelling& l, int m, double eps, double t, LabelOracle& q) {
    AffineMap f = section_map(m, t);
    const AffineMap& inv = f.inverse();
    MappedOracle sub_oracle(q, inv);
    EmpiricalLabelling sub = run(m - 1, sub_eps(m, cfg_.n, eps, t, cfg_.sub_eps_floor), sub_oracle, nullptr);
    // Pull back the hull vertices of each raw label; merges inside the section
    // run stay local to it.
    std::vector<std::vector<Point>> by_raw(cfg_.n);
    for (int c : sub.classes()) {
      const auto& pts = sub.class_points(c);
      const auto& raw = sub.class_raw_labels(c);
      for (std::size_t k = 0; k < pts.size(); ++k) by_raw[raw[k]].push_back(pts[k]);
    }
    for (int r = 0; r < cfg_.n; ++r) {
      if (by_raw[r].empty()) continue;
      VPolytope h = convex_hull(m - 1, by_raw[r]);
      for (const auto& v : h.vertices()) l.add_query(inv(v), r);
    }
  }

  EmpiricalLabelling sweep(int m, double eps, LabelOracle& q, GbsStats* stats) {
    EmpiricalLabelling l(m, cfg_.n);
    std::vector<double> sections;
    section(l, m, eps, 0.0, q);
    sections.push_back(0.0);
    Point e1 = Point::Zero(m);
    e1[0] = 1.0;
    l.add_query(e1, q.query(e1));

    auto covered = [&](double a, double b) { return check_slab(l, a, b, eps).covered; };
    auto merge_all = [&]() {
      int k = resolve_conflicts(l);
      if (stats) stats->merges += k;
    };
    if (adversarial_) merge_all();

    const int K = dyadic_levels(eps);
    const std::uint64_t cap = uncovered_cap(m, cfg_.n);
    std::vector<std::pair<double, double>> open{{0.0, 1.0}};
    bool halt = false;
    for (int k = 1; k <= K && !halt; ++k) {
      std::vector<std::pair<double, double>> level;
      for (auto [a, b] : open) {
        double mid = (a + b) / 2;
        for (auto iv : {std::pair{a, mid}, std::pair{mid, b}})
          if (!covered(iv.first, iv.second)) level.push_back(iv);
      }
      if (stats) stats->uncovered_per_level.push_back(static_cast<int>(level.size()));
      if (level.empty()) {
        if (stats) stats->early_exit = true;
        break;
      }
      if (!adversarial_ && level.size() > cap) {
        if (stats) stats->halted_on_cap = true;
        break;
      }
      for (std::size_t i = 0; i < level.size() && !halt; ++i) {
        auto [a, b] = level[i];
        if (!covered(a, b)) {
          double t = (a + b) / 2;
          section(l, m, eps, t, q);
          sections.push_back(t);
          if (stats) ++stats->section_calls;
        }
        if (adversarial_) {
          merge_all();
        } else if (interior_conflict(l)) {
          if (stats) stats->halted_on_conflict = true;
          halt = true;
          break;
        }
        // Close once every interval of this level is covered; earlier levels' covered
        // intervals stay covered as hulls only grow.
        bool close = true;
        for (std::size_t j = i + 1; j < level.size() && close; ++j) close = covered(level[j].first, level[j].second);
        for (std::size_t j = 0; j <= i && close; ++j) close = covered(level[j].first, level[j].second);
        if (close) {
          if (stats) stats->early_exit = true;
          halt = true;
        }
      }
      open = std::move(level);
    }
    fix_uncovered_critical(l, m, eps, q, sections, stats);
    if (adversarial_) merge_all();
    return l;
  }

  // Re-sections near recursion coordinates whose eps/2-neighbourhood is still uncovered.
  void fix_uncovered_critical(EmpiricalLabelling& l, int m, double eps, LabelOracle& q, std::vector<double>& sections,
                              GbsStats* stats) {
    const std::uint64_t cap = uncovered_cap(m, cfg_.n);
    std::uint64_t attempts = 0, draw = cfg_.seed % 1024 + 1;
    while (true) {
      double bad = -1.0;
      for (double t : sections) {
        if (!check_slab(l, std::max(0.0, t - eps / 2), std::min(1.0, t + eps / 2), eps).covered) {
          bad = t;
          break;
        }
      }
      if (bad < 0) return;
      if (attempts >= cap) throw SearchFailure("degenerate neighborhood exhausted");
      double z;
      do {
        z = bad + (2 * van_der_corput(draw++) - 1) * eps / 2;
      } while (z < 0 || z >= 1 || std::find(sections.begin(), sections.end(), z) != sections.end());
      section(l, m, eps, z, q);
      sections.push_back(z);
      ++attempts;
      if (stats) ++stats->fix_calls;
    }
  }

  GbsConfig cfg_;
  bool adversarial_;
};

GbsResult run_gbs(const GbsConfig& cfg, LabelOracle& oracle, bool adversarial) {
  if (cfg.m < 0 || cfg.n < 1) throw InvalidInput("cd_gbs needs m >= 0 and n >= 1");
  if (!(cfg.eps > 0)) throw InvalidInput("eps must be positive");
  if (oracle.dim() != cfg.m || oracle.label_count() != cfg.n) throw InvalidInput("oracle does not match m, n");
  CountingOracle counter(oracle);
  Runner runner(cfg, adversarial);
  GbsResult res;
  res.labelling = runner.run(cfg.m, cfg.eps, counter, &res.stats);
  res.stats.queries = counter.count();
  return res;
}

}  // namespace

GbsResult cd_gbs(const GbsConfig& cfg, LabelOracle& oracle) { return run_gbs(cfg, oracle, false); }
GbsResult cd_gbs_adversarial(const GbsConfig& cfg, LabelOracle& oracle) { return run_gbs(cfg, oracle, true); }

}  // namespace polylearn
