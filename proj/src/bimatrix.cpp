#include "polylearn/bimatrix.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "polylearn/cdgbs.hpp"
#include "polylearn/crgbs.hpp"

namespace polylearn {

namespace {

thread_local int solver_depth = 0;
thread_local int oracle_depth = 0;
thread_local std::uint64_t audit_violations = 0;

}  // namespace

PayoffAudit::SolverScope::SolverScope() { ++solver_depth; }
PayoffAudit::SolverScope::~SolverScope() { --solver_depth; }
PayoffAudit::OracleScope::OracleScope() { ++oracle_depth; }
PayoffAudit::OracleScope::~OracleScope() { --oracle_depth; }
void PayoffAudit::touch() {
  if (solver_depth > 0 && oracle_depth == 0) ++audit_violations;
}
std::uint64_t PayoffAudit::violations() { return audit_violations; }
void PayoffAudit::reset() { audit_violations = 0; }

BimatrixGame::BimatrixGame(Matrix A, Matrix B) : a_(std::move(A)), b_(std::move(B)) {
  if (a_.rows() < 1 || a_.cols() < 1) throw InvalidInput("game needs at least one row and column");
  if (a_.rows() != b_.rows() || a_.cols() != b_.cols()) throw InvalidInput("payoff matrices differ in shape");
  for (const Matrix* p : {&a_, &b_})
    if (p->minCoeff() < -kEta || p->maxCoeff() > 1 + kEta) throw InvalidInput("payoffs must lie in [0, 1]");
}

Point full_mix(const Point& reduced) {
  Point f(reduced.size() + 1);
  f[0] = 1.0 - reduced.sum();
  f.tail(reduced.size()) = reduced;
  return f;
}

Point reduced_mix(const Point& full) {
  if (full.size() < 1) throw InvalidInput("empty mixed strategy");
  return full.tail(full.size() - 1);
}

namespace {

void check_mix(const Point& reduced, int actions) {
  if (reduced.size() != actions - 1) throw InvalidInput("mixed strategy dimension mismatch");
  if (!in_simplex(reduced, kEta)) throw InvalidInput("mixed strategy outside the simplex");
}

}  // namespace

Utilities utilities(const BimatrixGame& g, const Point& u, const Point& v) {
  check_mix(u, g.rows());
  check_mix(v, g.cols());
  Point uf = full_mix(u), vf = full_mix(v);
  return {uf.dot(g.A() * vf), uf.dot(g.B() * vf)};
}

Eigen::VectorXd pure_utilities(const BimatrixGame& g, Side side, const Point& opponent) {
  if (side == Side::kRow) {
    check_mix(opponent, g.cols());
    return g.A() * full_mix(opponent);
  }
  check_mix(opponent, g.rows());
  return g.B().transpose() * full_mix(opponent);
}

double best_value(const BimatrixGame& g, Side side, const Point& opponent) {
  return pure_utilities(g, side, opponent).maxCoeff();
}

std::vector<int> strong_best_responses(const BimatrixGame& g, Side side, const Point& opponent) {
  Eigen::VectorXd u = pure_utilities(g, side, opponent);
  double best = u.maxCoeff();
  std::vector<int> out;
  for (int i = 0; i < u.size(); ++i)
    if (u[i] >= best - kEta) out.push_back(i);
  return out;
}

Oracle br_oracle(const BimatrixGame& g, Side side, OracleKind kind, TiePolicy policy, std::uint64_t seed,
                 std::optional<std::uint64_t> budget) {
  const int own = side == Side::kRow ? g.rows() : g.cols();
  const int other = side == Side::kRow ? g.cols() : g.rows();
  auto truth = [g, side](const Point& y) {
    PayoffAudit::OracleScope scope;
    return strong_best_responses(g, side, y);
  };
  return Oracle(other - 1, own, truth, kind, policy, seed, budget);
}

Uepp br_partition(const BimatrixGame& g, Side side) {
  // Row side: U_i(v) = a_i0 + sum_j v_j (a_ij - a_i0); column side likewise with B^T.
  Matrix P = side == Side::kRow ? g.A() : Matrix(g.B().transpose());
  Uepp u;
  u.n = static_cast<int>(P.rows());
  u.m = static_cast<int>(P.cols()) - 1;
  u.A = Matrix(u.n, u.m);
  u.b = P.col(0);
  for (int j = 1; j <= u.m; ++j) u.A.col(j - 1) = P.col(j) - P.col(0);
  return u;
}

double column_accuracy(int m, double eps) { return eps / (2.0 * std::sqrt(std::max(m - 1, 1))); }
double row_accuracy(int n, double eps) { return eps / (2.0 * std::sqrt(std::max(n - 1, 1))); }

namespace {

// Every vertex of Delta^d labelled 0, for partitions with a single label.
EmpiricalLabelling single_label(int d) {
  EmpiricalLabelling l(d, 1);
  for (int v = 0; v <= d; ++v) {
    Point e = Point::Zero(d);
    if (v > 0) e[v - 1] = 1.0;
    l.add_query(e, 0);
  }
  return l;
}

using Mask = std::uint32_t;

Mask support_mask(const std::vector<int>& weights) {
  Mask s = 0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] > 0) s |= Mask{1} << i;
  return s;
}

Mask label_mask(const std::vector<int>& labels) {
  Mask s = 0;
  for (int l : labels) s |= Mask{1} << l;
  return s;
}

Point grid_point(const std::vector<int>& weights, int N) {
  Point p(static_cast<int>(weights.size()) - 1);
  for (int i = 1; i < static_cast<int>(weights.size()); ++i) p[i - 1] = static_cast<double>(weights[i]) / N;
  return p;
}

// Weight vectors with denominator N over `count` actions, grouped by support
// size and, within a support, in lexicographic order.
std::vector<std::vector<int>> grid_by_support(int count, int N) {
  std::vector<std::vector<int>> out;
  for (int size = 1; size <= count; ++size) {
    std::vector<int> pick(size);
    for (int i = 0; i < size; ++i) pick[i] = i;
    while (true) {
      // Positive compositions of N into `size` parts.
      std::vector<int> parts(size, 1);
      if (N >= size) {
        auto rec = [&](auto&& self, int i, int left) -> void {
          if (i == size - 1) {
            parts[i] = left;
            std::vector<int> w(count, 0);
            for (int k = 0; k < size; ++k) w[pick[k]] = parts[k];
            out.push_back(std::move(w));
            return;
          }
          for (int a = 1; a <= left - (size - 1 - i); ++a) {
            parts[i] = a;
            self(self, i + 1, left - a);
          }
        };
        rec(rec, 0, N);
      }
      int i = size - 1;
      while (i >= 0 && pick[i] == count - size + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

struct GridHit {
  Point u, v;
};

std::optional<GridHit> grid_search(const EmpiricalLabelling& col_l, const EmpiricalLabelling& row_l, int m, int n,
                                   int N, double sigma_c, double sigma_r) {
  col_l.freeze();
  // Column-mix table: support of v and the row player's Voronoi labels at v.
  auto vs = grid_by_support(n, N);
  std::vector<Mask> v_support(vs.size());
  std::vector<Point> v_points(vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) {
    v_support[i] = support_mask(vs[i]);
    v_points[i] = grid_point(vs[i], N);
  }
  std::vector<Mask> v_labels = voronoi_masks(row_l, v_points, Norm::kL2, sigma_r);
  // For each column support, the first v index per distinct Voronoi mask.
  std::map<Mask, std::vector<std::pair<Mask, std::size_t>>> by_support;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    auto& list = by_support[v_support[i]];
    if (std::none_of(list.begin(), list.end(), [&](const auto& e) { return e.first == v_labels[i]; }))
      list.emplace_back(v_labels[i], i);
  }

  auto us = grid_by_support(m, N);
  const std::size_t none = vs.size();
  // Best v index for u index i, or none.
  auto match = [&](std::size_t i) {
    Mask su = support_mask(us[i]);
    Mask vc = label_mask(voronoi_labels(grid_point(us[i], N), col_l, Norm::kL2, sigma_c));
    std::size_t best = none;
    for (const auto& [sv, list] : by_support) {
      if ((sv & ~vc) != 0) continue;
      for (const auto& [vr, idx] : list)
        if ((su & ~vr) == 0) best = std::min(best, idx);
    }
    return best;
  };
  const std::size_t block = 256;
  for (std::size_t start = 0; start < us.size(); start += block) {
    const std::size_t end = std::min(us.size(), start + block);
    std::vector<std::size_t> hit(end - start, none);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::size_t i = start; i < end; ++i) hit[i - start] = match(i);
    for (std::size_t i = start; i < end; ++i)
      if (hit[i - start] != none) return GridHit{grid_point(us[i], N), grid_point(vs[hit[i - start]], N)};
  }
  return std::nullopt;
}

}  // namespace

LearnedPartitions learn_best_responses(LabelOracle& row_br, LabelOracle& col_br, const WsneConfig& cfg) {
  if (!(cfg.eps > 0)) throw InvalidInput("eps must be positive");
  const int m = row_br.label_count(), n = col_br.label_count();
  if (row_br.dim() != n - 1 || col_br.dim() != m - 1) throw InvalidInput("oracle dimensions do not describe a game");
  if (m > 30 || n > 30) throw InvalidInput("at most 30 actions per player");
  LearnedPartitions out;
  const double ec = column_accuracy(m, cfg.eps), er = row_accuracy(n, cfg.eps);
  if (n == 1) {
    out.column = single_label(m - 1);
  } else {
    CrResult r = cr_gbs({m - 1, n, ec / 2, OracleKind::kAdversarial, cfg.seed}, col_br);
    out.column = std::move(r.labelling);
    out.col_queries = r.stats.queries;
  }
  if (m == 1) {
    out.row = single_label(n - 1);
  } else {
    GbsResult r = cd_gbs_adversarial({n - 1, m, er / 2, OracleKind::kAdversarial, cfg.seed}, row_br);
    out.row = std::move(r.labelling);
    out.row_queries = r.stats.queries;
  }
  return out;
}

WsneCertificate solve_wsne(LabelOracle& row_br, LabelOracle& col_br, const WsneConfig& cfg) {
  LearnedPartitions learned = learn_best_responses(row_br, col_br, cfg);
  const int m = row_br.label_count(), n = col_br.label_count();
  const double sigma_c = std::min(cfg.eps / 8, column_accuracy(m, cfg.eps) / 4);
  const double sigma_r = std::min(cfg.eps / 8, row_accuracy(n, cfg.eps) / 4);
  int N = static_cast<int>(std::ceil(8.0 / cfg.eps));
  for (int level = 0; level <= cfg.refinements; ++level, N *= 2) {
    auto hit = grid_search(learned.column, learned.row, m, n, N, sigma_c, sigma_r);
    if (!hit) continue;
    WsneCertificate c;
    c.u = hit->u;
    c.v = hit->v;
    c.eps = cfg.eps;
    Point uf = full_mix(c.u), vf = full_mix(c.v);
    for (int i = 0; i < m; ++i)
      if (uf[i] > cfg.support_threshold) c.row_support.push_back(i);
    for (int j = 0; j < n; ++j)
      if (vf[j] > cfg.support_threshold) c.col_support.push_back(j);
    c.row_queries = learned.row_queries;
    c.col_queries = learned.col_queries;
    return c;
  }
  throw SearchFailure("fixed point not found at resolution");
}

WsneCertificate solve_wsne(const BimatrixGame& g, const WsneConfig& cfg, TiePolicy policy) {
  Oracle row = br_oracle(g, Side::kRow, OracleKind::kAdversarial, policy, cfg.seed);
  Oracle col = br_oracle(g, Side::kColumn, OracleKind::kAdversarial, policy, cfg.seed + 1);
  WsneCertificate c;
  {
    PayoffAudit::SolverScope scope;
    c = solve_wsne(row, col, cfg);
  }
  WsneCertificate v = verify_wsne(g, c.u, c.v, cfg.eps);
  v.row_queries = c.row_queries;
  v.col_queries = c.col_queries;
  return v;
}

WsneCertificate verify_wsne(const BimatrixGame& g, const Point& u, const Point& v, double eps) {
  check_mix(u, g.rows());
  check_mix(v, g.cols());
  WsneCertificate c;
  c.u = u;
  c.v = v;
  c.eps = eps;
  c.valid = true;
  Point uf = full_mix(u), vf = full_mix(v);
  Eigen::VectorXd ru = pure_utilities(g, Side::kRow, v), cu = pure_utilities(g, Side::kColumn, u);
  const double rb = ru.maxCoeff(), cb = cu.maxCoeff();
  for (int i = 0; i < g.rows(); ++i) {
    if (uf[i] <= kEta) continue;
    c.row_support.push_back(i);
    c.row_regrets.push_back(rb - ru[i]);
    c.valid = c.valid && rb - ru[i] <= eps + kEta;
  }
  for (int j = 0; j < g.cols(); ++j) {
    if (vf[j] <= kEta) continue;
    c.col_support.push_back(j);
    c.col_regrets.push_back(cb - cu[j]);
    c.valid = c.valid && cb - cu[j] <= eps + kEta;
  }
  return c;
}

BimatrixGame lower_bound_game(double x, double y) {
  if (!(x > 0 && x < 1 && y > 0 && y < 1)) throw InvalidInput("lower-bound game needs x, y in (0, 1)");
  Matrix A(2, 2), B(2, 2);
  A << x, x, 0, 1;
  B << 0, y, 1, y;
  return BimatrixGame(A, B);
}

BimatrixGame random_game(int m, int n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw InvalidInput("game needs at least one row and column");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  Matrix A(m, n), B(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      A(i, j) = d(rng);
      B(i, j) = d(rng);
    }
  return BimatrixGame(A, B);
}

}  // namespace polylearn
