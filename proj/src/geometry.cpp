#include "polylearn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hull_detail.hpp"
#include "polylearn/lp.hpp"

namespace polylearn {

void HPolytope::add_row(const Point& normal, double offset) {
  if (normal.size() != dim_) throw InvalidInput("halfspace dimension mismatch");
  double len = normal.norm();
  if (len <= 1e-14) {
    normals_.push_back(Point::Zero(dim_));
    offsets_.push_back(offset);
    return;
  }
  normals_.push_back(normal / len);
  offsets_.push_back(offset / len);
}

bool HPolytope::contains(const Point& x, double tol) const { return depth(x) >= -tol; }

double HPolytope::depth(const Point& x) const {
  if (infeasible_) return -std::numeric_limits<double>::infinity();
  double d = std::numeric_limits<double>::infinity();
  for (int r = 0; r < size(); ++r) d = std::min(d, normals_[r].dot(x) - offsets_[r]);
  return d;
}

HPolytope simplex_hpolytope(int m) {
  HPolytope h(m);
  for (int i = 0; i < m; ++i) h.add_row(Point::Unit(m, i), 0.0);
  if (m > 0) h.add_row(-Point::Ones(m), -1.0);
  return h;
}

VPolytope VPolytope::empty(int dim) {
  VPolytope p;
  p.dim_ = dim;
  return p;
}

VPolytope convex_hull(int dim, const std::vector<Point>& points) {
  VPolytope p;
  p.dim_ = dim;
  if (points.empty()) return p;
  for (const auto& q : points)
    if (q.size() != dim) throw InvalidInput("convex_hull: dimension mismatch");
  auto h = detail::hull_indices(points, kEta);
  p.affine_dim_ = h.affine_dim;
  for (int id : h.vertices) p.vertices_.push_back(points[id]);
  p.edges_ = std::move(h.edges);
  p.facets_ = HPolytope(dim);
  if (p.affine_dim_ == dim) {
    for (const auto& [n, o] : h.facets) p.facets_.add_row(n, o);
  }
  p.lo_ = p.vertices_[0];
  p.hi_ = p.vertices_[0];
  for (const auto& v : p.vertices_) {
    p.lo_ = p.lo_.cwiseMin(v);
    p.hi_ = p.hi_.cwiseMax(v);
  }
  return p;
}

VPolytope simplex_vpolytope(int m) { return convex_hull(m, simplex_vertices(m)); }

ChebyshevBall chebyshev(const HPolytope& p) {
  ChebyshevBall ball;
  if (p.infeasible()) return ball;
  const int d = p.dim();
  std::vector<int> rows;
  for (int r = 0; r < p.size(); ++r) {
    if (p.normal(r).squaredNorm() == 0.0) {
      if (p.offset(r) > kEta) return ball;
      continue;
    }
    rows.push_back(r);
  }
  if (d == 0) {
    ball.feasible = true;
    ball.center = Point::Zero(0);
    return ball;
  }
  LinearProgram lp;
  lp.A = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), d + 1);
  lp.b.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    lp.A.row(static_cast<Eigen::Index>(i)).head(d) = -p.normal(rows[i]).transpose();
    lp.A(static_cast<Eigen::Index>(i), d) = 1.0;
    lp.b[static_cast<Eigen::Index>(i)] = -p.offset(rows[i]);
  }
  lp.c = Eigen::VectorXd::Zero(d + 1);
  lp.c[d] = 1.0;
  lp.free_vars.assign(d + 1, true);
  lp.free_vars[d] = false;
  auto res = solve_lp(lp);
  if (res.status == LpStatus::kUnbounded) throw GeometryError("unbounded region");
  if (res.status == LpStatus::kInfeasible) return ball;
  ball.feasible = true;
  ball.radius = res.x[d] < 1e-12 ? 0.0 : res.x[d];
  ball.center = res.x.head(d);
  return ball;
}

double diameter(const VPolytope& p) {
  if (p.is_empty()) throw GeometryError("diameter of empty polytope");
  double best = 0.0;
  const auto& v = p.vertices();
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) best = std::max(best, (v[i] - v[j]).norm());
  return best;
}

Projection project_onto_points(const Point& x, const std::vector<Point>& V) {
  Projection out;
  if (V.empty()) {
    out.dist = std::numeric_limits<double>::infinity();
    return out;
  }
  const int n = static_cast<int>(V.size());
  std::vector<Point> P(n);
  double maxn2 = 0.0;
  int i0 = 0;
  for (int i = 0; i < n; ++i) {
    P[i] = V[i] - x;
    double s = P[i].squaredNorm();
    maxn2 = std::max(maxn2, s);
    if (s < P[i0].squaredNorm()) i0 = i;
  }
  std::vector<int> S{i0};
  std::vector<double> w{1.0};
  Point y = P[i0];
  const double wtol = 1e-14;
  for (int iter = 0; iter < 10 * n + 100; ++iter) {
    int j = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      double v = P[i].dot(y);
      if (v < best) best = v, j = i;
    }
    double gap = y.squaredNorm() - best;
    if (gap <= 1e-15 * std::max(maxn2, 1e-30)) break;
    if (std::find(S.begin(), S.end(), j) != S.end()) break;
    S.push_back(j);
    w.push_back(0.0);
    for (int minor = 0; minor < 1000; ++minor) {
      const int s = static_cast<int>(S.size());
      Matrix K = Matrix::Zero(s + 1, s + 1);
      for (int a = 0; a < s; ++a) {
        for (int b = a; b < s; ++b) K(a, b) = K(b, a) = P[S[a]].dot(P[S[b]]);
        K(a, s) = K(s, a) = 1.0;
      }
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
      rhs[s] = 1.0;
      Eigen::VectorXd alpha = K.completeOrthogonalDecomposition().solve(rhs).head(s);
      if (alpha.minCoeff() > wtol) {
        for (int a = 0; a < s; ++a) w[a] = alpha[a];
        break;
      }
      double theta = 1.0;
      for (int a = 0; a < s; ++a) {
        if (alpha[a] <= wtol && w[a] - alpha[a] > 0) theta = std::min(theta, w[a] / (w[a] - alpha[a]));
      }
      for (int a = 0; a < s; ++a) w[a] = theta * alpha[a] + (1 - theta) * w[a];
      int argmin = static_cast<int>(std::min_element(w.begin(), w.end()) - w.begin());
      std::vector<int> S2;
      std::vector<double> w2;
      for (int a = 0; a < s; ++a) {
        if (w[a] > wtol && a != argmin) {
          S2.push_back(S[a]);
          w2.push_back(w[a]);
        }
      }
      if (S2.empty()) {
        S2.push_back(S[argmin == 0 && s > 1 ? 1 : 0]);
        w2.push_back(1.0);
      }
      double tot = 0;
      for (double v : w2) tot += v;
      for (double& v : w2) v /= tot;
      S = std::move(S2);
      w = std::move(w2);
    }
    Point y2 = Point::Zero(x.size());
    for (std::size_t a = 0; a < S.size(); ++a) y2 += w[a] * P[S[a]];
    if (y2.squaredNorm() > y.squaredNorm() * (1 + 1e-12)) break;
    y = y2;
  }
  out.dist = y.norm();
  if (out.dist <= kEta) out.dist = 0.0;
  out.witness = x + y;
  return out;
}

namespace {

Projection l1_projection(const Point& x, const std::vector<Point>& V) {
  const int n = static_cast<int>(V.size());
  const int d = static_cast<int>(x.size());
  LinearProgram lp;
  lp.A = Matrix::Zero(2 * d + 2, n + d);
  lp.b = Eigen::VectorXd::Zero(2 * d + 2);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < n; ++j) {
      lp.A(i, j) = V[j][i];
      lp.A(d + i, j) = -V[j][i];
    }
    lp.A(i, n + i) = -1.0;
    lp.A(d + i, n + i) = -1.0;
    lp.b[i] = x[i];
    lp.b[d + i] = -x[i];
  }
  for (int j = 0; j < n; ++j) {
    lp.A(2 * d, j) = 1.0;
    lp.A(2 * d + 1, j) = -1.0;
  }
  lp.b[2 * d] = 1.0;
  lp.b[2 * d + 1] = -1.0;
  lp.c = Eigen::VectorXd::Zero(n + d);
  lp.c.tail(d).setConstant(-1.0);
  auto res = solve_lp(lp);
  Projection out;
  if (res.status != LpStatus::kOptimal) throw GeometryError("l1 projection failed");
  out.witness = Point::Zero(d);
  for (int j = 0; j < n; ++j) out.witness += res.x[j] * V[j];
  out.dist = (out.witness - x).lpNorm<1>();
  if (out.dist <= kEta) out.dist = 0.0;
  return out;
}

}  // namespace

Projection distance_to_hull(const Point& x, const VPolytope& p, Norm n) {
  if (p.is_empty()) {
    Projection out;
    out.dist = std::numeric_limits<double>::infinity();
    return out;
  }
  if (x.size() != p.dim()) throw InvalidInput("distance_to_hull: dimension mismatch");
  if (p.full_dim() && p.facets().depth(x) >= 0.0) return Projection{0.0, x};
  if (n == Norm::kL1) return l1_projection(x, p.vertices());
  return project_onto_points(x, p.vertices());
}

bool contains(const VPolytope& p, const Point& x, double tol) {
  if (p.is_empty()) return false;
  if (p.full_dim()) return p.facets().depth(x) >= -tol;
  return project_onto_points(x, p.vertices()).dist <= tol;
}

namespace {

void section_points(const VPolytope& p, double x, std::vector<Point>& out) {
  const auto& v = p.vertices();
  for (const auto& q : v) {
    if (std::abs(q[0] - x) <= kEta) {
      Point r = q;
      r[0] = x;
      out.push_back(r);
    }
  }
  for (auto [a, b] : p.edges()) {
    double da = v[a][0] - x, db = v[b][0] - x;
    if (std::abs(da) <= kEta || std::abs(db) <= kEta) continue;
    if ((da < 0) == (db < 0)) continue;
    double t = da / (da - db);
    Point r = v[a] + t * (v[b] - v[a]);
    r[0] = x;
    out.push_back(r);
  }
}

}  // namespace

std::vector<Point> cross_section_points(const VPolytope& p, double x) {
  std::vector<Point> pts;
  if (!p.is_empty()) section_points(p, x, pts);
  return pts;
}

VPolytope cross_section(const VPolytope& p, double x) {
  if (p.dim() < 1) throw InvalidInput("cross_section needs dimension >= 1");
  std::vector<Point> pts;
  if (!p.is_empty()) section_points(p, x, pts);
  return convex_hull(p.dim(), pts);
}

VPolytope slice(const VPolytope& p, double x, double y) {
  if (x > y) throw InvalidInput("slice: empty interval");
  if (p.dim() < 1) throw InvalidInput("slice needs dimension >= 1");
  std::vector<Point> pts;
  if (!p.is_empty()) {
    for (const auto& q : p.vertices())
      if (q[0] > x + kEta && q[0] < y - kEta) pts.push_back(q);
    section_points(p, x, pts);
    if (y > x) section_points(p, y, pts);
  }
  return convex_hull(p.dim(), pts);
}

HPolytope cross_section(const HPolytope& p, double x) {
  if (p.dim() < 1) throw InvalidInput("cross_section needs dimension >= 1");
  HPolytope out(p.dim() - 1);
  if (p.infeasible()) {
    out.mark_infeasible();
    return out;
  }
  for (int r = 0; r < p.size(); ++r) {
    Point n = p.normal(r).tail(p.dim() - 1);
    double off = p.offset(r) - p.normal(r)[0] * x;
    if (n.norm() <= 1e-12) {
      if (off > kEta) out.mark_infeasible();
      continue;
    }
    out.add_row(n, off);
  }
  return out;
}

VPolytope enumerate_vertices(const HPolytope& p) {
  const int d = p.dim();
  if (p.infeasible()) return VPolytope::empty(d);
  std::vector<int> rows;
  for (int r = 0; r < p.size(); ++r) {
    if (p.normal(r).squaredNorm() == 0.0) {
      if (p.offset(r) > kEta) return VPolytope::empty(d);
    } else {
      rows.push_back(r);
    }
  }
  if (d == 0) return convex_hull(0, {Point::Zero(0)});
  const int R = static_cast<int>(rows.size());
  if (R < d) throw GeometryError("unbounded region");
  if (binomial_real(R, d) > 2e6) throw GeometryError("vertex enumeration too large");
  std::vector<Point> verts;
  std::vector<int> pick(d);
  for (int i = 0; i < d; ++i) pick[i] = i;
  Matrix N(d, d);
  Eigen::VectorXd o(d);
  while (true) {
    for (int i = 0; i < d; ++i) {
      N.row(i) = p.normal(rows[pick[i]]).transpose();
      o[i] = p.offset(rows[pick[i]]);
    }
    Eigen::FullPivLU<Matrix> lu(N);
    if (lu.rank() == d) {
      Point v = lu.solve(o);
      if (p.contains(v, 1e-9)) verts.push_back(v);
    }
    int i = d - 1;
    while (i >= 0 && pick[i] == R - d + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < d; ++j) pick[j] = pick[j - 1] + 1;
  }
  return convex_hull(d, verts);
}

const AffineMap& AffineMap::inverse() const {
  if (!inverse_) throw GeometryError("affine map has no inverse");
  return *inverse_;
}

void AffineMap::set_inverse(const AffineMap& inv) {
  // Verify a left inverse when this map lifts, a right inverse when it drops dimension.
  const bool left = in_dim() <= out_dim();
  const int n = left ? in_dim() : out_dim();
  for (int i = 0; i <= n; ++i) {
    Point q = Point::Zero(n);
    if (i > 0) q[i - 1] = 1.0;
    Point back = left ? inv.apply(apply(q)) : apply(inv.apply(q));
    if ((back - q).lpNorm<Eigen::Infinity>() > kEta) throw GeometryError("affine inverse check failed");
  }
  inverse_ = std::make_shared<const AffineMap>(inv);
}

AffineMap AffineMap::compose(const AffineMap& inner) const {
  return AffineMap(matrix_ * inner.matrix_, matrix_ * inner.shift_ + shift_);
}

AffineMap section_map(int m, double x) {
  if (m < 1) throw InvalidInput("section_map needs m >= 1");
  if (x >= 1.0 || x < 0.0) throw InvalidInput("section_map needs 0 <= x < 1");
  Matrix f = Matrix::Zero(m - 1, m);
  Matrix g = Matrix::Zero(m, m - 1);
  for (int i = 1; i < m; ++i) {
    f(i - 1, i) = 1.0 / (1.0 - x);
    g(i, i - 1) = 1.0 - x;
  }
  Point gs = Point::Zero(m);
  gs[0] = x;
  AffineMap fwd(f, Point::Zero(m - 1));
  fwd.set_inverse(AffineMap(g, gs));
  return fwd;
}

AffineMap lambda_embed(int m) {
  Matrix f = Matrix::Zero(m + 1, m);
  f.row(0).setConstant(-1.0);
  f.bottomRows(m) = Matrix::Identity(m, m);
  Point s = Point::Zero(m + 1);
  s[0] = 1.0;
  Matrix g = Matrix::Zero(m, m + 1);
  g.rightCols(m) = Matrix::Identity(m, m);
  AffineMap fwd(f, s);
  fwd.set_inverse(AffineMap(g, Point::Zero(m)));
  return fwd;
}

std::vector<std::pair<Face, AffineMap>> enumerate_k_faces(int m, int k) {
  if (k < 0 || k > m) throw InvalidInput("enumerate_k_faces needs 0 <= k <= m");
  std::vector<std::pair<Face, AffineMap>> out;
  std::vector<int> pick(k + 1);
  for (int i = 0; i <= k; ++i) pick[i] = i;
  while (true) {
    Face face{pick, k};
    // Forward map reads the coordinates of vertices s_1..s_k.
    Matrix f = Matrix::Zero(k, m);
    Matrix g = Matrix::Zero(m, k);
    Point gs = Point::Zero(m);
    const int s0 = pick[0];
    for (int j = 1; j <= k; ++j) {
      f(j - 1, pick[j] - 1) = 1.0;
      g(pick[j] - 1, j - 1) = 1.0;
      if (s0 > 0) g(s0 - 1, j - 1) = -1.0;
    }
    if (s0 > 0) gs[s0 - 1] = 1.0;
    AffineMap fwd(f, Point::Zero(k));
    fwd.set_inverse(AffineMap(g, gs));
    out.emplace_back(std::move(face), std::move(fwd));
    int i = k;
    while (i >= 0 && pick[i] == m - k + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j <= k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

HPolytope gamma_interior(const HPolytope& p, const std::vector<int>& boundary_rows, double gamma) {
  HPolytope out(p.dim());
  if (p.infeasible()) out.mark_infeasible();
  for (int r = 0; r < p.size(); ++r) {
    bool boundary = std::find(boundary_rows.begin(), boundary_rows.end(), r) != boundary_rows.end();
    out.add_row(p.normal(r), p.offset(r) + (boundary ? 0.0 : gamma));
  }
  return out;
}

namespace {

// One-dimensional squared distance transform (lower envelope of parabolas).
// Infinite entries contribute no parabola.
void edt_1d(std::vector<double>& f, std::vector<double>& out, std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  const double inf = std::numeric_limits<double>::infinity();
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  int k = -1;
  auto meet = [&](int q, int p) { return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p)); };
  for (int q = 0; q < n; ++q) {
    if (f[q] == inf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      continue;
    }
    double s = meet(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = meet(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  if (k < 0) return;
  out.assign(n, 0.0);
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    double dq = q - v[j];
    out[q] = dq * dq + f[v[j]];
  }
  f.swap(out);
}

}  // namespace

double grid_thickness(const Point& lo, const Point& hi, double spacing,
                      const std::function<bool(const Point&)>& inside) {
  const int d = static_cast<int>(lo.size());
  if (d == 0 || hi.size() != d || !(spacing > 0)) throw InvalidInput("grid_thickness needs a box and spacing");
  std::vector<std::int64_t> counts(d), stride(d);
  std::int64_t total = 1;
  for (int i = 0; i < d; ++i) {
    counts[i] = static_cast<std::int64_t>(std::ceil((hi[i] - lo[i]) / spacing)) + 3;  // one pad layer each side
    stride[i] = total;
    total *= counts[i];
    if (total > 100'000'000) throw InvalidInput("grid_thickness lattice too large");
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> f(total);
  bool any = false;
  for (std::int64_t idx = 0; idx < total; ++idx) {
    Point g(d);
    std::int64_t rest = idx;
    bool pad = false;
    for (int i = 0; i < d; ++i) {
      std::int64_t c = rest % counts[i];
      rest /= counts[i];
      pad = pad || c == 0 || c == counts[i] - 1;
      g[i] = lo[i] + spacing * static_cast<double>(c - 1);
    }
    bool in = !pad && inside(g);
    any = any || in;
    f[idx] = in ? inf : 0.0;
  }
  if (!any) return 0.0;
  std::vector<double> line, scratch, z;
  std::vector<int> v;
  for (int axis = 0; axis < d; ++axis) {
    const std::int64_t n = counts[axis], st = stride[axis];
    for (std::int64_t base = 0; base < total; ++base) {
      if ((base / st) % n != 0) continue;
      line.resize(n);
      for (std::int64_t q = 0; q < n; ++q) line[q] = f[base + q * st];
      edt_1d(line, scratch, v, z);
      for (std::int64_t q = 0; q < n; ++q) f[base + q * st] = line[q];
    }
  }
  double best = 0.0;
  for (double x : f) best = std::max(best, x);
  return std::sqrt(best) * spacing;
}

}  // namespace polylearn
