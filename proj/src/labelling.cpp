#include "polylearn/labelling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace polylearn {

EmpiricalLabelling::EmpiricalLabelling(int m, int n)
    : m_(m), n_(n), parent_(n), points_(n), raw_(n), hulls_(n) {
  if (m < 0 || n < 1) throw InvalidInput("labelling needs m >= 0 and n >= 1");
  for (int i = 0; i < n; ++i) parent_[i] = i;
}

void EmpiricalLabelling::add_query(const Point& x, int label) {
  if (label < 0 || label >= n_) throw InvalidInput("label out of range");
  if (x.size() != m_) throw InvalidInput("point dimension mismatch");
  if (!in_simplex(x)) throw InvalidInput("labelled point outside the simplex");
  int r = find(label);
  points_[r].push_back(x);
  raw_[r].push_back(label);
  hulls_[r].reset();
}

int EmpiricalLabelling::find(int label) const {
  if (label < 0 || label >= n_) throw InvalidInput("label out of range");
  return parent_[label];
}

void EmpiricalLabelling::merge_labels(int i, int j) {
  int ri = find(i), rj = find(j);
  if (ri == rj) return;
  int root = std::min(ri, rj), other = std::max(ri, rj);
  for (int& p : parent_)
    if (p == other) p = root;
  points_[root].insert(points_[root].end(), points_[other].begin(), points_[other].end());
  raw_[root].insert(raw_[root].end(), raw_[other].begin(), raw_[other].end());
  points_[other].clear();
  raw_[other].clear();
  hulls_[root].reset();
  hulls_[other].reset();
  merges_.emplace_back(i, j);
}

std::vector<int> EmpiricalLabelling::members(int label) const {
  int r = find(label);
  std::vector<int> out;
  for (int i = 0; i < n_; ++i)
    if (parent_[i] == r) out.push_back(i);
  return out;
}

std::vector<int> EmpiricalLabelling::classes() const {
  std::vector<int> out;
  for (int i = 0; i < n_; ++i)
    if (parent_[i] == i && !points_[i].empty()) out.push_back(i);
  return out;
}

std::size_t EmpiricalLabelling::point_count() const {
  std::size_t c = 0;
  for (const auto& p : points_) c += p.size();
  return c;
}

const VPolytope& EmpiricalLabelling::hull(int label) const {
  int r = find(label);
  if (!hulls_[r]) hulls_[r] = convex_hull(m_, points_[r]);
  return *hulls_[r];
}

void EmpiricalLabelling::compact() {
  for (int r : classes()) {
    const VPolytope& h = hull(r);
    std::vector<Point> pts;
    std::vector<int> raw;
    for (const auto& v : h.vertices()) {
      for (std::size_t k = 0; k < points_[r].size(); ++k) {
        if ((points_[r][k] - v).squaredNorm() == 0.0) {
          pts.push_back(points_[r][k]);
          raw.push_back(raw_[r][k]);
          break;
        }
      }
    }
    if (pts.size() != h.vertices().size()) continue;  // vertex not an input point; keep everything
    VPolytope keep = h;
    points_[r] = std::move(pts);
    raw_[r] = std::move(raw);
    hulls_[r] = std::move(keep);
  }
}

void EmpiricalLabelling::freeze() const {
  for (int r : classes()) hull(r);
}

// ---------------------------------------------------------------------------
// Lattice verifier

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double box_distance(const VPolytope& h, const Point& q) {
  double s = 0.0;
  for (int i = 0; i < q.size(); ++i) {
    double d = std::max({h.lower()[i] - q[i], q[i] - h.upper()[i], 0.0});
    s += d * d;
  }
  return std::sqrt(s);
}

// Distance from q to the union of hulls, or anything above r when that is certain.
double union_distance(const std::vector<const VPolytope*>& hulls, const Point& q, double r) {
  double best = kInf;
  for (const VPolytope* h : hulls) {
    if (box_distance(*h, q) > r) continue;
    if (h->full_dim() && h->facets().depth(q) >= 0.0) return 0.0;
    best = std::min(best, distance_to_hull(q, *h).dist);
    if (best <= r) return best;
  }
  return best;
}

CoverageReport lattice_check(const EmpiricalLabelling& l, const VPolytope& region, double eps, bool simplex_region,
                             bool parallel) {
  if (!(eps > 0)) throw InvalidInput("eps must be positive");
  CoverageReport rep;
  rep.eps = eps;
  const int d = l.dim();
  if (region.is_empty()) {
    rep.is_close = true;
    return rep;
  }
  if (region.dim() != d) throw InvalidInput("region dimension mismatch");
  l.freeze();
  std::vector<const VPolytope*> hulls;
  for (int c : l.classes()) hulls.push_back(&l.hull(c));
  const double r = eps / 2;
  if (d == 0) {
    rep.is_close = !hulls.empty();
    if (!rep.is_close) rep.witness = Point::Zero(0);
    rep.lattice_points = 1;
    return rep;
  }
  const double h = 2 * r / std::sqrt(static_cast<double>(d));
  rep.checked_resolution = h;
  std::vector<std::int64_t> counts(d);
  std::int64_t total = 1;
  for (int i = 0; i < d; ++i) {
    counts[i] = static_cast<std::int64_t>(std::ceil((region.upper()[i] - region.lower()[i]) / h)) + 1;
    total *= counts[i];
    if (total > 200'000'000) throw InvalidInput("lattice too fine for is_eps_close");
  }
  rep.lattice_points = static_cast<std::uint64_t>(total);
  const Point lo = region.lower();

  double worst = -1.0;
  std::int64_t worst_idx = -1;
  Point worst_q;

  auto visit = [&](std::int64_t idx, double& local_worst, std::int64_t& local_idx, Point& local_q) {
    Point g(d);
    std::int64_t rest = idx;
    for (int i = 0; i < d; ++i) {
      g[i] = lo[i] + h * static_cast<double>(rest % counts[i]);
      rest /= counts[i];
    }
    Point q;
    if (simplex_region) {
      if (in_simplex(g, 0.0)) {
        q = g;
      } else {
        q = project_onto_simplex(g);
        if ((q - g).norm() > r) return;
      }
    } else if (region.full_dim() && region.facets().depth(g) >= 0.0) {
      q = g;
    } else {
      auto pr = distance_to_hull(g, region);
      if (pr.dist > r) return;
      q = pr.witness;
    }
    double dist = union_distance(hulls, q, r);
    if (dist > r + kEta && (dist > local_worst || (dist == local_worst && idx < local_idx))) {
      local_worst = dist;
      local_idx = idx;
      local_q = q;
    }
  };

  if (parallel) {
#pragma omp parallel
    {
      double lw = -1.0;
      std::int64_t li = -1;
      Point lq;
#pragma omp for schedule(dynamic, 256) nowait
      for (std::int64_t idx = 0; idx < total; ++idx) visit(idx, lw, li, lq);
#pragma omp critical(polylearn_lattice)
      {
        if (li >= 0 && (lw > worst || (lw == worst && li < worst_idx))) {
          worst = lw;
          worst_idx = li;
          worst_q = lq;
        }
      }
    }
  } else {
    for (std::int64_t idx = 0; idx < total; ++idx) visit(idx, worst, worst_idx, worst_q);
  }
  rep.is_close = worst_idx < 0;
  if (!rep.is_close) {
    rep.witness = worst_q;
    rep.witness_distance = worst;
  }
  return rep;
}

}  // namespace

CoverageReport is_eps_close(const EmpiricalLabelling& l, const VPolytope& region, double eps) {
  return lattice_check(l, region, eps, false, true);
}
CoverageReport is_eps_close(const EmpiricalLabelling& l, double eps) {
  return lattice_check(l, simplex_vpolytope(l.dim()), eps, true, true);
}
CoverageReport is_eps_close_serial(const EmpiricalLabelling& l, const VPolytope& region, double eps) {
  return lattice_check(l, region, eps, false, false);
}
CoverageReport is_eps_close_serial(const EmpiricalLabelling& l, double eps) {
  return lattice_check(l, simplex_vpolytope(l.dim()), eps, true, false);
}

// ---------------------------------------------------------------------------
// Structured slab coverage

namespace {

using P2 = Eigen::Vector2d;
using Polygon = std::vector<P2>;  // convex, counter-clockwise

double cross(const P2& o, const P2& a, const P2& b) {
  return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

Polygon convex_ring(std::vector<P2> pts) {
  std::sort(pts.begin(), pts.end(), [](const P2& a, const P2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  if (pts.size() < 3) return pts;
  Polygon h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 1e-15) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i - 1]) <= 1e-15) --k;
    h[k++] = pts[i - 1];
  }
  h.resize(k - 1);
  return h;
}

// Part of p with n . x >= off.
Polygon clip(const Polygon& p, const P2& n, double off) {
  Polygon out;
  const std::size_t k = p.size();
  for (std::size_t i = 0; i < k; ++i) {
    const P2& a = p[i];
    const P2& b = p[(i + 1) % k];
    double sa = n.dot(a) - off, sb = n.dot(b) - off;
    if (sa >= 0) out.push_back(a);
    if ((sa >= 0) != (sb >= 0)) out.push_back(a + (b - a) * (sa / (sa - sb)));
  }
  return out;
}

double area(const Polygon& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const P2& a = p[i];
    const P2& b = p[(i + 1) % p.size()];
    s += a.x() * b.y() - a.y() * b.x();
  }
  return std::abs(s) / 2;
}

double perimeter(const Polygon& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (p[(i + 1) % p.size()] - p[i]).norm();
  return s;
}

bool thin(const Polygon& p) {
  if (p.size() < 3) return true;
  double per = perimeter(p);
  return per == 0.0 || 2 * area(p) / per < kEta;
}

P2 centroid(const Polygon& p) {
  P2 c = P2::Zero();
  for (const auto& q : p) c += q;
  return c / static_cast<double>(p.size());
}

constexpr int kOffsetSides = 32;

const Polygon& unit_ngon() {
  static const Polygon ring = [] {
    Polygon q;
    for (int k = 0; k < kOffsetSides; ++k) {
      double t = 2 * std::numbers::pi * k / kOffsetSides - std::numbers::pi / 2;
      q.emplace_back(std::cos(t), std::sin(t));
    }
    return q;
  }();
  return ring;
}

// Index of the lowest vertex, leftmost among ties.
std::size_t bottom(const Polygon& p) {
  std::size_t b = 0;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i].y() < p[b].y() || (p[i].y() == p[b].y() && p[i].x() < p[b].x())) b = i;
  return b;
}

// Minkowski sum of a convex counter-clockwise ring (any size >= 1) and the
// inscribed regular polygon of radius r.
Polygon offset_ring(const Polygon& h, double r) {
  const Polygon& q = unit_ngon();
  if (h.size() == 1) {
    Polygon out;
    for (const auto& v : q) out.push_back(h[0] + r * v);
    return out;
  }
  const std::size_t n = h.size(), m = q.size();
  const std::size_t i0 = bottom(h);
  std::size_t j0 = 0;  // q starts at angle -pi/2, its lowest vertex
  Polygon out;
  out.reserve(n + m);
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    const P2& a = h[(i0 + i) % n];
    const P2 b = r * q[(j0 + j) % m];
    out.push_back(a + b);
    P2 ea = h[(i0 + i + 1) % n] - a;
    P2 eb = r * q[(j0 + j + 1) % m] - b;
    if (i == n) {
      ++j;
    } else if (j == m) {
      ++i;
    } else {
      double c = ea.x() * eb.y() - ea.y() * eb.x();
      if (c > 0) {
        ++i;
      } else if (c < 0) {
        ++j;
      } else {
        ++i;
        ++j;
      }
    }
  }
  return convex_ring(std::move(out));
}

Polygon ring_of(const std::vector<Point>& pts) {
  std::vector<P2> p2;
  p2.reserve(pts.size());
  for (const auto& v : pts) p2.emplace_back(v[v.size() - 2], v[v.size() - 1]);
  return convex_ring(std::move(p2));
}

std::vector<Polygon> subtract(const std::vector<Polygon>& pieces, const Polygon& e) {
  std::vector<Polygon> out;
  for (const auto& piece : pieces) {
    Polygon rem = piece;
    for (std::size_t i = 0; i < e.size() && !rem.empty(); ++i) {
      const P2& a = e[i];
      const P2& b = e[(i + 1) % e.size()];
      P2 n(-(b - a).y(), (b - a).x());
      n.normalize();
      double off = n.dot(a);
      Polygon outside = clip(rem, -n, -off);
      if (!thin(outside)) out.push_back(std::move(outside));
      rem = clip(rem, n, off);
      if (thin(rem)) rem.clear();
    }
  }
  return out;
}

// Is {y in s * Delta^2 : a <= y_1 <= b} within r of the union of convex rings?
bool covered_2d(const std::vector<Polygon>& rings, double s, double a, double b, double r, Point& witness) {
  std::vector<Polygon> pieces{convex_ring({P2(a, 0), P2(b, 0), P2(b, s - b), P2(a, s - a)})};
  for (const auto& h : rings) {
    double lo = h.front().x(), hi = lo;
    for (const auto& v : h) {
      lo = std::min(lo, v.x());
      hi = std::max(hi, v.x());
    }
    if (hi < a - r || lo > b + r) continue;
    pieces = subtract(pieces, offset_ring(h, r));
    if (pieces.empty()) return true;
  }
  const Polygon* big = &pieces.front();
  for (const auto& p : pieces)
    if (area(p) > area(*big)) big = &p;
  P2 c = centroid(*big);
  witness = Point(2);
  witness << c.x(), c.y();
  return false;
}

VPolytope drop_first_section(const VPolytope& h, double c) {
  const int d = h.dim();
  if (h.is_empty() || h.lower()[0] > c + kEta || h.upper()[0] < c - kEta) return VPolytope::empty(d - 1);
  VPolytope cs = cross_section(h, c);
  std::vector<Point> pts;
  for (const auto& v : cs.vertices()) pts.push_back(v.tail(d - 1));
  return convex_hull(d - 1, pts);
}

Point lift(double c, const Point& w) {
  Point p(w.size() + 1);
  p[0] = c;
  p.tail(w.size()) = w;
  return p;
}

// Is {y in s * Delta^d : a <= y_1 <= b} within r of the union of hulls?
bool covered_rec(const std::vector<VPolytope>& hulls, int d, double s, double a, double b, double r,
                 Point& witness) {
  if (d == 0) {
    for (const auto& h : hulls)
      if (!h.is_empty()) return true;
    witness = Point::Zero(0);
    return false;
  }
  a = std::max(a, 0.0);
  b = std::min(b, s);
  if (a > b + kEta) return true;
  b = std::max(a, b);

  if (d == 1) {
    std::vector<std::pair<double, double>> iv;
    for (const auto& h : hulls)
      if (!h.is_empty()) iv.emplace_back(h.lower()[0] - r, h.upper()[0] + r);
    std::sort(iv.begin(), iv.end());
    double reach = a;
    for (const auto& [lo, hi] : iv) {
      if (lo > reach + kEta) break;
      reach = std::max(reach, hi);
      if (reach >= b) return true;
    }
    if (reach >= b - kEta) return true;
    double next = b;
    for (const auto& [lo, hi] : iv)
      if (lo > reach) next = std::min(next, lo);
    witness = Point::Constant(1, (reach + std::min(next, b)) / 2);
    return false;
  }

  if (b - a <= kEta) {
    std::vector<VPolytope> secs;
    for (const auto& h : hulls) secs.push_back(drop_first_section(h, a));
    Point w;
    if (covered_rec(secs, d - 1, s - a, 0.0, s - a, r, w)) return true;
    witness = lift(a, w);
    return false;
  }

  if (d == 2) {
    std::vector<Polygon> rings;
    for (const auto& h : hulls)
      if (!h.is_empty()) rings.push_back(ring_of(h.vertices()));
    return covered_2d(rings, s, a, b, r, witness);
  }

  // Planes at a and on the grid hZ inside (a, b]: every slab point has a plane
  // at most h below it whose section contains its translate, and
  // h^2 + (0.75 r)^2 <= r^2. The shared grid keeps the answer for a slab
  // consistent with the answers for its pieces.
  const double rs = 0.75 * r, h = 0.66 * r;
  std::vector<const VPolytope*> near;
  for (const auto& p : hulls)
    if (!p.is_empty() && p.upper()[0] >= a - r && p.lower()[0] <= b + r) near.push_back(&p);
  const double first = std::floor(a / h) + 1;
  const auto planes = static_cast<std::int64_t>(std::max(0.0, std::floor(b / h) - first + 1)) + 1;
  // Coarse-to-fine order finds uncovered planes early.
  std::int64_t top = 1;
  while (top * 2 < planes) top *= 2;
  std::vector<std::int64_t> order{0};
  for (std::int64_t stride = top; stride >= 1; stride /= 2)
    for (std::int64_t j = stride; j < planes; j += 2 * stride) order.push_back(j);
  for (std::int64_t j : order) {
    double c = j == 0 ? a : (first + static_cast<double>(j - 1)) * h;
    Point w;
    bool ok;
    if (d == 3) {
      std::vector<Polygon> rings;
      for (const VPolytope* p : near) {
        auto pts = cross_section_points(*p, c);
        if (!pts.empty()) rings.push_back(ring_of(pts));
      }
      ok = covered_2d(rings, s - c, 0.0, s - c, rs, w);
    } else {
      std::vector<VPolytope> secs;
      for (const VPolytope* p : near) {
        VPolytope sec = drop_first_section(*p, c);
        if (!sec.is_empty()) secs.push_back(std::move(sec));
      }
      ok = covered_rec(secs, d - 1, s - c, 0.0, s - c, rs, w);
    }
    if (!ok) {
      witness = lift(c, w);
      return false;
    }
  }
  return true;
}

}  // namespace

SlabCoverage check_slab(const EmpiricalLabelling& l, double a, double b, double eps) {
  if (!(eps > 0)) throw InvalidInput("eps must be positive");
  if (a > b) throw InvalidInput("slab needs a <= b");
  SlabCoverage out;
  std::vector<VPolytope> hulls;
  for (int c : l.classes()) hulls.push_back(l.hull(c));
  Point w;
  if (l.dim() == 0) {
    out.covered = covered_rec(hulls, 0, 1.0, 0.0, 0.0, eps / 2, w);
  } else {
    out.covered = covered_rec(hulls, l.dim(), 1.0, a, b, eps / 2, w);
  }
  if (!out.covered) out.witness = w;
  return out;
}

bool is_slice_covered(const EmpiricalLabelling& l, double x, double y, double eps) {
  if (x < 0 || y > 1 || x > y) throw InvalidInput("slice needs 0 <= x <= y <= 1");
  return check_slab(l, x, y, eps).covered;
}

SlabCoverage check_covered(const EmpiricalLabelling& l, double eps) { return check_slab(l, 0.0, 1.0, eps); }

// ---------------------------------------------------------------------------

std::vector<int> voronoi_labels(const Point& x, const EmpiricalLabelling& l, Norm norm, double slack) {
  auto cls = l.classes();
  if (cls.empty()) throw InvalidInput("voronoi labels need a non-empty labelling");
  std::vector<double> dist(cls.size());
  double best = kInf;
  for (std::size_t c = 0; c < cls.size(); ++c) {
    dist[c] = distance_to_hull(x, l.hull(cls[c]), norm).dist;
    best = std::min(best, dist[c]);
  }
  std::vector<int> out;
  for (std::size_t c = 0; c < cls.size(); ++c)
    if (dist[c] <= best + slack + kEta)
      for (int lab : l.members(cls[c])) out.push_back(lab);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::vector<std::uint32_t> masks(const EmpiricalLabelling& l, const std::vector<Point>& xs, Norm norm, double slack,
                                 bool parallel) {
  if (l.label_count() > 32) throw InvalidInput("voronoi masks hold at most 32 labels");
  l.freeze();
  std::vector<std::uint32_t> out(xs.size(), 0);
  auto one = [&](std::size_t i) {
    for (int lab : voronoi_labels(xs[i], l, norm, slack)) out[i] |= std::uint32_t{1} << lab;
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t i = 0; i < xs.size(); ++i) one(i);
  } else {
    for (std::size_t i = 0; i < xs.size(); ++i) one(i);
  }
  return out;
}

}  // namespace

std::vector<std::uint32_t> voronoi_masks(const EmpiricalLabelling& l, const std::vector<Point>& xs, Norm norm,
                                         double slack) {
  return masks(l, xs, norm, slack, true);
}

std::vector<std::uint32_t> voronoi_masks_serial(const EmpiricalLabelling& l, const std::vector<Point>& xs, Norm norm,
                                                double slack) {
  return masks(l, xs, norm, slack, false);
}

namespace {

// A shared vertex can show a spurious positive depth when nearby vertices make the facets ill-conditioned.
bool is_vertex_of(const Point& v, const VPolytope& h) {
  for (const auto& w : h.vertices())
    if ((v - w).lpNorm<Eigen::Infinity>() <= 1e-7) return true;
  return false;
}

}  // namespace

std::optional<Conflict> interior_conflict(const EmpiricalLabelling& l) {
  auto cls = l.classes();
  for (int i : cls) {
    const VPolytope& hi = l.hull(i);
    if (!hi.full_dim()) continue;
    for (int j : cls) {
      if (j == i) continue;
      const VPolytope& hj = l.hull(j);
      Point centroid = Point::Zero(l.dim());
      for (const auto& v : hj.vertices()) {
        if (hi.facets().depth(v) > kEta && !is_vertex_of(v, hi)) return Conflict{i, j, v};
        centroid += v;
      }
      centroid /= static_cast<double>(hj.vertices().size());
      if (hi.facets().depth(centroid) > kEta) return Conflict{i, j, centroid};
    }
  }
  return std::nullopt;
}

}  // namespace polylearn
