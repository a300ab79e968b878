#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "polylearn/geometry.hpp"
#include "polylearn/lp.hpp"
#include "test_util.hpp"

using namespace polylearn;
using testutil::sample_simplex;

namespace {

// Brute-force extreme point test: not in the hull of the remaining points.
bool is_extreme(const std::vector<Point>& pts, std::size_t i) {
  std::vector<Point> others;
  for (std::size_t j = 0; j < pts.size(); ++j)
    if (j != i && (pts[j] - pts[i]).norm() > 1e-12) others.push_back(pts[j]);
  if (others.empty()) return true;
  return project_onto_points(pts[i], others).dist > 1e-7;
}

bool same_set(std::vector<Point> a, std::vector<Point> b) {
  if (a.size() != b.size()) return false;
  for (const auto& p : a) {
    bool found = false;
    for (const auto& q : b) found = found || (p - q).norm() < 1e-12;
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("lp solves a textbook problem") {
  // maximize 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
  LinearProgram lp;
  lp.A = Matrix(3, 2);
  lp.A << 1, 0, 0, 2, 3, 2;
  lp.b = make_point({4, 12, 18});
  lp.c = make_point({3, 5});
  auto r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::kOptimal);
  CHECK(r.value == doctest::Approx(36));
  CHECK(r.x[0] == doctest::Approx(2));
  CHECK(r.x[1] == doctest::Approx(6));
}

TEST_CASE("lp detects infeasible and unbounded problems") {
  LinearProgram lp;
  lp.A = Matrix(2, 1);
  lp.A << 1, -1;
  lp.b = make_point({1, -2});
  lp.c = make_point({1});
  CHECK(solve_lp(lp).status == LpStatus::kInfeasible);
  LinearProgram u;
  u.A = Matrix(1, 1);
  u.A << -1;
  u.b = make_point({0});
  u.c = make_point({1});
  CHECK(solve_lp(u).status == LpStatus::kUnbounded);
}

TEST_CASE("chebyshev of the triangle equals its inradius") {
  auto ball = chebyshev(simplex_hpolytope(2));
  // inradius = area / semiperimeter of the right triangle with legs 1.
  double inradius = 0.5 / ((2.0 + std::sqrt(2.0)) / 2.0);
  CHECK(ball.radius == doctest::Approx(inradius).epsilon(1e-9));
  CHECK(ball.radius == doctest::Approx(0.292893).epsilon(1e-5));
  CHECK(ball.center[0] == doctest::Approx(inradius));
  CHECK(ball.center[1] == doctest::Approx(inradius));
}

TEST_CASE("chebyshev of a segment is zero and unbounded input errors") {
  HPolytope seg(2);
  seg.add_row(make_point({0, 1}), 0.5);
  seg.add_row(make_point({0, -1}), -0.5);
  seg.add_row(make_point({1, 0}), 0.0);
  seg.add_row(make_point({-1, 0}), -1.0);
  CHECK(chebyshev(seg).radius == doctest::Approx(0.0));
  HPolytope half(2);
  half.add_row(make_point({1, 0}), 0.0);
  CHECK_THROWS_AS(chebyshev(half), GeometryError);
}

TEST_CASE("chebyshev matches a grid max-min-distance oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 12; ++trial) {
    int m = 2 + trial % 2;
    HPolytope p = simplex_hpolytope(m);
    for (int r = 0; r < 2; ++r) {
      Point n = testutil::sample_box(m, -1, 1, rng);
      Point c = sample_simplex(m, rng);
      p.add_row(n, n.dot(c) - 0.05);
    }
    auto ball = chebyshev(p);
    const int N = m == 2 ? 200 : 50;
    double h = 1.0 / N, best = 0.0;
    std::vector<int> idx(m, 0);
    while (true) {
      Point x(m);
      for (int i = 0; i < m; ++i) x[i] = idx[i] * h;
      best = std::max(best, p.depth(x));
      int i = 0;
      while (i < m && ++idx[i] > N) idx[i++] = 0;
      if (i == m) break;
    }
    CHECK(ball.radius >= best - 1e-9);
    CHECK(ball.radius <= best + 2 * h * std::sqrt(m));
  }
}

TEST_CASE("simplex constants") {
  for (int m = 1; m <= 6; ++m) {
    CHECK(chebyshev(simplex_hpolytope(m)).radius >= 1.0 / (m + std::sqrt(m)) - 1e-6);
    if (m >= 2) CHECK(diameter(simplex_vpolytope(m)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }
  CHECK(diameter(convex_hull(2, {make_point({0.3, 0.3})})) == 0.0);
  CHECK(diameter(convex_hull(1, {make_point({0}), make_point({1})})) == doctest::Approx(1.0));
  CHECK_THROWS(diameter(VPolytope::empty(2)));
}

TEST_CASE("distance to hull examples") {
  auto tri = simplex_vpolytope(2);
  auto pr = distance_to_hull(make_point({1, 1}), tri);
  CHECK(pr.dist == doctest::Approx(std::sqrt(2.0) / 2));
  CHECK(pr.witness[0] == doctest::Approx(0.5));
  CHECK(pr.witness[1] == doctest::Approx(0.5));
  CHECK(distance_to_hull(make_point({0.2, 0.2}), tri).dist == 0.0);
  CHECK(std::isinf(distance_to_hull(make_point({0.2, 0.2}), VPolytope::empty(2)).dist));
  // l1: projection of (1,1) onto the triangle costs 1 in l1.
  CHECK(distance_to_hull(make_point({1, 1}), tri, Norm::kL1).dist == doctest::Approx(1.0));
}

TEST_CASE("distance to hull matches a barycentric grid minimizer") {
  std::mt19937_64 rng(5);
  const int N = 16;
  for (int trial = 0; trial < 10; ++trial) {
    int nv = 3 + trial % 4;
    std::vector<Point> V;
    for (int i = 0; i < nv; ++i) V.push_back(testutil::sample_box(3, 0, 1, rng));
    Point x = testutil::sample_box(3, -0.5, 1.5, rng);
    auto pr = project_onto_points(x, V);
    double grid_min = 1e9, diam = 0;
    for (const auto& a : V)
      for (const auto& b : V) diam = std::max(diam, (a - b).norm());
    for (const auto& w : testutil::compositions(nv, N)) {
      Point q = Point::Zero(3);
      for (int i = 0; i < nv; ++i) q += (double(w[i]) / N) * V[i];
      grid_min = std::min(grid_min, (q - x).norm());
    }
    CHECK(pr.dist <= grid_min + 1e-9);
    CHECK(grid_min <= pr.dist + diam * nv / double(N));
    CHECK((pr.witness - x).norm() == doctest::Approx(pr.dist).epsilon(1e-9));
  }
}

TEST_CASE("distance to hull is 1-Lipschitz") {
  std::mt19937_64 rng(9);
  auto tri = convex_hull(3, {make_point({0, 0, 0}), make_point({1, 0, 0}), make_point({0, 1, 0}),
                             make_point({0, 0, 1}), make_point({0.5, 0.5, 0.5})});
  for (int i = 0; i < 200; ++i) {
    Point a = testutil::sample_box(3, -1, 2, rng), b = testutil::sample_box(3, -1, 2, rng);
    double da = distance_to_hull(a, tri).dist, db = distance_to_hull(b, tri).dist;
    CHECK(std::abs(da - db) <= (a - b).norm() + 1e-9);
  }
}

TEST_CASE("convex hull canonicalization") {
  auto seg = convex_hull(2, {make_point({0, 0}), make_point({1, 0}), make_point({0.5, 0})});
  CHECK(seg.vertices().size() == 2);
  CHECK(seg.affine_dim() == 1);
  auto tri = convex_hull(2, {make_point({0, 0}), make_point({1, 0}), make_point({0, 1}),
                             make_point({1.0 / 3, 1.0 / 3})});
  CHECK(tri.vertices().size() == 3);
  CHECK(convex_hull(2, {}).is_empty());

  std::mt19937_64 rng(3);
  std::vector<Point> pts;
  for (int i = 0; i < 20; ++i) pts.push_back(sample_simplex(2, rng));
  auto h = convex_hull(2, pts);
  for (const auto& p : pts) CHECK(distance_to_hull(p, h).dist <= kEta);
  auto hh = convex_hull(2, h.vertices());
  CHECK(same_set(h.vertices(), hh.vertices()));
  std::vector<Point> shuffled = pts;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  CHECK(same_set(convex_hull(2, shuffled).vertices(), h.vertices()));
}

TEST_CASE("higher-dimensional hulls agree with brute-force extreme points") {
  std::mt19937_64 rng(21);
  for (int d = 3; d <= 5; ++d) {
    for (int trial = 0; trial < 6; ++trial) {
      std::vector<Point> pts;
      int n = 12 + 10 * trial;
      for (int i = 0; i < n; ++i) pts.push_back(testutil::sample_box(d, 0, 1, rng));
      auto h = convex_hull(d, pts);
      std::vector<Point> brute;
      for (std::size_t i = 0; i < pts.size(); ++i)
        if (is_extreme(pts, i)) brute.push_back(pts[i]);
      CHECK(same_set(h.vertices(), brute));
      for (const auto& p : pts) CHECK(h.facets().depth(p) >= -1e-9);
    }
  }
}

TEST_CASE("hulls of points on parallel planes") {
  // Layered point sets as produced by section-wise learning.
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Point> pts;
    for (int layer = 0; layer < 8; ++layer) {
      double t = 0.1 * layer + 0.05;
      for (int i = 0; i < 15; ++i) {
        Point q = sample_simplex(2, rng) * (1 - t);
        pts.push_back(make_point({t, q[0], q[1]}));
      }
      pts.push_back(make_point({t, 0, 0}));
      pts.push_back(make_point({t, (1 - t) / 2, 0}));
      pts.push_back(make_point({t, 1 - t, 0}));
    }
    auto h = convex_hull(3, pts);
    for (const auto& p : pts) CHECK(h.facets().depth(p) >= -1e-8);
    for (const auto& v : h.vertices()) {
      std::size_t idx = 0;
      while ((pts[idx] - v).norm() > 0) ++idx;
      CHECK(is_extreme(pts, idx));
    }
  }
}

TEST_CASE("lower-dimensional hull in higher ambient dimension") {
  std::vector<Point> pts = {make_point({0, 0, 0.5}), make_point({1, 0, 0.5}), make_point({0, 1, 0.5}),
                            make_point({0.2, 0.2, 0.5}), make_point({1, 1, 0.5})};
  auto h = convex_hull(3, pts);
  CHECK(h.affine_dim() == 2);
  CHECK(h.vertices().size() == 4);
  CHECK(!h.full_dim());
  CHECK(contains(h, make_point({0.5, 0.5, 0.5})));
  CHECK(!contains(h, make_point({0.5, 0.5, 0.6})));
}

TEST_CASE("cross-sections and slices") {
  auto tri = simplex_vpolytope(2);
  auto s = cross_section(tri, 0.5);
  REQUIRE(s.vertices().size() == 2);
  CHECK(contains(s, make_point({0.5, 0.0})));
  CHECK(contains(s, make_point({0.5, 0.5})));
  CHECK(!contains(s, make_point({0.5, 0.51})));
  auto left = convex_hull(2, {make_point({0, 0}), make_point({0.2, 0}), make_point({0, 0.2})});
  CHECK(cross_section(left, 0.5).is_empty());
  CHECK_THROWS(slice(tri, 0.6, 0.5));
  auto sl = slice(tri, 0.25, 0.5);
  CHECK(sl.vertices().size() == 4);
  CHECK(contains(sl, make_point({0.3, 0.6})));
  CHECK(!contains(sl, make_point({0.2, 0.1})));
}

TEST_CASE("perfect fleshing: Conv of end sections equals the slice") {
  std::mt19937_64 rng(17);
  int tested = 0;
  while (tested < 10) {
    std::vector<Point> pts;
    for (int i = 0; i < 6; ++i) pts.push_back(testutil::sample_box(3, 0, 1, rng));
    auto p = convex_hull(3, pts);
    std::vector<double> xs;
    for (const auto& v : p.vertices()) xs.push_back(v[0]);
    std::sort(xs.begin(), xs.end());
    std::size_t gap = 1 + rng() % (xs.size() - 1);
    double a = xs[gap - 1], b = xs[gap];
    if (b - a < 0.05) continue;
    double x = a + (b - a) * 0.2, y = a + (b - a) * 0.7;
    auto px = cross_section(p, x), py = cross_section(p, y);
    std::vector<Point> both = px.vertices();
    both.insert(both.end(), py.vertices().begin(), py.vertices().end());
    auto conv = convex_hull(3, both);
    auto sl = slice(p, x, y);
    for (int s = 0; s < 200; ++s) {
      Point q = testutil::sample_box(3, 0, 1, rng);
      q[0] = x + (y - x) * std::uniform_real_distribution<double>(0, 1)(rng);
      CHECK(contains(conv, q, 1e-9) == contains(sl, q, 1e-9));
    }
    ++tested;
  }
}

TEST_CASE("section map") {
  auto f0 = section_map(2, 0.0);
  CHECK(f0(make_point({0.0, 0.3}))[0] == doctest::Approx(0.3));
  auto f = section_map(2, 0.5);
  auto img = f(make_point({0.5, 0.25}));
  REQUIRE(img.size() == 1);
  CHECK(img[0] == doctest::Approx(0.5));
  CHECK_THROWS(section_map(2, 1.0));
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    double x = std::uniform_real_distribution<double>(0, 0.95)(rng);
    auto g = section_map(3, x);
    Point w = sample_simplex(2, rng);
    Point v = g.inverse()(w);
    CHECK(v[0] == doctest::Approx(x));
    CHECK(in_simplex(v));
    CHECK((g.inverse()(g(v)) - v).norm() < 1e-12);
  }
}

TEST_CASE("lambda embedding") {
  auto phi = lambda_embed(2);
  CHECK((phi(make_point({0, 0})) - make_point({1, 0, 0})).norm() < 1e-15);
  CHECK((phi(make_point({1, 0})) - make_point({0, 1, 0})).norm() < 1e-15);
  auto phi3 = lambda_embed(3);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    Point a = sample_simplex(3, rng), b = sample_simplex(3, rng);
    CHECK((phi3(a) - phi3(b)).norm() <= std::sqrt(4.0) * (a - b).norm() + 1e-12);
  }
}

TEST_CASE("k-faces of the simplex") {
  auto faces = enumerate_k_faces(4, 1);
  int pairs = 0;
  for (int i = 0; i <= 4; ++i)
    for (int j = i + 1; j <= 4; ++j) ++pairs;
  CHECK(static_cast<int>(faces.size()) == pairs);
  auto whole = enumerate_k_faces(2, 2);
  REQUIRE(whole.size() == 1);
  CHECK((whole[0].second.matrix() - Matrix::Identity(2, 2)).norm() == 0.0);
  CHECK_THROWS(enumerate_k_faces(2, 3));
  for (int k = 0; k <= 3; ++k) {
    for (const auto& [face, phi] : enumerate_k_faces(3, k)) {
      CHECK(static_cast<int>(face.vertex_subset.size()) == k + 1);
      for (int j = 0; j <= k; ++j) {
        Point img = phi(simplex_vertex(3, face.vertex_subset[j]));
        CHECK((img - simplex_vertex(k, j)).norm() < 1e-12);
        CHECK((phi.inverse()(simplex_vertex(k, j)) - simplex_vertex(3, face.vertex_subset[j])).norm() < 1e-12);
      }
    }
  }
}

TEST_CASE("gamma interior") {
  auto tri = simplex_hpolytope(2);
  auto same = gamma_interior(tri, {}, 0.0);
  for (int r = 0; r < tri.size(); ++r) CHECK(same.offset(r) == doctest::Approx(tri.offset(r)));
  HPolytope sq(2);
  sq.add_row(make_point({1, 0}), 0);
  sq.add_row(make_point({-1, 0}), -1);
  sq.add_row(make_point({0, 1}), 0);
  sq.add_row(make_point({0, -1}), -1);
  auto inner = enumerate_vertices(gamma_interior(sq, {}, 0.25));
  CHECK(inner.vertices().size() == 4);
  for (const auto& v : inner.vertices()) {
    CHECK((std::abs(v[0] - 0.25) < 1e-12 || std::abs(v[0] - 0.75) < 1e-12));
    CHECK((std::abs(v[1] - 0.25) < 1e-12 || std::abs(v[1] - 0.75) < 1e-12));
  }
}

TEST_CASE("vertex enumeration of the simplex") {
  for (int m = 1; m <= 4; ++m) {
    auto v = enumerate_vertices(simplex_hpolytope(m));
    CHECK(static_cast<int>(v.vertices().size()) == m + 1);
  }
}

TEST_CASE("projection onto the simplex") {
  std::mt19937_64 rng(1);
  auto tri = simplex_vpolytope(3);
  for (int i = 0; i < 100; ++i) {
    Point x = testutil::sample_box(3, -1, 2, rng);
    Point p = project_onto_simplex(x);
    CHECK(in_simplex(p));
    CHECK((p - x).norm() == doctest::Approx(distance_to_hull(x, tri).dist).epsilon(1e-9));
  }
}

TEST_CASE("grid thickness") {
  auto square = [](const Point& x) { return x.minCoeff() >= 0.2 && x.maxCoeff() <= 0.8; };
  CHECK(grid_thickness(Point::Zero(2), Point::Ones(2), 0.01, square) == doctest::Approx(0.3).epsilon(0.05));
  auto tri = [](const Point& x) { return in_simplex(x, 0.0); };
  double inr = 1.0 / (2.0 + std::sqrt(2.0));
  CHECK(std::abs(grid_thickness(Point::Zero(2), Point::Ones(2), 0.005, tri) - inr) < 0.01);
  // L-shape: two 0.4-wide bars; thickness is that of a bar, not more.
  auto ell = [](const Point& x) {
    bool bar1 = x[0] >= 0 && x[0] <= 0.4 && x[1] >= 0 && x[1] <= 1;
    bool bar2 = x[1] >= 0 && x[1] <= 0.4 && x[0] >= 0 && x[0] <= 1;
    return bar1 || bar2;
  };
  double t = grid_thickness(Point::Zero(2), Point::Ones(2), 0.01, ell);
  CHECK(t >= 0.2 - 0.02);
  CHECK(t <= 0.4 * std::sqrt(2.0) / (1 + std::sqrt(2.0)) * 1.2 + 0.02);
  CHECK(grid_thickness(Point::Zero(3), Point::Ones(3), 0.05, [](const Point&) { return false; }) == 0.0);
}
