#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "polylearn/labelling.hpp"
#include "polylearn/partition.hpp"
#include "test_util.hpp"

using namespace polylearn;
using testutil::sample_simplex;

namespace {

// Random convex combination of a hull's vertices.
Point sample_hull(const VPolytope& h, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  Point w(h.vertices().size());
  for (int i = 0; i < w.size(); ++i) w[i] = e(rng);
  w /= w.sum();
  Point x = Point::Zero(h.dim());
  for (int i = 0; i < w.size(); ++i) x += w[i] * h.vertices()[i];
  return x;
}

EmpiricalLabelling random_labelling(int m, int n, int points, std::mt19937_64& rng) {
  Uepp u = random_uepp(m, n, rng());
  auto o = make_oracle(u, OracleKind::kLexicographic);
  EmpiricalLabelling l(m, n);
  for (int i = 0; i < points; ++i) {
    Point y = sample_simplex(m, rng);
    l.add_query(y, o.query(y));
  }
  return l;
}

// Max over lattice points of the simplex of the distance to the labelled union.
double max_gap(const EmpiricalLabelling& l, double spacing) {
  const int m = l.dim();
  int N = static_cast<int>(std::ceil(1.0 / spacing));
  double worst = 0.0;
  for (const auto& c : testutil::compositions(m + 1, N)) {
    Point x(m);
    for (int i = 0; i < m; ++i) x[i] = static_cast<double>(c[i + 1]) / N;
    double best = std::numeric_limits<double>::infinity();
    for (int k : l.classes()) best = std::min(best, distance_to_hull(x, l.hull(k)).dist);
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST_CASE("adding queries") {
  EmpiricalLabelling l(2, 3);
  l.add_query(make_point({0.1, 0.1}), 1);
  l.add_query(make_point({0.3, 0.1}), 1);
  CHECK(l.hull(1).vertices().size() == 2);
  CHECK(l.hull(1).affine_dim() == 1);
  l.add_query(make_point({0.3, 0.1}), 1);
  CHECK(l.hull(1).vertices().size() == 2);
  CHECK_THROWS_AS(l.add_query(make_point({0.1, 0.1}), 3), InvalidInput);
  CHECK_THROWS_AS(l.add_query(make_point({0.9, 0.3}), 0), InvalidInput);
  CHECK(l.classes() == std::vector<int>{1});
}

TEST_CASE("hulls built from a lexicographic oracle stay inside true cells") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 6; ++t) {
    int m = 2 + t % 2;
    Uepp u = random_uepp(m, 4, 300 + t);
    auto gt = uepp_cells(u);
    auto o = make_oracle(u, OracleKind::kLexicographic);
    EmpiricalLabelling l(m, 4);
    for (int i = 0; i < 200; ++i) {
      Point y = sample_simplex(m, rng);
      l.add_query(y, o.query(y));
    }
    for (int c : l.classes())
      for (int s = 0; s < 100; ++s) CHECK(contains(gt.cell_of(c).cell, sample_hull(l.hull(c), rng), 1e-9));
  }
}

TEST_CASE("merging labels") {
  EmpiricalLabelling l(1, 3);
  l.add_query(make_point({0.0}), 0);
  l.add_query(make_point({0.2}), 0);
  l.add_query(make_point({0.7}), 2);
  l.add_query(make_point({0.9}), 2);
  l.merge_labels(2, 0);
  CHECK(l.find(2) == 0);
  CHECK(l.hull(2).lower()[0] == 0.0);
  CHECK(l.hull(0).upper()[0] == 0.9);
  CHECK(l.members(2) == std::vector<int>{0, 2});
  auto before = l.class_points(0).size();
  l.merge_labels(0, 2);
  CHECK(l.class_points(0).size() == before);
  CHECK(l.merges().size() == 1);

  EmpiricalLabelling a(1, 3), b(1, 3);
  for (auto* x : {&a, &b}) {
    x->add_query(make_point({0.1}), 0);
    x->add_query(make_point({0.6}), 1);
  }
  a.merge_labels(0, 1);
  b.merge_labels(1, 0);
  CHECK(a.hull(0).lower() == b.hull(1).lower());
  CHECK(a.hull(0).upper() == b.hull(1).upper());
}

TEST_CASE("merged duplicate cells stay inside the shared cell") {
  std::mt19937_64 rng(22);
  Uepp u = random_uepp(2, 4, 44, {.duplicate_rows = 1});
  auto gt = uepp_cells(u);
  auto o = make_oracle(u, OracleKind::kAdversarial, TiePolicy::kRoundRobin);
  EmpiricalLabelling l(2, 4);
  for (int i = 0; i < 300; ++i) {
    Point y = sample_simplex(2, rng);
    l.add_query(y, o.query(y));
  }
  int dup_a = -1, dup_b = -1;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (u.A.row(i) == u.A.row(j) && u.b[i] == u.b[j]) dup_a = i, dup_b = j;
  REQUIRE(dup_a >= 0);
  l.merge_labels(dup_a, dup_b);
  for (int s = 0; s < 200; ++s) CHECK(contains(gt.cell_of(dup_a).cell, sample_hull(l.hull(dup_a), rng), 1e-9));
}

TEST_CASE("compaction keeps hulls") {
  std::mt19937_64 rng(23);
  auto l = random_labelling(2, 3, 300, rng);
  std::vector<VPolytope> before;
  for (int c : l.classes()) before.push_back(l.hull(c));
  l.compact();
  auto cls = l.classes();
  for (std::size_t i = 0; i < cls.size(); ++i) {
    CHECK(l.class_points(cls[i]).size() == before[i].vertices().size());
    CHECK(l.hull(cls[i]).vertices().size() == before[i].vertices().size());
  }
}

TEST_CASE("lattice verifier basics") {
  EmpiricalLabelling empty(2, 2);
  auto r = is_eps_close(empty, 0.1);
  CHECK_FALSE(r.is_close);
  CHECK(r.witness.has_value());

  // Every point of a fine barycentric grid labelled: close.
  EmpiricalLabelling full(2, 2);
  int N = 20;
  for (const auto& c : testutil::compositions(3, N))
    full.add_query(make_point({double(c[1]) / N, double(c[2]) / N}), (c[1] + c[2]) % 2);
  CHECK(is_eps_close(full, 0.1).is_close);

  EmpiricalLabelling one(3, 1);
  for (const auto& v : simplex_vertices(3)) one.add_query(v, 0);
  auto rep = is_eps_close(one, 0.2);
  CHECK(rep.is_close);
  CHECK(rep.checked_resolution == doctest::Approx(0.2 / std::sqrt(3.0)));

  EmpiricalLabelling zero(0, 2);
  CHECK_FALSE(is_eps_close(zero, 0.1).is_close);
  zero.add_query(Point::Zero(0), 1);
  CHECK(is_eps_close(zero, 0.1).is_close);
}

TEST_CASE("parallel and serial lattice verifiers agree") {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 20; ++t) {
    int m = 1 + t % 3;
    auto l = random_labelling(m, 3, 5 + 20 * (t % 4), rng);
    double eps = 0.05 + 0.05 * (t % 3);
    auto a = is_eps_close(l, eps), b = is_eps_close_serial(l, eps);
    CHECK(a.is_close == b.is_close);
    CHECK(a.witness_distance == b.witness_distance);
    if (a.witness) CHECK((*a.witness - *b.witness).norm() == 0.0);
  }
}

TEST_CASE("structured coverage agrees with the lattice verifier") {
  std::mt19937_64 rng(25);
  int structured_true = 0, structured_false = 0;
  for (int t = 0; t < 60; ++t) {
    int m = 1 + t % 3;
    auto l = random_labelling(m, 3, 4 + 15 * (t % 5), rng);
    double eps = m == 3 ? 0.2 : 0.1 + 0.1 * (t % 2);
    auto s = check_covered(l, eps);
    auto g = is_eps_close(l, eps);
    // structured close -> lattice close
    if (s.covered) CHECK(g.is_close);
    // lattice close at eps -> every point within eps -> structured close at about 2 eps
    if (g.is_close) CHECK(check_covered(l, 2.05 * eps).covered);
    if (!s.covered) {
      REQUIRE(s.witness.has_value());
      // In dimension <= 2 the witness is farther than eps/2 from all hulls, up to the polygon inset.
      double best = std::numeric_limits<double>::infinity();
      for (int c : l.classes()) best = std::min(best, distance_to_hull(*s.witness, l.hull(c)).dist);
      if (m <= 2) CHECK(best > eps / 2 * std::cos(3.14159265358979 / 32) - 1e-9);
    }
    (s.covered ? structured_true : structured_false)++;
  }
  CHECK(structured_true > 5);
  CHECK(structured_false > 5);
}

TEST_CASE("slab coverage versus the lattice verifier on slices") {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 40; ++t) {
    int m = 2 + t % 2;
    auto l = random_labelling(m, 3, 30 + 10 * (t % 4), rng);
    double x = u(rng), y = u(rng);
    if (x > y) std::swap(x, y);
    double eps = 0.15;
    bool s = is_slice_covered(l, x, y, eps);
    VPolytope region = slice(simplex_vpolytope(m), x, y);
    if (s) CHECK(is_eps_close(l, region, eps).is_close);
  }
}

TEST_CASE("slice coverage examples") {
  EmpiricalLabelling same(2, 2);
  for (double x : {0.2, 0.4}) {
    same.add_query(make_point({x, 0.0}), 0);
    same.add_query(make_point({x, 1 - x}), 0);
  }
  CHECK(is_slice_covered(same, 0.2, 0.4, 0.01));

  EmpiricalLabelling gap(2, 2);
  gap.add_query(make_point({0.2, 0.0}), 0);
  gap.add_query(make_point({0.2, 0.8}), 0);
  gap.add_query(make_point({0.7, 0.0}), 1);
  gap.add_query(make_point({0.7, 0.3}), 1);
  auto r = check_slab(gap, 0.2, 0.7, 0.1);
  CHECK_FALSE(r.covered);
  REQUIRE(r.witness.has_value());
  CHECK((*r.witness)[0] > 0.2);
  CHECK((*r.witness)[0] < 0.7);
}

TEST_CASE("exact endpoint sections cover slabs free of critical coordinates") {
  for (int seed = 0; seed < 10; ++seed) {
    Uepp u = random_uepp(2, 3, 2000 + seed);
    double eps = 0.1;
    double alpha = eps / (20 * 3 * std::pow(2.0, 2.5));
    auto cc = critical_coordinates(u, alpha);
    auto gt = uepp_cells(u);
    for (std::size_t t = 0; t + 1 < cc.size(); ++t) {
      double w = cc[t + 1] - cc[t];
      if (w < 1e-6 || cc[t + 1] >= 1) continue;
      double x = cc[t] + w / 4, y = cc[t + 1] - w / 4;
      EmpiricalLabelling l(2, 3);
      for (const auto& c : gt.cells)
        for (double s : {x, y}) {
          VPolytope sec = cross_section(c.cell, s);
          for (const auto& v : sec.vertices()) l.add_query(v, c.label);
        }
      CHECK(is_slice_covered(l, x, y, eps));
    }
  }
}

TEST_CASE("adding queries never breaks closeness") {
  std::mt19937_64 rng(27);
  for (int t = 0; t < 5; ++t) {
    Uepp u = random_uepp(2, 3, 700 + t);
    auto o = make_oracle(u, OracleKind::kLexicographic);
    EmpiricalLabelling l(2, 3);
    bool was = false;
    for (int i = 0; i < 120; ++i) {
      Point y = sample_simplex(2, rng);
      l.add_query(y, o.query(y));
      if (i % 10 != 9) continue;
      bool now = is_eps_close(l, 0.2).is_close;
      if (was) CHECK(now);
      was = now;
    }
  }
}

TEST_CASE("voronoi labels") {
  EmpiricalLabelling l(2, 3);
  l.add_query(make_point({0.0, 0.0}), 2);
  l.add_query(make_point({0.5, 0.0}), 2);
  l.add_query(make_point({0.0, 0.5}), 2);
  l.add_query(make_point({1.0, 0.0}), 0);
  CHECK(voronoi_labels(make_point({0.1, 0.1}), l) == std::vector<int>{2});

  EmpiricalLabelling line(1, 2);
  line.add_query(make_point({0.0}), 0);
  line.add_query(make_point({1.0}), 1);
  CHECK(voronoi_labels(make_point({0.5}), line) == std::vector<int>{0, 1});
  CHECK(voronoi_labels(make_point({0.45}), line, Norm::kL2, 0.2) == std::vector<int>{0, 1});
  CHECK(voronoi_labels(make_point({0.45}), line) == std::vector<int>{0});
  CHECK_THROWS_AS(voronoi_labels(make_point({0.5}), EmpiricalLabelling(1, 2)), InvalidInput);

  std::mt19937_64 rng(28);
  auto r = random_labelling(2, 4, 30, rng);
  for (int s = 0; s < 2000; ++s) CHECK_FALSE(voronoi_labels(sample_simplex(2, rng), r).empty());
}

TEST_CASE("parallel voronoi masks match the serial reference") {
  std::mt19937_64 rng(31);
  auto l = random_labelling(2, 5, 40, rng);
  std::vector<Point> xs;
  for (int s = 0; s < 500; ++s) xs.push_back(sample_simplex(2, rng));
  for (double slack : {0.0, 0.05}) {
    auto par = voronoi_masks(l, xs, Norm::kL2, slack);
    auto ser = voronoi_masks_serial(l, xs, Norm::kL2, slack);
    CHECK(par == ser);
    for (std::size_t i = 0; i < xs.size(); i += 50) {
      std::uint32_t want = 0;
      for (int lab : voronoi_labels(xs[i], l, Norm::kL2, slack)) want |= std::uint32_t{1} << lab;
      CHECK(par[i] == want);
    }
  }
}

TEST_CASE("voronoi regions are closed") {
  // Limits of points carrying a label keep it: approach the boundary of the
  // two-point Voronoi split in Delta^1 from the left.
  EmpiricalLabelling line(1, 2);
  line.add_query(make_point({0.1}), 0);
  line.add_query(make_point({0.7}), 1);
  for (int k = 1; k <= 30; ++k) {
    double x = 0.4 - std::pow(2.0, -k);
    CHECK(voronoi_labels(make_point({x}), line)[0] == 0);
  }
  auto at = voronoi_labels(make_point({0.4}), line);
  CHECK(std::count(at.begin(), at.end(), 0) == 1);
}

TEST_CASE("interior conflicts") {
  EmpiricalLabelling l(2, 3);
  l.add_query(make_point({0.0, 0.0}), 0);
  l.add_query(make_point({0.4, 0.0}), 0);
  l.add_query(make_point({0.0, 0.4}), 0);
  l.add_query(make_point({0.6, 0.0}), 1);
  l.add_query(make_point({0.9, 0.0}), 1);
  l.add_query(make_point({0.6, 0.3}), 1);
  CHECK_FALSE(interior_conflict(l).has_value());
  l.add_query(make_point({0.1, 0.1}), 2);
  auto c = interior_conflict(l);
  REQUIRE(c.has_value());
  CHECK(c->i == 0);
  CHECK(c->j == 2);
  l.merge_labels(c->i, c->j);
  CHECK_FALSE(interior_conflict(l).has_value());

  std::mt19937_64 rng(29);
  Uepp u = random_uepp(2, 3, 45, {.duplicate_rows = 1});
  auto o = make_oracle(u, OracleKind::kAdversarial, TiePolicy::kRoundRobin);
  EmpiricalLabelling a(2, 3);
  for (int i = 0; i < 200; ++i) {
    Point y = sample_simplex(2, rng);
    a.add_query(y, o.query(y));
  }
  int merges = 0;
  while (auto k = interior_conflict(a)) {
    a.merge_labels(k->i, k->j);
    ++merges;
  }
  CHECK(merges == 1);
}

TEST_CASE("thin unlabelled regions imply closeness") {
  std::mt19937_64 rng(30);
  int tested = 0;
  for (int t = 0; t < 30; ++t) {
    auto l = random_labelling(2, 3, 20 + 10 * t, rng);
    l.freeze();
    const double h = 0.005;
    double tau = grid_thickness(Point::Zero(2), Point::Ones(2), h, [&](const Point& x) {
      if (!in_simplex(x)) return false;
      for (int c : l.classes())
        if (contains(l.hull(c), x)) return false;
      return true;
    });
    double eps = tau + 2 * h;
    if (eps > 0.1) continue;
    ++tested;
    CHECK(max_gap(l, 0.01) <= 4 * 2 * eps);
  }
  CHECK(tested > 5);
}
