#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "polylearn/crgbs.hpp"
#include "test_util.hpp"

using namespace polylearn;

namespace {

bool sound(const Uepp& u, const EmpiricalLabelling& l) {
  for (int c : l.classes()) {
    const auto& pts = l.class_points(c);
    const auto& raw = l.class_raw_labels(c);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      auto ls = uepp_label_set(u, pts[k]);
      if (std::find(ls.begin(), ls.end(), raw[k]) == ls.end()) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("face dimension and accuracy") {
  CHECK(face_dim(1) == 0);
  CHECK(face_dim(2) == 1);
  CHECK(face_dim(3) == 3);
  CHECK(crgbs_sub_eps(3, 2, 0.15) == doctest::Approx(0.45 / (400.0 * std::sqrt(2.0) * 32.0)));
  CHECK(crgbs_query_bound(3, 2, 0.15) == doctest::Approx(6 * cdgbs_query_bound(1, 2, crgbs_sub_eps(3, 2, 0.15))));
}

TEST_CASE("assembly") {
  // Identity face.
  FaceRun whole{Face{{0, 1, 2}, 2}, AffineMap(Matrix::Identity(2, 2), Point::Zero(2)), EmpiricalLabelling(2, 2), 0};
  whole.labelling.add_query(make_point({0.1, 0.1}), 1);
  whole.labelling.add_query(make_point({0.5, 0.2}), 1);
  auto id = assemble_from_faces(2, 2, {whole});
  CHECK(id.classes() == std::vector<int>{1});
  CHECK(id.hull(1).vertices().size() == 2);

  // Two opposite edges of Delta^2 labelled 1: the edge x2 = 0 and the hypotenuse.
  auto faces = enumerate_k_faces(2, 1);
  std::vector<FaceRun> runs;
  for (auto& [f, fwd] : faces) {
    if (f.vertex_subset != std::vector<int>{0, 1} && f.vertex_subset != std::vector<int>{1, 2}) continue;
    FaceRun r{f, fwd.inverse(), EmpiricalLabelling(1, 2), 0};
    r.labelling.add_query(make_point({0.0}), 1);
    r.labelling.add_query(make_point({1.0}), 1);
    runs.push_back(std::move(r));
  }
  auto two = assemble_from_faces(2, 2, runs);
  CHECK(contains(two.hull(1), make_point({0.5, 0.4})));
  CHECK(two.hull(1).vertices().size() == 3);

  FaceRun bad{Face{{0, 1}, 1}, AffineMap(Matrix::Identity(1, 1), Point::Zero(1)), EmpiricalLabelling(1, 2), 0};
  CHECK_THROWS_AS(assemble_from_faces(2, 2, {bad}), InvalidInput);
}

TEST_CASE("single-label partitions") {
  Uepp u = random_uepp(4, 1, 3);
  auto o = make_oracle(u, OracleKind::kLexicographic);
  auto r = cr_gbs({4, 1, 0.1}, o);
  CHECK(r.stats.faces == 5);
  CHECK(r.stats.queries == 5);
  CHECK(is_eps_close(r.labelling, 0.1).is_close);
}

TEST_CASE("two labels in three and four dimensions") {
  for (std::uint64_t s = 0; s < 4; ++s) {
    int m = 3 + static_cast<int>(s % 2);
    Uepp u = random_uepp(m, 2, 40 + s);
    auto o = make_oracle(u, OracleKind::kLexicographic);
    CrConfig cfg{m, 2, 0.15};
    auto r = cr_gbs(cfg, o);
    CAPTURE(s);
    CHECK(r.stats.faces == static_cast<int>(binomial(m + 1, 2)));
    CHECK(r.stats.lex_conflicts == 0);
    CHECK(static_cast<double>(r.stats.queries) <= crgbs_query_bound(m, 2, cfg.eps));
    CHECK(r.stats.queries == o.log().count());
    CHECK(sound(u, r.labelling));
    CHECK(check_covered(r.labelling, cfg.eps).covered);
    CHECK(is_eps_close(r.labelling, cfg.eps).is_close);
    // Every simplex vertex is labelled.
    for (int v = 0; v <= m; ++v) {
      Point e = Point::Zero(m);
      if (v > 0) e[v - 1] = 1.0;
      bool found = false;
      for (int c : r.labelling.classes())
        for (const auto& p : r.labelling.class_points(c)) found |= (p - e).norm() == 0.0;
      CHECK(found);
    }
  }
}

TEST_CASE("gamma interiors receive their own label") {
  const int m = 3, n = 2;
  const double eps = 0.15;
  const double gamma = 3 * eps / (40.0 * n * n * std::pow(m + 1.0, 2.5));
  Uepp u = random_uepp(m, n, 77);
  auto o = make_oracle(u, OracleKind::kLexicographic);
  auto r = cr_gbs({m, n, eps}, o);
  auto gt = uepp_cells(u);
  std::mt19937_64 rng(5);
  int checked = 0;
  for (const auto& cell : gt.cells) {
    if (cell.cell.affine_dim() < m) continue;
    std::vector<int> simplex_rows;
    for (int i = 0; i <= m; ++i) simplex_rows.push_back(i);
    HPolytope inner = gamma_interior(cell.halfspaces, simplex_rows, gamma);
    for (int t = 0; t < 300; ++t) {
      Point y = testutil::sample_simplex(m, rng);
      if (!inner.contains(y)) continue;
      ++checked;
      CHECK(contains(r.labelling.hull(cell.label), y, 1e-9));
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("adversarial runs merge duplicates") {
  int merged = 0;
  for (std::uint64_t s = 0; s < 4; ++s) {
    Uepp u = random_uepp(3, 3, 500 + s, {1, 0});
    auto o = make_oracle(u, OracleKind::kAdversarial, TiePolicy::kRoundRobin);
    CrConfig cfg{3, 3, 0.2, OracleKind::kAdversarial, s};
    auto r = cr_gbs(cfg, o);
    CHECK(r.stats.fell_back);
    CHECK(r.stats.merges <= 2);
    CHECK(!interior_conflict(r.labelling));
    CHECK(check_covered(r.labelling, cfg.eps).covered);
    merged += r.stats.merges > 0;
  }
  Uepp u = random_uepp(3, 2, 9);
  auto o = make_oracle(u, OracleKind::kAdversarial, TiePolicy::kRoundRobin);
  auto r = cr_gbs({3, 2, 0.15, OracleKind::kAdversarial}, o);
  CHECK(!r.stats.fell_back);
  CHECK(r.stats.merges <= 1);
  CHECK(check_covered(r.labelling, 0.15).covered);
  CHECK(merged > 0);
}

TEST_CASE("fallback below the face dimension") {
  Uepp u = random_uepp(2, 3, 4);
  auto o = make_oracle(u, OracleKind::kLexicographic);
  auto r = cr_gbs({2, 3, 0.1}, o);
  CHECK(r.stats.fell_back);
  CHECK(is_eps_close(r.labelling, 0.1).is_close);
}
