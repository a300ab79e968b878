#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "polylearn/cdgbs.hpp"
#include "polylearn/io.hpp"

using namespace polylearn;

TEST_CASE("UEPP round trip") {
  Uepp u = random_uepp(2, 3, 5);
  Json j = to_json(u);
  CHECK(j.at("m") == 2);
  CHECK(j.at("A").size() == 3);
  Uepp v = uepp_from_json(j);
  CHECK(v.m == u.m);
  CHECK((v.A - u.A).norm() == 0.0);
  CHECK((v.b - u.b).norm() == 0.0);
  CHECK(dump(to_json(v)) == dump(j));
  Json bad = j;
  bad["n"] = 4;
  CHECK_THROWS_AS(uepp_from_json(bad), InvalidInput);
  CHECK_THROWS_AS(uepp_from_json(Json{{"m", 1}}), InvalidInput);
}

TEST_CASE("game round trips") {
  BimatrixGame g = random_game(3, 2, 9);
  BimatrixGame h = bimatrix_from_json(to_json(g));
  CHECK((h.A() - g.A()).norm() == 0.0);
  CHECK((h.B() - g.B()).norm() == 0.0);
  Json out_of_range{{"A", {{1.5, 0.0}}}, {"B", {{0.0, 0.0}}}};
  CHECK_THROWS_AS(bimatrix_from_json(out_of_range), InvalidInput);
  NormalFormGame t = random_normal_form(3, 2, 4);
  NormalFormGame s = normal_form_from_json(to_json(t));
  CHECK(s.tensor() == t.tensor());
  CHECK_THROWS_AS(normal_form_from_json(Json{{"n", 2}, {"k", 2}, {"u", {0.5}}}), InvalidInput);
}

TEST_CASE("labelling round trip keeps raw labels and merges") {
  Uepp u = random_uepp(2, 3, 302, {1, 0});
  auto o = make_oracle(u, OracleKind::kAdversarial, TiePolicy::kRoundRobin);
  auto r = cd_gbs_adversarial({2, 3, 0.1, OracleKind::kAdversarial}, o);
  Json j = to_json(r.labelling);
  EmpiricalLabelling back = labelling_from_json(j);
  CHECK(back.point_count() == r.labelling.point_count());
  REQUIRE(!r.labelling.merges().empty());
  CHECK(back.merges() == r.labelling.merges());
  CHECK(back.classes() == r.labelling.classes());
  CHECK(dump(to_json(back)) == dump(j));
  CHECK(is_eps_close(back, 0.1).is_close);
}

TEST_CASE("certificates") {
  BimatrixGame g = lower_bound_game(0.5, 0.5);
  auto c = verify_wsne(g, make_point({0.5}), make_point({0.5}), 0.1);
  Json j = to_json(c);
  CHECK(j.at("valid") == true);
  CHECK(j.at("profile").size() == 2);
  CHECK(j.at("profile")[0].size() == 2);
  auto mc = verify_wsne_multiplayer(three_player_pennies(), Profile(3, make_point({0.5})), 0.0);
  Json k = to_json(mc);
  CHECK(k.at("profile").size() == 3);
  CHECK(k.at("valid") == true);
}

TEST_CASE("digests and atomic writes") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  auto dir = std::filesystem::temp_directory_path() / "polylearn_io_test";
  std::filesystem::create_directories(dir);
  auto path = (dir / "x.json").string();
  write_file_atomic(path, "{\"a\": 1}\n");
  CHECK(read_json_file(path).at("a") == 1);
  CHECK(!std::filesystem::exists(path + ".tmp"));
  CHECK_THROWS_AS(write_file_atomic((dir / "missing" / "x.json").string(), "{}"), InvalidInput);
  CHECK_THROWS_AS(read_json_file((dir / "missing.json").string()), InvalidInput);
  std::filesystem::remove_all(dir);
}
