#include "polylearn/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace polylearn {

namespace {

template <typename F>
auto parse(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed ") + what + " JSON: " + e.what());
  }
}

}  // namespace

Json to_json(const Point& x) { return std::vector<double>(x.data(), x.data() + x.size()); }

Point point_from_json(const Json& j) {
  return parse("point", [&] {
    auto v = j.get<std::vector<double>>();
    return Point(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  });
}

Json to_json(const Matrix& a) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) rows.push_back(to_json(Point(a.row(r).transpose())));
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  return parse("matrix", [&] {
    auto rows = j.get<std::vector<std::vector<double>>>();
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    Matrix a(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) throw InvalidInput("ragged matrix");
      for (std::size_t c = 0; c < cols; ++c) a(r, c) = rows[r][c];
    }
    return a;
  });
}

Json to_json(const VPolytope& p) {
  Json v = Json::array();
  for (const auto& x : p.vertices()) v.push_back(to_json(x));
  return v;
}

Json to_json(const HPolytope& p) {
  Json a = Json::array(), b = Json::array();
  for (int r = 0; r < p.size(); ++r) {
    a.push_back(to_json(p.normal(r)));
    b.push_back(p.offset(r));
  }
  return Json{{"normals", a}, {"offsets", b}};
}

Json to_json(const Uepp& u) {
  return Json{{"m", u.m}, {"n", u.n}, {"A", to_json(u.A)}, {"b", to_json(Point(u.b))}};
}

Uepp uepp_from_json(const Json& j) {
  Uepp u = parse("UEPP", [&] {
    Uepp v;
    v.m = j.at("m").get<int>();
    v.n = j.at("n").get<int>();
    v.b = point_from_json(j.at("b"));
    v.A = v.n > 0 && v.m == 0 ? Matrix::Zero(v.n, 0) : matrix_from_json(j.at("A"));
    return v;
  });
  if (u.m < 0 || u.n < 1) throw InvalidInput("UEPP needs m >= 0 and n >= 1");
  if (u.A.rows() != u.n || u.A.cols() != u.m || u.b.size() != u.n) throw InvalidInput("UEPP shape mismatch");
  return u;
}

Json to_json(const BimatrixGame& g) { return Json{{"A", to_json(g.A())}, {"B", to_json(g.B())}}; }

BimatrixGame bimatrix_from_json(const Json& j) {
  return BimatrixGame(parse("game", [&] { return matrix_from_json(j.at("A")); }),
                      parse("game", [&] { return matrix_from_json(j.at("B")); }));
}

Json to_json(const NormalFormGame& g) { return Json{{"n", g.players()}, {"k", g.actions()}, {"u", g.tensor()}}; }

NormalFormGame normal_form_from_json(const Json& j) {
  return parse("tensor", [&] {
    return NormalFormGame(j.at("n").get<int>(), j.at("k").get<int>(), j.at("u").get<std::vector<double>>());
  });
}

Json to_json(const EmpiricalLabelling& l) {
  std::vector<Json> by_raw(l.label_count(), Json::array());
  for (int c : l.classes()) {
    const auto& pts = l.class_points(c);
    const auto& raw = l.class_raw_labels(c);
    for (std::size_t k = 0; k < pts.size(); ++k) by_raw[raw[k]].push_back(to_json(pts[k]));
  }
  Json points = Json::object();
  for (int r = 0; r < l.label_count(); ++r)
    if (!by_raw[r].empty()) points[std::to_string(r)] = by_raw[r];
  Json merges = Json::array();
  for (auto [i, j] : l.merges()) merges.push_back({i, j});
  return Json{{"m", l.dim()}, {"n", l.label_count()}, {"points", points}, {"merges", merges}};
}

EmpiricalLabelling labelling_from_json(const Json& j) {
  return parse("labelling", [&] {
    const int m = j.at("m").get<int>(), n = j.at("n").get<int>();
    EmpiricalLabelling l(m, n);
    for (const auto& [key, pts] : j.at("points").items()) {
      int r = std::stoi(key);
      for (const auto& p : pts) l.add_query(point_from_json(p), r);
    }
    if (j.contains("merges"))
      for (const auto& mj : j.at("merges")) l.merge_labels(mj.at(0).get<int>(), mj.at(1).get<int>());
    return l;
  });
}

Json to_json(const CoverageReport& r) {
  Json j{{"eps", r.eps},
         {"is_close", r.is_close},
         {"witness_distance", r.witness_distance},
         {"checked_resolution", r.checked_resolution},
         {"lattice_points", r.lattice_points}};
  j["witness"] = r.witness ? to_json(*r.witness) : Json(nullptr);
  return j;
}

Json to_json(const WsneCertificate& c) {
  return Json{{"eps", c.eps},
              {"profile", {to_json(full_mix(c.u)), to_json(full_mix(c.v))}},
              {"supports", {c.row_support, c.col_support}},
              {"regrets", {c.row_regrets, c.col_regrets}},
              {"queries", {c.row_queries, c.col_queries}},
              {"valid", c.valid}};
}

Json to_json(const MultiplayerCertificate& c) {
  Json profile = Json::array();
  for (const auto& x : c.x) profile.push_back(to_json(full_mix(x)));
  return Json{{"eps", c.eps},         {"profile", profile},   {"supports", c.supports},
              {"regrets", c.regrets}, {"queries", c.queries}, {"valid", c.valid}};
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("malformed JSON in " + path + ": " + e.what());
  }
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write " + path);
    out << content;
    out.flush();
    if (!out) throw InvalidInput("cannot write " + path);
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw InvalidInput("cannot write " + path);
  }
}

}  // namespace polylearn
