#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "polylearn/bimatrix.hpp"
#include "polylearn/cdgbs.hpp"
#include "polylearn/crgbs.hpp"
#include "polylearn/io.hpp"
#include "polylearn/multiplayer.hpp"

using namespace polylearn;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kFailedCheck = 1, kInvalid = 2, kBudget = 3, kSearch = 4 };

struct Options {
  std::string kind = "uepp";
  std::string in, out, manifest, from;
  std::string algo = "cdgbs", oracle = "lex", policy = "seeded", family = "lbgame";
  int m = 2, n = 3, players = 0, actions = 2, duplicates = 0, refinements = 1, seeds = 5;
  double eps = 0.1, x = 0.5, y = 0.5;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> budget;
  std::vector<double> eps_list;
};

const std::map<std::string, TiePolicy> kPolicies{{"seeded", TiePolicy::kSeeded},
                                                 {"roundrobin", TiePolicy::kRoundRobin},
                                                 {"maxindex", TiePolicy::kMaxIndex},
                                                 {"antilearner", TiePolicy::kAntiLearner}};

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void emit(const Options& o, const Json& j) {
  std::string text = dump(j);
  if (o.out.empty())
    std::cout << text;
  else
    write_file_atomic(o.out, text);
}

int cmd_gen(const Options& o) {
  Json j;
  if (o.kind == "uepp") {
    RandomUeppOptions opt;
    opt.duplicate_rows = o.duplicates;
    j = to_json(random_uepp(o.m, o.n, o.seed, opt));
  } else if (o.kind == "bimatrix") {
    j = to_json(o.from.empty() ? random_game(o.m, o.n, o.seed) : bimatrix_from_json(read_json_file(o.from)));
  } else if (o.kind == "lbgame") {
    j = to_json(lower_bound_game(o.x, o.y));
  } else if (o.kind == "normal") {
    j = to_json(o.from.empty() ? random_normal_form(o.players ? o.players : 3, o.actions, o.seed)
                               : normal_form_from_json(read_json_file(o.from)));
  } else if (o.kind == "pennies") {
    j = to_json(three_player_pennies());
  } else {
    throw InvalidInput("unknown kind " + o.kind);
  }
  emit(o, j);
  std::cerr << "digest " << fnv1a_hex(dump(j)) << "\n";
  return kOk;
}

Json config_json(const Options& o) {
  Json c{{"algo", o.algo}, {"oracle", o.oracle}, {"policy", o.policy}, {"eps", o.eps}, {"seed", o.seed}};
  c["budget"] = o.budget ? Json(*o.budget) : Json(nullptr);
  if (!o.in.empty()) c["in"] = o.in;
  return c;
}

int cmd_learn(const Options& o) {
  if (o.algo != "cdgbs" && o.algo != "crgbs") throw InvalidInput("--algo must be cdgbs or crgbs");
  if (o.oracle != "lex" && o.oracle != "adv") throw InvalidInput("--oracle must be lex or adv");
  std::string text = dump(read_json_file(o.in));
  Uepp u = uepp_from_json(Json::parse(text));
  const bool adv = o.oracle == "adv";
  const OracleKind kind = adv ? OracleKind::kAdversarial : OracleKind::kLexicographic;
  Oracle q = make_oracle(u, kind, kPolicies.at(o.policy), o.seed, o.budget);
  auto t0 = std::chrono::steady_clock::now();
  Json manifest{{"command", "learn"}, {"version", kVersion}, {"config", config_json(o)},
                {"instance_digest", fnv1a_hex(text)}};
  EmpiricalLabelling l;
  if (o.algo == "cdgbs") {
    GbsConfig cfg{u.m, u.n, o.eps, kind, o.seed};
    GbsResult r = adv ? cd_gbs_adversarial(cfg, q) : cd_gbs(cfg, q);
    l = std::move(r.labelling);
    manifest["queries"] = r.stats.queries;
    manifest["uncovered_per_level"] = r.stats.uncovered_per_level;
    manifest["section_calls"] = r.stats.section_calls;
    manifest["fix_calls"] = r.stats.fix_calls;
    manifest["merges"] = r.stats.merges;
    manifest["early_exit"] = r.stats.early_exit;
  } else {
    CrResult r = cr_gbs({u.m, u.n, o.eps, kind, o.seed}, q);
    l = std::move(r.labelling);
    manifest["queries"] = r.stats.queries;
    manifest["merges"] = r.stats.merges;
    manifest["fell_back"] = r.stats.fell_back;
    manifest["lex_conflicts"] = r.stats.lex_conflicts;
    Json faces = Json::array();
    if (!r.stats.fell_back) {
      auto all = enumerate_k_faces(u.m, face_dim(u.n));
      for (std::size_t i = 0; i < r.stats.face_queries.size() && i < all.size(); ++i)
        faces.push_back({{"vertices", all[i].first.vertex_subset}, {"queries", r.stats.face_queries[i]}});
    }
    manifest["faces"] = faces;
  }
  CoverageReport rep = is_eps_close(l, o.eps);
  manifest["wall_ms"] = ms_since(t0);
  manifest["coverage"] = to_json(rep);
  manifest["label_merges"] = l.merges().size();
  if (o.out.empty()) {
    std::cout << dump(to_json(l));
  } else {
    write_file_atomic(o.out, dump(to_json(l)));
  }
  std::string mpath = !o.manifest.empty() ? o.manifest : (o.out.empty() ? "" : o.out + ".manifest.json");
  if (mpath.empty())
    std::cerr << dump(manifest);
  else
    write_file_atomic(mpath, dump(manifest));
  std::cerr << "queries " << manifest["queries"] << " close " << (rep.is_close ? "yes" : "no") << "\n";
  return rep.is_close ? kOk : kFailedCheck;
}

int cmd_solve(const Options& o) {
  Json game = read_json_file(o.in);
  const TiePolicy policy = kPolicies.at(o.policy);
  auto t0 = std::chrono::steady_clock::now();
  Json cert;
  bool valid = false;
  if (game.contains("A")) {
    if (o.players && o.players != 2) throw InvalidInput("instance is a two-player game");
    BimatrixGame g = bimatrix_from_json(game);
    Oracle row = br_oracle(g, Side::kRow, OracleKind::kAdversarial, policy, o.seed, o.budget);
    Oracle col = br_oracle(g, Side::kColumn, OracleKind::kAdversarial, policy, o.seed + 1, o.budget);
    WsneConfig cfg;
    cfg.eps = o.eps;
    cfg.seed = o.seed;
    cfg.refinements = o.refinements;
    PayoffAudit::reset();
    WsneCertificate found;
    {
      PayoffAudit::SolverScope scope;
      found = solve_wsne(row, col, cfg);
    }
    WsneCertificate c = verify_wsne(g, found.u, found.v, o.eps);
    c.row_queries = found.row_queries;
    c.col_queries = found.col_queries;
    cert = to_json(c);
    valid = c.valid;
  } else {
    NormalFormGame g = normal_form_from_json(game);
    if (o.players && o.players != g.players()) throw InvalidInput("--players does not match the instance");
    std::vector<Oracle> oracles;
    for (int i = 0; i < g.players(); ++i)
      oracles.push_back(multiplayer_br_oracle(g, i, OracleKind::kAdversarial, policy, o.seed + i, o.budget));
    std::vector<LabelOracle*> ptrs;
    for (auto& q : oracles) ptrs.push_back(&q);
    MultiplayerConfig cfg;
    cfg.eps = o.eps;
    cfg.seed = o.seed;
    cfg.refinements = o.refinements;
    PayoffAudit::reset();
    MultiplayerCertificate found;
    {
      PayoffAudit::SolverScope scope;
      found = solve_wsne_multiplayer(ptrs, g.players(), g.actions(), cfg);
    }
    MultiplayerCertificate c = verify_wsne_multiplayer(g, found.x, o.eps);
    c.queries = found.queries;
    cert = to_json(c);
    valid = c.valid;
  }
  cert["audit_violations"] = PayoffAudit::violations();
  cert["wall_ms"] = ms_since(t0);
  cert["version"] = kVersion;
  cert["config"] = config_json(o);
  emit(o, cert);
  return valid && PayoffAudit::violations() == 0 ? kOk : kFailedCheck;
}

struct Row {
  std::string family;
  int m = 0, n = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t queries = 0;
  double wall_ms = 0.0;
  bool verified = false;
  bool ok = false;
};

void run_row(Row& r, TiePolicy policy) {
  auto t0 = std::chrono::steady_clock::now();
  if (r.family == "lbgame" || r.family == "bimatrix") {
    BimatrixGame g = [&] {
      if (r.family == "bimatrix") return random_game(r.m, r.n, r.seed);
      std::mt19937_64 rng(r.seed);
      std::uniform_real_distribution<double> d(0.05, 0.95);
      double x = d(rng), y = d(rng);
      return lower_bound_game(x, y);
    }();
    WsneConfig cfg;
    cfg.eps = r.eps;
    cfg.seed = r.seed;
    WsneCertificate c = solve_wsne(g, cfg, policy);
    r.queries = c.row_queries + c.col_queries;
    r.verified = c.valid;
  } else if (r.family == "uepp1d" || r.family == "uepp2d" || r.family == "uepp") {
    Uepp u = random_uepp(r.m, r.n, r.seed);
    Oracle q = make_oracle(u, OracleKind::kLexicographic, policy, r.seed);
    GbsResult res = cd_gbs({r.m, r.n, r.eps}, q);
    r.queries = res.stats.queries;
    r.verified = is_eps_close(res.labelling, r.eps).is_close;
  } else if (r.family == "multiplayer") {
    NormalFormGame g = random_normal_form(r.m, r.n, r.seed);
    MultiplayerCertificate c = solve_wsne_multiplayer(g, {r.eps, r.seed}, policy);
    r.queries = c.queries;
    r.verified = c.valid;
  } else {
    throw InvalidInput("unknown family " + r.family);
  }
  r.wall_ms = ms_since(t0);
  r.ok = true;
}

int cmd_bench(const Options& o) {
  const std::map<std::string, std::pair<int, int>> fixed{{"lbgame", {2, 2}}, {"uepp1d", {1, o.n}}, {"uepp2d", {2, o.n}}};
  std::vector<std::string> known{"lbgame", "uepp1d", "uepp2d", "uepp", "bimatrix", "multiplayer"};
  if (std::find(known.begin(), known.end(), o.family) == known.end()) throw InvalidInput("unknown family " + o.family);
  int m = o.m, n = o.n;
  if (auto it = fixed.find(o.family); it != fixed.end()) std::tie(m, n) = it->second;
  std::vector<Row> rows;
  for (double e : o.eps_list)
    for (int s = 0; s < o.seeds; ++s) rows.push_back({o.family, m, n, e, o.seed + s});
  const TiePolicy policy = kPolicies.at(o.policy);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < rows.size(); ++i) {
    try {
      run_row(rows[i], policy);
    } catch (const Error& e) {
#pragma omp critical
      std::cerr << "row " << i << " failed: " << e.what() << "\n";
    }
  }
  std::ostringstream csv;
  csv << "family,m,n,eps,seed,queries,wall_ms,verified\n";
  int ok = 0;
  for (const auto& r : rows) {
    ok += r.ok;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
    csv << r.family << ',' << r.m << ',' << r.n << ',' << r.eps << ',' << r.seed << ',' << r.queries << ',' << buf
        << ',' << (r.verified ? "true" : "false") << '\n';
  }
  if (o.out.empty())
    std::cout << csv.str();
  else
    write_file_atomic(o.out, csv.str());
  return rows.empty() || ok > 0 ? kOk : kFailedCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Query-efficient polytope partition learning and best-response equilibrium search"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options o;
  std::uint64_t budget = 0;

  auto common = [&](CLI::App* c) {
    c->add_option("--eps", o.eps, "Target accuracy")->check(CLI::PositiveNumber);
    c->add_option("--seed", o.seed, "Random seed");
    c->add_option("--policy", o.policy, "Adversarial tie policy")
        ->check(CLI::IsMember({"seeded", "roundrobin", "maxindex", "antilearner"}));
    c->add_option("--budget", budget, "Query budget per oracle");
    c->add_option("--out", o.out, "Output path (stdout when omitted)");
  };

  auto* gen = app.add_subcommand("gen", "Write an instance");
  gen->add_option("--kind", o.kind, "uepp, bimatrix, lbgame, normal or pennies")
      ->check(CLI::IsMember({"uepp", "bimatrix", "lbgame", "normal", "pennies"}));
  gen->add_option("--m", o.m, "UEPP dimension or bimatrix rows");
  gen->add_option("--n", o.n, "UEPP labels or bimatrix columns");
  gen->add_option("--players", o.players, "Players of a normal form game");
  gen->add_option("--actions", o.actions, "Actions per player of a normal form game");
  gen->add_option("--x", o.x, "Lower-bound game parameter x");
  gen->add_option("--y", o.y, "Lower-bound game parameter y");
  gen->add_option("--duplicates", o.duplicates, "Duplicate winning rows in a UEPP");
  gen->add_option("--from", o.from, "Validate and canonicalize a game file");
  gen->add_option("--seed", o.seed, "Random seed");
  gen->add_option("--out", o.out, "Output path (stdout when omitted)");

  auto* learn = app.add_subcommand("learn", "Learn an eps-close labelling of a UEPP");
  learn->add_option("--in", o.in, "UEPP instance")->required();
  learn->add_option("--algo", o.algo, "cdgbs or crgbs")->check(CLI::IsMember({"cdgbs", "crgbs"}));
  learn->add_option("--oracle", o.oracle, "lex or adv")->check(CLI::IsMember({"lex", "adv"}));
  learn->add_option("--manifest", o.manifest, "Run manifest path (default <out>.manifest.json)");
  common(learn);

  auto* solve = app.add_subcommand("solve", "Find an eps-WSNE from best-response queries");
  solve->add_option("--in", o.in, "Game instance")->required();
  solve->add_option("--players", o.players, "Expected number of players");
  solve->add_option("--refinements", o.refinements, "Grid refinements before giving up");
  common(solve);

  auto* bench = app.add_subcommand("bench", "Query-count sweep as CSV");
  bench->add_option("--family", o.family, "lbgame, uepp1d, uepp2d, uepp, bimatrix or multiplayer");
  bench->add_option("--eps", o.eps_list, "Comma-separated accuracies")->delimiter(',');
  bench->add_option("--seeds", o.seeds, "Seeds per accuracy, starting at --seed");
  bench->add_option("--seed", o.seed, "First seed");
  bench->add_option("--m", o.m, "Dimension, rows or players");
  bench->add_option("--n", o.n, "Labels, columns or actions");
  bench->add_option("--policy", o.policy, "Adversarial tie policy")
      ->check(CLI::IsMember({"seeded", "roundrobin", "maxindex", "antilearner"}));
  bench->add_option("--out", o.out, "CSV path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }
  if (learn->count_all() + solve->count_all() > 0 && (learn->count("--budget") || solve->count("--budget")))
    o.budget = budget;

  try {
    if (*gen) return cmd_gen(o);
    if (*learn) return cmd_learn(o);
    if (*solve) return cmd_solve(o);
    if (*bench) return cmd_bench(o);
  } catch (const BudgetExhausted& e) {
    std::cerr << "error: query budget exhausted\n";
    return kBudget;
  } catch (const SearchFailure& e) {
    std::cerr << "error: " << e.what() << "; retry with more --refinements or a larger --eps\n";
    return kSearch;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailedCheck;
  }
  return kInvalid;
}
