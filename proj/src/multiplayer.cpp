#include "polylearn/multiplayer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

namespace polylearn {

NormalFormGame::NormalFormGame(int players, int actions, std::vector<double> utilities)
    : n_(players), k_(actions), u_(std::move(utilities)) {
  if (n_ < 1 || k_ < 1) throw InvalidInput("game needs at least one player and one action");
  double p = std::pow(static_cast<double>(k_), n_);
  if (p > 1e8) throw InvalidInput("utility tensor too large");
  profiles_ = static_cast<std::size_t>(p);
  if (u_.size() != static_cast<std::size_t>(n_) * profiles_) throw InvalidInput("utility tensor has the wrong size");
  for (double v : u_)
    if (!(v >= -kEta && v <= 1 + kEta)) throw InvalidInput("utilities must lie in [0, 1]");
}

double NormalFormGame::utility(int player, const std::vector<int>& pure) const {
  if (player < 0 || player >= n_) throw InvalidInput("player index out of range");
  if (static_cast<int>(pure.size()) != n_) throw InvalidInput("pure profile has the wrong length");
  std::size_t idx = 0;
  for (int a : pure) {
    if (a < 0 || a >= k_) throw InvalidInput("action index out of range");
    idx = idx * k_ + a;
  }
  PayoffAudit::touch();
  return u_[player * profiles_ + idx];
}

Point pack_others(const Profile& x, int i) {
  if (x.empty()) return Point(0);
  const int d = static_cast<int>(x.front().size());
  Point p(d * (static_cast<int>(x.size()) - 1));
  int at = 0;
  for (int j = 0; j < static_cast<int>(x.size()); ++j) {
    if (j == i) continue;
    p.segment(at, d) = x[j];
    at += d;
  }
  return p;
}

Profile unpack(const Point& packed, int count, int actions) {
  const int d = actions - 1;
  if (packed.size() != count * d) throw InvalidInput("packed profile has the wrong dimension");
  Profile out;
  for (int j = 0; j < count; ++j) out.push_back(packed.segment(j * d, d));
  return out;
}

namespace {

Point full(const Point& reduced) {
  Point f(reduced.size() + 1);
  f[0] = 1.0 - reduced.sum();
  f.tail(reduced.size()) = reduced;
  return f;
}

void check_others(const NormalFormGame& g, int i, const Profile& others) {
  if (i < 0 || i >= g.players()) throw InvalidInput("player index out of range");
  if (static_cast<int>(others.size()) != g.players() - 1) throw InvalidInput("profile needs the other players");
  for (const auto& p : others) {
    if (p.size() != g.actions() - 1) throw InvalidInput("mixed strategy dimension mismatch");
    if (!in_simplex(p, kEta)) throw InvalidInput("mixed strategy outside the simplex");
  }
}

}  // namespace

Eigen::VectorXd pure_utilities(const NormalFormGame& g, int i, const Profile& others) {
  check_others(g, i, others);
  const int n = g.players(), k = g.actions();
  std::vector<Point> probs;
  for (const auto& p : others) probs.push_back(full(p));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(k);
  std::vector<int> pure(n, 0), rest(n - 1, 0);
  const auto& u = g.tensor();
  while (true) {
    double w = 1.0;
    for (int j = 0; j < n - 1; ++j) w *= probs[j][rest[j]];
    if (w != 0.0) {
      for (int j = 0, at = 0; j < n; ++j) pure[j] = j == i ? 0 : rest[at++];
      for (int r = 0; r < k; ++r) {
        pure[i] = r;
        std::size_t idx = 0;
        for (int a : pure) idx = idx * k + a;
        out[r] += w * u[i * g.profiles() + idx];
      }
    }
    int j = n - 2;
    while (j >= 0 && rest[j] == k - 1) rest[j--] = 0;
    if (j < 0) break;
    ++rest[j];
  }
  return out;
}

double expected_utility(const NormalFormGame& g, int i, int r, const Profile& others) {
  if (r < 0 || r >= g.actions()) throw InvalidInput("action index out of range");
  return pure_utilities(g, i, others)[r];
}

double best_value(const NormalFormGame& g, int i, const Profile& others) {
  return pure_utilities(g, i, others).maxCoeff();
}

std::vector<int> strong_best_responses(const NormalFormGame& g, int i, const Profile& others) {
  Eigen::VectorXd u = pure_utilities(g, i, others);
  double best = u.maxCoeff();
  std::vector<int> out;
  for (int r = 0; r < u.size(); ++r)
    if (u[r] >= best - kEta) out.push_back(r);
  return out;
}

Oracle multiplayer_br_oracle(const NormalFormGame& g, int i, OracleKind kind, TiePolicy policy, std::uint64_t seed,
                             std::optional<std::uint64_t> budget) {
  if (i < 0 || i >= g.players()) throw InvalidInput("player index out of range");
  const int n = g.players(), k = g.actions();
  auto truth = [g, i, n, k](const Point& y) {
    PayoffAudit::OracleScope scope;
    return strong_best_responses(g, i, unpack(y, n - 1, k));
  };
  const int dim = (n - 1) * (k - 1);
  // The oracle's simplex check would reject product points, so it sees a
  // scaled copy: every block lies in Delta^{k-1} and the packed point, divided
  // by n - 1, lies in Delta^{dim}.
  const double scale = std::max(1, n - 1);
  auto scaled = [truth, scale](const Point& y) { return truth(y * scale); };
  return Oracle(dim, k, scaled, kind, policy, seed, budget);
}

std::uint64_t lattice_count(int kappa, int d) { return binomial(kappa + d, d); }

NetSpec build_net(int players, int actions, double eps, std::uint64_t cap) {
  if (players < 2 || actions < 2) throw InvalidInput("net needs n >= 2 and k >= 2");
  if (!(eps > 0)) throw InvalidInput("eps must be positive");
  NetSpec net;
  net.players = players;
  net.actions = actions;
  net.eps = eps;
  net.eps_prime = eps / (players - 1);
  const int d = actions - 1;
  {
    double s = 2 * net.eps_prime / d;
    net.kappa = std::max(1, static_cast<int>(std::ceil(1.0 / s - 1e-9)));
    net.spacing = 1.0 / net.kappa;
    double per = static_cast<double>(lattice_count(net.kappa, d));
    if (std::pow(per, players - 1) > static_cast<double>(cap)) throw InvalidInput("net size beyond cap");
    std::vector<int> cur(d + 1, 0);
    auto rec = [&](auto&& self, int j, int left) -> void {
      if (j == d) {
        cur[j] = left;
        Point p(d);
        for (int t = 0; t < d; ++t) p[t] = static_cast<double>(cur[t + 1]) / net.kappa;
        net.simplex_points.push_back(p);
        return;
      }
      for (int a = 0; a <= left; ++a) {
        cur[j] = a;
        self(self, j + 1, left - a);
      }
    };
    rec(rec, 0, net.kappa);
  }
  double total = std::pow(static_cast<double>(net.simplex_points.size()), players - 1);
  if (total > static_cast<double>(cap)) throw InvalidInput("net size beyond cap");
  net.size = static_cast<std::uint64_t>(total);
  return net;
}

Point net_point(const NetSpec& net, std::uint64_t idx) {
  const int d = net.actions - 1, blocks = net.players - 1;
  const std::uint64_t base = net.simplex_points.size();
  Point p(d * blocks);
  for (int b = blocks - 1; b >= 0; --b) {
    p.segment(b * d, d) = net.simplex_points[idx % base];
    idx /= base;
  }
  return p;
}

PointLabelling::PointLabelling(int dim, int labels) : dim_(dim), points_(labels) {
  if (dim < 0 || labels < 1) throw InvalidInput("labelling needs dim >= 0 and labels >= 1");
}

void PointLabelling::add(const Point& x, int label) {
  if (label < 0 || label >= label_count()) throw InvalidInput("label out of range");
  if (x.size() != dim_) throw InvalidInput("point dimension mismatch");
  points_[label].push_back(x);
}

std::size_t PointLabelling::size() const {
  std::size_t s = 0;
  for (const auto& p : points_) s += p.size();
  return s;
}

double PointLabelling::distance(const Point& x, int label) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : points_.at(label)) best = std::min(best, (p - x).lpNorm<1>());
  return best;
}

std::vector<int> PointLabelling::voronoi(const Point& x, double slack) const {
  std::vector<double> d(points_.size());
  double best = std::numeric_limits<double>::infinity();
  for (int l = 0; l < label_count(); ++l) best = std::min(best, d[l] = distance(x, l));
  if (!std::isfinite(best)) throw InvalidInput("labelling is empty");
  std::vector<int> out;
  for (int l = 0; l < label_count(); ++l)
    if (d[l] <= best + slack + kEta) out.push_back(l);
  return out;
}

MultiplayerLabellings learn_multiplayer_labellings(std::vector<LabelOracle*> oracles, int players, int actions,
                                                   double eps, std::uint64_t cap) {
  if (static_cast<int>(oracles.size()) != players) throw InvalidInput("one oracle per player");
  MultiplayerLabellings out;
  out.net = build_net(players, actions, eps, cap);
  const int dim = (players - 1) * (actions - 1);
  const double scale = std::max(1, players - 1);
  for (int i = 0; i < players; ++i) {
    LabelOracle& o = *oracles[i];
    if (o.dim() != dim || o.label_count() != actions) throw InvalidInput("oracle does not match the game shape");
    PointLabelling l(dim, actions);
    for (std::uint64_t idx = 0; idx < out.net.size; ++idx) {
      Point p = net_point(out.net, idx);
      l.add(p, o.query(p / scale));
      ++out.queries;
    }
    out.players.push_back(std::move(l));
  }
  return out;
}

namespace {

using Mask = std::uint32_t;

struct Grid {
  std::vector<Point> points;
  std::vector<Mask> support;
  // Point indices per support mask, masks ordered by size then value.
  std::vector<std::pair<Mask, std::vector<std::size_t>>> by_support;
};

Grid simplex_grid(int actions, int N) {
  Grid g;
  std::vector<int> cur(actions, 0);
  auto rec = [&](auto&& self, int j, int left) -> void {
    if (j == actions - 1) {
      cur[j] = left;
      Point p(actions - 1);
      Mask s = 0;
      for (int t = 0; t < actions; ++t) {
        if (t > 0) p[t - 1] = static_cast<double>(cur[t]) / N;
        if (cur[t] > 0) s |= Mask{1} << t;
      }
      g.points.push_back(p);
      g.support.push_back(s);
      return;
    }
    for (int a = 0; a <= left; ++a) {
      cur[j] = a;
      self(self, j + 1, left - a);
    }
  };
  rec(rec, 0, N);
  std::vector<Mask> masks;
  for (Mask s : g.support)
    if (std::find(masks.begin(), masks.end(), s) == masks.end()) masks.push_back(s);
  std::sort(masks.begin(), masks.end(), [](Mask a, Mask b) {
    int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
    return pa < pb || (pa == pb && a < b);
  });
  for (Mask s : masks) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < g.points.size(); ++i)
      if (g.support[i] == s) idx.push_back(i);
    g.by_support.emplace_back(s, std::move(idx));
  }
  return g;
}

std::optional<Profile> search(const MultiplayerLabellings& l, int n, int k, int N, double sigma, std::uint64_t cap,
                              std::uint64_t& evaluated) {
  Grid grid = simplex_grid(k, N);
  const std::uint64_t G = grid.points.size();
  std::vector<std::unordered_map<std::uint64_t, Mask>> memo(n);
  std::vector<std::size_t> pick(n, 0);

  auto voronoi_mask = [&](int i) {
    std::uint64_t key = 0;
    for (int j = 0; j < n; ++j)
      if (j != i) key = key * G + pick[j];
    auto it = memo[i].find(key);
    if (it != memo[i].end()) return it->second;
    Profile x;
    for (int j = 0; j < n; ++j) x.push_back(grid.points[pick[j]]);
    Mask m = 0;
    for (int r : l.players[i].voronoi(pack_others(x, i), sigma)) m |= Mask{1} << r;
    memo[i].emplace(key, m);
    return m;
  };

  // Support tuples ordered by total size.
  const int S = static_cast<int>(grid.by_support.size());
  std::vector<std::vector<int>> tuples;
  std::vector<int> cur(n, 0);
  while (true) {
    tuples.push_back(cur);
    int j = n - 1;
    while (j >= 0 && cur[j] == S - 1) cur[j--] = 0;
    if (j < 0) break;
    ++cur[j];
  }
  auto weight = [&](const std::vector<int>& t) {
    int w = 0;
    for (int s : t) w += __builtin_popcount(grid.by_support[s].first);
    return w;
  };
  std::stable_sort(tuples.begin(), tuples.end(),
                   [&](const auto& a, const auto& b) { return weight(a) < weight(b); });

  for (const auto& t : tuples) {
    std::vector<std::size_t> at(n, 0);
    while (true) {
      for (int j = 0; j < n; ++j) pick[j] = grid.by_support[t[j]].second[at[j]];
      if (++evaluated > cap) throw SearchFailure("profile search beyond cap");
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) ok = (grid.support[pick[i]] & ~voronoi_mask(i)) == 0;
      if (ok) {
        Profile x;
        for (int j = 0; j < n; ++j) x.push_back(grid.points[pick[j]]);
        return x;
      }
      int j = n - 1;
      while (j >= 0 && at[j] + 1 == grid.by_support[t[j]].second.size()) at[j--] = 0;
      if (j < 0) break;
      ++at[j];
    }
  }
  return std::nullopt;
}

}  // namespace

Profile find_voronoi_fixed_point(const MultiplayerLabellings& l, const MultiplayerConfig& cfg) {
  const int n = l.net.players, k = l.net.actions;
  if (static_cast<int>(l.players.size()) != n) throw InvalidInput("one labelling per player");
  if (k > 30) throw InvalidInput("at most 30 actions");
  const double sigma = cfg.eps / 8;
  int N = static_cast<int>(std::ceil(8.0 / cfg.eps));
  std::uint64_t evaluated = 0;
  for (int level = 0; level <= cfg.refinements; ++level, N *= 2) {
    auto x = search(l, n, k, N, sigma, cfg.max_profiles, evaluated);
    if (x) return *x;
  }
  throw SearchFailure("fixed point not found at resolution");
}

MultiplayerCertificate solve_wsne_multiplayer(std::vector<LabelOracle*> oracles, int players, int actions,
                                              const MultiplayerConfig& cfg) {
  if (players < 2 || players > 3 || actions < 2 || actions > 3 || cfg.eps < 0.2)
    throw InvalidInput("multiplayer solver supports 2 <= n <= 3, 2 <= k <= 3, eps >= 0.2");
  MultiplayerLabellings l = learn_multiplayer_labellings(oracles, players, actions, cfg.eps * cfg.learn_fraction);
  MultiplayerCertificate c;
  c.eps = cfg.eps;
  c.x = find_voronoi_fixed_point(l, cfg);
  c.queries = l.queries;
  return c;
}

MultiplayerCertificate solve_wsne_multiplayer(const NormalFormGame& g, const MultiplayerConfig& cfg,
                                              TiePolicy policy) {
  const int n = g.players();
  std::vector<Oracle> oracles;
  for (int i = 0; i < n; ++i)
    oracles.push_back(multiplayer_br_oracle(g, i, OracleKind::kAdversarial, policy, cfg.seed + i));
  std::vector<LabelOracle*> ptrs;
  for (auto& o : oracles) ptrs.push_back(&o);
  MultiplayerCertificate found;
  {
    PayoffAudit::SolverScope scope;
    found = solve_wsne_multiplayer(ptrs, n, g.actions(), cfg);
  }
  MultiplayerCertificate c = verify_wsne_multiplayer(g, found.x, cfg.eps);
  c.queries = found.queries;
  return c;
}

MultiplayerCertificate verify_wsne_multiplayer(const NormalFormGame& g, const Profile& x, double eps) {
  const int n = g.players();
  if (static_cast<int>(x.size()) != n) throw InvalidInput("profile needs every player");
  MultiplayerCertificate c;
  c.x = x;
  c.eps = eps;
  c.valid = true;
  for (int i = 0; i < n; ++i) {
    Profile others;
    for (int j = 0; j < n; ++j)
      if (j != i) others.push_back(x[j]);
    if (x[i].size() != g.actions() - 1 || !in_simplex(x[i], kEta)) throw InvalidInput("invalid mixed strategy");
    Eigen::VectorXd u = pure_utilities(g, i, others);
    const double best = u.maxCoeff();
    Point f = full(x[i]);
    std::vector<int> sup;
    std::vector<double> reg;
    for (int r = 0; r < g.actions(); ++r) {
      if (f[r] <= kEta) continue;
      sup.push_back(r);
      reg.push_back(best - u[r]);
      c.valid = c.valid && best - u[r] <= eps + kEta;
    }
    c.supports.push_back(std::move(sup));
    c.regrets.push_back(std::move(reg));
  }
  return c;
}

NormalFormGame random_normal_form(int players, int actions, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::size_t size = static_cast<std::size_t>(players) * static_cast<std::size_t>(std::pow(actions, players));
  std::vector<double> u(size);
  for (auto& v : u) v = d(rng);
  return NormalFormGame(players, actions, std::move(u));
}

NormalFormGame three_player_pennies() {
  std::vector<double> u(3 * 8);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        int idx = a * 4 + b * 2 + c;
        u[0 * 8 + idx] = a == b;
        u[1 * 8 + idx] = b == c;
        u[2 * 8 + idx] = c != a;
      }
  return NormalFormGame(3, 2, std::move(u));
}

NormalFormGame from_bimatrix(const Matrix& A, const Matrix& B) {
  if (A.rows() != A.cols() || B.rows() != A.rows() || B.cols() != A.cols())
    throw InvalidInput("two-player normal form needs square payoff matrices of equal size");
  const int k = static_cast<int>(A.rows());
  std::vector<double> u(2 * k * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      u[a * k + b] = A(a, b);
      u[k * k + a * k + b] = B(a, b);
    }
  return NormalFormGame(2, k, std::move(u));
}

}  // namespace polylearn
