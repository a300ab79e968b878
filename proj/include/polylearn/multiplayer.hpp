#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "polylearn/bimatrix.hpp"
#include "polylearn/core.hpp"
#include "polylearn/partition.hpp"

namespace polylearn {

// n players with k actions each; utilities flat row-major by (player, profile),
// where profile index = sum_j a_j k^{n-1-j}.
class NormalFormGame {
 public:
  NormalFormGame(int players, int actions, std::vector<double> utilities);
  int players() const { return n_; }
  int actions() const { return k_; }
  std::size_t profiles() const { return profiles_; }
  // Payoff reads are audited like BimatrixGame::A().
  double utility(int player, const std::vector<int>& pure) const;
  const std::vector<double>& tensor() const {
    PayoffAudit::touch();
    return u_;
  }

 private:
  int n_, k_;
  std::size_t profiles_;
  std::vector<double> u_;
};

// One reduced mixed strategy per player (a point of Delta^{k-1}).
using Profile = std::vector<Point>;

// Others' strategies, skipping player i, concatenated into one point.
Point pack_others(const Profile& x, int i);
Profile unpack(const Point& packed, int count, int actions);

double expected_utility(const NormalFormGame& g, int i, int r, const Profile& others);
Eigen::VectorXd pure_utilities(const NormalFormGame& g, int i, const Profile& others);
double best_value(const NormalFormGame& g, int i, const Profile& others);
std::vector<int> strong_best_responses(const NormalFormGame& g, int i, const Profile& others);

// Best responses of player i over packed profiles of the others.
Oracle multiplayer_br_oracle(const NormalFormGame& g, int i, OracleKind kind, TiePolicy policy = TiePolicy::kSeeded,
                             std::uint64_t seed = 0, std::optional<std::uint64_t> budget = std::nullopt);

struct NetSpec {
  int players = 2;
  int actions = 2;
  double eps = 0.1;
  double eps_prime = 0.1;  // per-simplex accuracy, eps / (n - 1)
  double spacing = 0.1;    // lattice spacing 1 / kappa <= 2 eps' / (k - 1)
  int kappa = 1;
  std::vector<Point> simplex_points;  // lattice on Delta^{k-1}
  std::uint64_t size = 0;             // |simplex_points|^{n-1}
};

std::uint64_t lattice_count(int kappa, int d);
// Lattice (1/kappa) Z^d inside Delta^d, kappa = ceil(d / (2 eps')).
NetSpec build_net(int players, int actions, double eps, std::uint64_t cap = 5'000'000);
// Packed net point with index idx in mixed radix.
Point net_point(const NetSpec& net, std::uint64_t idx);

// Per-label raw point sets over Delta(A)_{-i} with l1 distances.
class PointLabelling {
 public:
  PointLabelling() = default;
  PointLabelling(int dim, int labels);
  int dim() const { return dim_; }
  int label_count() const { return static_cast<int>(points_.size()); }
  void add(const Point& x, int label);
  const std::vector<Point>& points(int label) const { return points_[label]; }
  std::size_t size() const;
  double distance(const Point& x, int label) const;
  // Labels within slack of the nearest stored label.
  std::vector<int> voronoi(const Point& x, double slack = 0.0) const;

 private:
  int dim_ = 0;
  std::vector<std::vector<Point>> points_;
};

struct MultiplayerLabellings {
  std::vector<PointLabelling> players;
  std::uint64_t queries = 0;
  NetSpec net;
};

// Queries every player's oracle at every point of the net at accuracy eps.
MultiplayerLabellings learn_multiplayer_labellings(std::vector<LabelOracle*> oracles, int players, int actions,
                                                   double eps, std::uint64_t cap = 5'000'000);

struct MultiplayerCertificate {
  Profile x;
  double eps = 0.0;
  std::vector<std::vector<int>> supports;
  std::vector<std::vector<double>> regrets;
  bool valid = false;
  std::uint64_t queries = 0;
};

struct MultiplayerConfig {
  double eps = 0.25;
  std::uint64_t seed = 0;
  // Net accuracy as a fraction of eps.
  double learn_fraction = 0.5;
  int refinements = 1;
  std::uint64_t max_profiles = 200'000'000;
};

// Payoff-free grid search for a profile whose supports lie in the slack
// Voronoi sets of the labellings.
Profile find_voronoi_fixed_point(const MultiplayerLabellings& l, const MultiplayerConfig& cfg);
// Oracle-only: learns at learn_fraction * eps and searches; x and queries are set.
MultiplayerCertificate solve_wsne_multiplayer(std::vector<LabelOracle*> oracles, int players, int actions,
                                              const MultiplayerConfig& cfg);
// Builds adversarial oracles from g and solves with payoff reads audited.
MultiplayerCertificate solve_wsne_multiplayer(const NormalFormGame& g, const MultiplayerConfig& cfg,
                                              TiePolicy policy = TiePolicy::kSeeded);
MultiplayerCertificate verify_wsne_multiplayer(const NormalFormGame& g, const Profile& x, double eps);

NormalFormGame random_normal_form(int players, int actions, std::uint64_t seed);
// Player 0 matches player 1, player 1 matches player 2, player 2 mismatches player 0.
NormalFormGame three_player_pennies();
// Wraps a bimatrix payoff pair as a two-player game.
NormalFormGame from_bimatrix(const Matrix& A, const Matrix& B);

}  // namespace polylearn
