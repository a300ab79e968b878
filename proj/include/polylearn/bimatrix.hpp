#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "polylearn/core.hpp"
#include "polylearn/labelling.hpp"
#include "polylearn/partition.hpp"

namespace polylearn {

enum class Side { kRow, kColumn };

// Counts payoff reads made while a solver scope is open and no oracle scope is.
class PayoffAudit {
 public:
  class SolverScope {
   public:
    SolverScope();
    ~SolverScope();
    SolverScope(const SolverScope&) = delete;
    SolverScope& operator=(const SolverScope&) = delete;
  };
  class OracleScope {
   public:
    OracleScope();
    ~OracleScope();
    OracleScope(const OracleScope&) = delete;
    OracleScope& operator=(const OracleScope&) = delete;
  };
  static void touch();
  static std::uint64_t violations();
  static void reset();
};

class BimatrixGame {
 public:
  BimatrixGame(Matrix A, Matrix B);
  int rows() const { return static_cast<int>(a_.rows()); }
  int cols() const { return static_cast<int>(a_.cols()); }
  const Matrix& A() const {
    PayoffAudit::touch();
    return a_;
  }
  const Matrix& B() const {
    PayoffAudit::touch();
    return b_;
  }

 private:
  Matrix a_, b_;
};

// Reduced coordinates: u in Delta^{m-1} stands for (1 - sum u, u_1, ..., u_{m-1}).
Point full_mix(const Point& reduced);
Point reduced_mix(const Point& full);

struct Utilities {
  double row = 0.0;
  double col = 0.0;
};
Utilities utilities(const BimatrixGame& g, const Point& u, const Point& v);
// Utilities of side's pure strategies against the opponent's reduced mix.
Eigen::VectorXd pure_utilities(const BimatrixGame& g, Side side, const Point& opponent);
double best_value(const BimatrixGame& g, Side side, const Point& opponent);
// Full argmax set, ties within kEta.
std::vector<int> strong_best_responses(const BimatrixGame& g, Side side, const Point& opponent);

// Best responses of `side` over the opponent's reduced simplex.
Oracle br_oracle(const BimatrixGame& g, Side side, OracleKind kind, TiePolicy policy = TiePolicy::kSeeded,
                 std::uint64_t seed = 0, std::optional<std::uint64_t> budget = std::nullopt);
Uepp br_partition(const BimatrixGame& g, Side side);

struct WsneCertificate {
  Point u, v;  // reduced
  double eps = 0.0;
  std::vector<int> row_support, col_support;
  std::vector<double> row_regrets, col_regrets;  // one per supported strategy
  bool valid = false;
  std::uint64_t row_queries = 0;  // queries to the row player's oracle
  std::uint64_t col_queries = 0;
};

struct WsneConfig {
  double eps = 0.1;
  std::uint64_t seed = 0;
  double support_threshold = 1e-9;
  // Grid refinements (resolution doubles each time) before giving up.
  int refinements = 1;
};

// ε_C = eps / (2 sqrt(max(m-1, 1))), the column partition's accuracy.
double column_accuracy(int m, double eps);
double row_accuracy(int n, double eps);

struct LearnedPartitions {
  EmpiricalLabelling column;  // over Delta^{m-1}, n labels
  EmpiricalLabelling row;     // over Delta^{n-1}, m labels
  std::uint64_t row_queries = 0, col_queries = 0;
};
LearnedPartitions learn_best_responses(LabelOracle& row_br, LabelOracle& col_br, const WsneConfig& cfg);

// Payoff-free: row_br answers the row player's best response to a column mix
// (dimension n-1, m labels), col_br the column player's to a row mix.
WsneCertificate solve_wsne(LabelOracle& row_br, LabelOracle& col_br, const WsneConfig& cfg);
// Builds adversarial oracles from g and solves with payoff reads audited.
WsneCertificate solve_wsne(const BimatrixGame& g, const WsneConfig& cfg, TiePolicy policy = TiePolicy::kSeeded);

WsneCertificate verify_wsne(const BimatrixGame& g, const Point& u, const Point& v, double eps);

// A = [[x, x], [0, 1]], B = [[0, y], [1, y]]; unique NE u = (y), v = (x).
BimatrixGame lower_bound_game(double x, double y);
BimatrixGame random_game(int m, int n, std::uint64_t seed);

}  // namespace polylearn
