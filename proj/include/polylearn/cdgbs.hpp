#pragma once

#include <cstdint>
#include <vector>

#include "polylearn/labelling.hpp"
#include "polylearn/partition.hpp"

namespace polylearn {

// I^k_x = [x - 2^-k, x] for x = i / 2^k, 1 <= i <= 2^k.
struct DyadicInterval {
  int level = 1;
  double x = 1.0;
  double lo() const;
  double hi() const { return x; }
  double midpoint() const;
};

struct GbsConfig {
  int m = 0;
  int n = 1;
  double eps = 0.1;
  OracleKind kind = OracleKind::kLexicographic;
  std::uint64_t seed = 0;
  // Section runs stop refining at this accuracy, or at eps / 16 when that is finer.
  double sub_eps_floor = 1e-8;
};

std::uint64_t uncovered_cap(int m, int n);
double sub_eps(int m, int n, double eps, double t, double floor = 1e-8);
int dyadic_levels(double eps);
// Closed-form bound prod_i (C(n+i,i) + 2n) 2^{2m^2} log^m(170 n m^{5/2} / eps).
double cdgbs_query_bound(int m, int n, double eps);
// n * ceil(log2(2/eps)) + 2n, for one-dimensional runs.
double binary_search_bound(int n, double eps);

struct GbsStats {
  std::uint64_t queries = 0;
  std::vector<int> uncovered_per_level;  // top-level run
  int section_calls = 0;                 // top-level recursive calls, excluding the 0-section
  int fix_calls = 0;
  int merges = 0;  // top-level merges
  bool halted_on_cap = false;
  bool halted_on_conflict = false;
  bool early_exit = false;
};

struct GbsResult {
  EmpiricalLabelling labelling;
  GbsStats stats;
};

GbsResult cd_gbs(const GbsConfig& cfg, LabelOracle& oracle);
GbsResult cd_gbs_adversarial(const GbsConfig& cfg, LabelOracle& oracle);

std::vector<DyadicInterval> uncovered_intervals(const EmpiricalLabelling& l, int k, double eps);

}  // namespace polylearn
