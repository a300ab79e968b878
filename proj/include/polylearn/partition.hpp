#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "polylearn/geometry.hpp"

namespace polylearn {

// Upper envelope partition: label i owns {y : (Ay+b)_i >= (Ay+b)_j for all j}.
struct Uepp {
  int m = 0;
  int n = 0;
  Matrix A;           // n x m
  Eigen::VectorXd b;  // n

  Eigen::VectorXd values(const Point& y) const { return A * y + b; }
  void validate() const;
};

// All labels within kEta of the maximum value. Throws if y leaves the simplex.
std::vector<int> uepp_label_set(const Uepp& u, const Point& y);
// Pulls the partition back along map (sub-domain -> Delta^m).
Uepp compose_uepp(const Uepp& u, const AffineMap& map);

struct GroundTruthCell {
  int label = 0;
  HPolytope halfspaces;  // the first m+1 rows are the simplex facets
  VPolytope cell;
};

struct PartitionGroundTruth {
  int m = 0;
  int n = 0;
  std::vector<GroundTruthCell> cells;

  std::vector<int> label_set(const Point& y, double tol = 1e-9) const;
  const GroundTruthCell& cell_of(int label) const;
};

PartitionGroundTruth uepp_cells(const Uepp& u);

std::vector<double> critical_coordinates(const Uepp& u, double alpha);

struct RandomUeppOptions {
  int duplicate_rows = 0;  // copies of a row that wins at the centroid
  int empty_cells = 0;     // rows that never attain the maximum
};
Uepp random_uepp(int m, int n, std::uint64_t seed, const RandomUeppOptions& options = {});

enum class OracleKind { kLexicographic, kAdversarial };
enum class TiePolicy { kSeeded, kRoundRobin, kMaxIndex, kAntiLearner };

struct QueryRecord {
  Point point;
  int label = 0;
};

class QueryLog {
 public:
  explicit QueryLog(std::optional<std::uint64_t> budget = std::nullopt) : budget_(budget) {}

  std::uint64_t count() const { return transcript_.size(); }
  const std::vector<QueryRecord>& transcript() const { return transcript_; }
  std::optional<std::uint64_t> budget() const { return budget_; }
  // Throws BudgetExhausted when the next query would exceed the budget.
  void reserve_one() const;
  void record(const Point& y, int label) { transcript_.push_back({y, label}); }
  void write_jsonl(std::ostream& os) const;

 private:
  std::optional<std::uint64_t> budget_;
  std::vector<QueryRecord> transcript_;
};

// Membership oracle interface seen by the learners.
class LabelOracle {
 public:
  virtual ~LabelOracle() = default;
  virtual int dim() const = 0;
  virtual int label_count() const = 0;
  virtual int query(const Point& y) = 0;
};

// Q o map, where map sends the sub-domain into the parent's domain.
class MappedOracle : public LabelOracle {
 public:
  MappedOracle(LabelOracle& parent, AffineMap map) : parent_(parent), map_(std::move(map)) {}
  int dim() const override { return map_.in_dim(); }
  int label_count() const override { return parent_.label_count(); }
  int query(const Point& y) override { return parent_.query(map_.apply(y)); }
  const AffineMap& map() const { return map_; }

 private:
  LabelOracle& parent_;
  AffineMap map_;
};

using LabelSetFn = std::function<std::vector<int>(const Point&)>;

class Oracle : public LabelOracle {
 public:
  Oracle(int m, int n, LabelSetFn truth, OracleKind kind, TiePolicy policy, std::uint64_t seed,
         std::optional<std::uint64_t> budget = std::nullopt);

  int dim() const override { return m_; }
  int label_count() const override { return n_; }
  int query(const Point& y) override;
  // Label set without logging (for verification).
  std::vector<int> label_set(const Point& y) const { return truth_(y); }

  const QueryLog& log() const { return log_; }
  OracleKind kind() const { return kind_; }
  TiePolicy policy() const { return policy_; }
  // Fresh oracle with the same configuration and an empty log.
  Oracle clone() const;

 private:
  int choose(const std::vector<int>& ties, const Point& y);

  int m_, n_;
  LabelSetFn truth_;
  OracleKind kind_;
  TiePolicy policy_;
  std::uint64_t seed_;
  QueryLog log_;
  std::uint64_t round_robin_ = 0;
  std::vector<std::vector<Point>> answered_;  // per label, for the anti-learner policy
};

Oracle make_oracle(const Uepp& u, OracleKind kind, TiePolicy policy = TiePolicy::kSeeded, std::uint64_t seed = 0,
                   std::optional<std::uint64_t> budget = std::nullopt);
Oracle make_oracle(const PartitionGroundTruth& gt, OracleKind kind, TiePolicy policy = TiePolicy::kSeeded,
                   std::uint64_t seed = 0, std::optional<std::uint64_t> budget = std::nullopt);

}  // namespace polylearn
