#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "polylearn/geometry.hpp"

namespace polylearn {

// Per-label queried points and their hulls. Labels merged with merge_labels
// share one class; each point keeps the raw label it was queried with.
class EmpiricalLabelling {
 public:
  EmpiricalLabelling() = default;
  EmpiricalLabelling(int m, int n);

  int dim() const { return m_; }
  int label_count() const { return n_; }

  void add_query(const Point& x, int label);
  void merge_labels(int i, int j);
  int find(int label) const;
  bool same_class(int i, int j) const { return find(i) == find(j); }
  // Labels sharing the class of `label`, ascending.
  std::vector<int> members(int label) const;
  // Class roots that hold at least one point.
  std::vector<int> classes() const;

  const std::vector<Point>& class_points(int label) const { return points_[find(label)]; }
  const std::vector<int>& class_raw_labels(int label) const { return raw_[find(label)]; }
  std::size_t point_count() const;
  const std::vector<std::pair<int, int>>& merges() const { return merges_; }

  // Hull of the class of `label`; cached until the class changes.
  const VPolytope& hull(int label) const;
  // Keeps only hull vertices of every class. Hulls are unchanged.
  void compact();
  // Computes every hull so concurrent readers never touch the cache.
  void freeze() const;

 private:
  int m_ = 0, n_ = 0;
  mutable std::vector<int> parent_;
  std::vector<std::vector<Point>> points_;
  std::vector<std::vector<int>> raw_;
  std::vector<std::pair<int, int>> merges_;
  mutable std::vector<std::optional<VPolytope>> hulls_;
};

struct CoverageReport {
  double eps = 0.0;
  bool is_close = false;
  std::optional<Point> witness;  // farthest uncovered lattice point
  double witness_distance = 0.0;
  double checked_resolution = 0.0;  // lattice spacing
  std::uint64_t lattice_points = 0;
};

// Lattice verifier: a cubic lattice with covering radius eps/2 over the
// region's box, projected onto the region. Close means every projected
// lattice point lies within eps/2 of a hull, which implies every region point
// lies within eps. A negative answer is conservative.
CoverageReport is_eps_close(const EmpiricalLabelling& l, const VPolytope& region, double eps);
CoverageReport is_eps_close(const EmpiricalLabelling& l, double eps);
CoverageReport is_eps_close_serial(const EmpiricalLabelling& l, const VPolytope& region, double eps);
CoverageReport is_eps_close_serial(const EmpiricalLabelling& l, double eps);

struct SlabCoverage {
  bool covered = false;
  std::optional<Point> witness;
};

// Structured check that every point of the slab {y in Delta^m : a <= y_1 <= b}
// lies within eps/2 of the union of hulls. Exact in dimension <= 1, polygon
// subtraction with inscribed offsets in dimension 2, and plane sweeps over
// cross-sections above that. Covered implies is_eps_close holds on the slab.
SlabCoverage check_slab(const EmpiricalLabelling& l, double a, double b, double eps);
bool is_slice_covered(const EmpiricalLabelling& l, double x, double y, double eps);
// check_slab over the whole simplex.
SlabCoverage check_covered(const EmpiricalLabelling& l, double eps);

// Labels whose class hull lies within `slack` of the nearest hull.
std::vector<int> voronoi_labels(const Point& x, const EmpiricalLabelling& l, Norm norm = Norm::kL2,
                                double slack = 0.0);

// Voronoi label sets at many points as bitmasks (labels < 32).
std::vector<std::uint32_t> voronoi_masks(const EmpiricalLabelling& l, const std::vector<Point>& xs,
                                         Norm norm = Norm::kL2, double slack = 0.0);
std::vector<std::uint32_t> voronoi_masks_serial(const EmpiricalLabelling& l, const std::vector<Point>& xs,
                                                Norm norm = Norm::kL2, double slack = 0.0);

struct Conflict {
  int i = 0, j = 0;  // z lies in the interior of the full-dimensional hull of i, and in the hull of j
  Point z;
};
std::optional<Conflict> interior_conflict(const EmpiricalLabelling& l);

}  // namespace polylearn
