#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "polylearn/core.hpp"

namespace polylearn {

// Intersection of halfspaces normal . x >= offset, normals of unit length.
class HPolytope {
 public:
  HPolytope() = default;
  explicit HPolytope(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(offsets_.size()); }
  const Point& normal(int r) const { return normals_[r]; }
  double offset(int r) const { return offsets_[r]; }

  // Normalizes the row. A zero normal is a constant constraint 0 >= offset.
  void add_row(const Point& normal, double offset);
  void mark_infeasible() { infeasible_ = true; }
  bool infeasible() const { return infeasible_; }

  bool contains(const Point& x, double tol = kEta) const;
  // Smallest slack normal . x - offset over all rows (+inf without rows).
  double depth(const Point& x) const;

 private:
  int dim_ = 0;
  std::vector<Point> normals_;
  std::vector<double> offsets_;
  bool infeasible_ = false;
};

HPolytope simplex_hpolytope(int m);

// Convex hull of its vertex list. Always canonical: no vertex lies within
// kEta of the hull of the others.
class VPolytope {
 public:
  VPolytope() = default;
  static VPolytope empty(int dim);

  int dim() const { return dim_; }
  bool is_empty() const { return vertices_.empty(); }
  int affine_dim() const { return affine_dim_; }
  bool full_dim() const { return !is_empty() && affine_dim_ == dim_; }
  const std::vector<Point>& vertices() const { return vertices_; }
  // Vertex index pairs covering every edge of the polytope (may include
  // extra chords lying inside faces).
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  // Facet inequalities, only populated for full-dimensional polytopes.
  const HPolytope& facets() const { return facets_; }
  const Point& lower() const { return lo_; }
  const Point& upper() const { return hi_; }

 private:
  friend VPolytope convex_hull(int dim, const std::vector<Point>& points);
  int dim_ = 0;
  int affine_dim_ = -1;
  std::vector<Point> vertices_;
  std::vector<std::pair<int, int>> edges_;
  HPolytope facets_;
  Point lo_, hi_;
};

VPolytope convex_hull(int dim, const std::vector<Point>& points);
inline VPolytope convex_hull(const std::vector<Point>& points) {
  return convex_hull(points.empty() ? 0 : static_cast<int>(points.front().size()), points);
}
VPolytope simplex_vpolytope(int m);

struct ChebyshevBall {
  double radius = 0.0;
  Point center;
  bool feasible = false;
};
ChebyshevBall chebyshev(const HPolytope& p);

double diameter(const VPolytope& p);

struct Projection {
  double dist = 0.0;
  Point witness;
};
Projection distance_to_hull(const Point& x, const VPolytope& p, Norm n = Norm::kL2);
// Min-norm-point projection onto conv(points), no canonicalization needed.
Projection project_onto_points(const Point& x, const std::vector<Point>& points);
bool contains(const VPolytope& p, const Point& x, double tol = kEta);

VPolytope cross_section(const VPolytope& p, double x);
// Points whose hull is that cross-section, first coordinate kept.
std::vector<Point> cross_section_points(const VPolytope& p, double x);
VPolytope slice(const VPolytope& p, double x, double y);
// Cross-section of halfspaces at first coordinate x, in the remaining coordinates.
HPolytope cross_section(const HPolytope& p, double x);

VPolytope enumerate_vertices(const HPolytope& p);

class AffineMap {
 public:
  AffineMap() = default;
  AffineMap(Matrix matrix, Point shift) : matrix_(std::move(matrix)), shift_(std::move(shift)) {}

  int in_dim() const { return static_cast<int>(matrix_.cols()); }
  int out_dim() const { return static_cast<int>(matrix_.rows()); }
  const Matrix& matrix() const { return matrix_; }
  const Point& shift() const { return shift_; }
  Point apply(const Point& x) const { return matrix_ * x + shift_; }
  Point operator()(const Point& x) const { return apply(x); }

  bool has_inverse() const { return inverse_ != nullptr; }
  const AffineMap& inverse() const;
  // Stores the inverse after checking the round trip on basis points.
  void set_inverse(const AffineMap& inv);
  AffineMap compose(const AffineMap& inner) const;  // this o inner

 private:
  Matrix matrix_;
  Point shift_;
  std::shared_ptr<const AffineMap> inverse_;
};

// f_x: (Delta^m)^x -> Delta^{m-1}, with inverse w -> (x, (1-x) w).
AffineMap section_map(int m, double x);
// phi_m: Delta^m -> Lambda^{m+1}.
AffineMap lambda_embed(int m);

struct Face {
  std::vector<int> vertex_subset;
  int dim = 0;
};
std::vector<std::pair<Face, AffineMap>> enumerate_k_faces(int m, int k);

// Thickness of a possibly non-convex set S: the largest distance from a
// lattice point of S to a lattice point outside S, on a cubic lattice of the
// given spacing over [lo, hi] padded by one outside layer. Within spacing *
// sqrt(dim) of the true Chebyshev radius for well-behaved sets.
double grid_thickness(const Point& lo, const Point& hi, double spacing,
                      const std::function<bool(const Point&)>& inside);

HPolytope gamma_interior(const HPolytope& p, const std::vector<int>& boundary_rows, double gamma);

}  // namespace polylearn
