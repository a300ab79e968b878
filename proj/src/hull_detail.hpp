#pragma once

#include <utility>
#include <vector>

#include "polylearn/core.hpp"

namespace polylearn::detail {

struct HullIndices {
  int affine_dim = -1;
  std::vector<int> vertices;                          // indices into the input
  std::vector<std::pair<int, int>> edges;             // positions in `vertices`
  std::vector<std::pair<Point, double>> facets;       // inward rows, full-dim only
};

HullIndices hull_indices(const std::vector<Point>& points, double tol);

}  // namespace polylearn::detail
