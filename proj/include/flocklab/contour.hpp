#pragma once

#include <vector>

#include "flocklab/experiments.hpp"

namespace flocklab {

struct ContourPoint {
  double x;
  double v;
};
using Polyline = std::vector<ContourPoint>;

/// Level-set polylines of the probability field at `level` (must lie strictly
/// inside (0, 1)), by marching squares with linear interpolation along cell
/// edges. Vertices stay inside the grid's bounding box; each polyline is an
/// ordered chain, closed when the level set is a loop.
std::vector<Polyline> contour_extract(const ProbabilityGrid& grid, double level);

}  // namespace flocklab
