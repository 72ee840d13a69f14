#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "flocklab/contour.hpp"
#include "flocklab/experiments.hpp"
#include "flocklab/integrator.hpp"
#include "flocklab/state.hpp"

namespace flocklab {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal form that parses back to the same double (17 significant
/// digits); every numeric CSV field goes through this.
std::string format_double(double x);

/// Header: t,X,V,vbar_1..vbar_d — one row per recorded step.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

/// Header: X0,V0,probability,certified — X-major scan order (V varies
/// fastest), one row per grid cell.
void write_grid_csv(std::ostream& out, const ProbabilityGrid& grid);

/// Header: agent,x_1..x_d,v_1..v_d — one row per agent. Round-trips through
/// read_state_csv bit-exactly.
void write_state_csv(std::ostream& out, const FlockState& state);
FlockState read_state_csv(std::istream& in);
FlockState read_state_file(const std::string& path);

/// Header: contour_id,X,V. Polylines are separated by a blank record so line
/// plotters break between them; vertices stay in chain order.
void write_contour_csv(std::ostream& out, const std::vector<Polyline>& contours);

/// Batch plot script (gnuplot dialect) rendering the grid CSV as a heatmap,
/// with the contour overlaid when a contour file name is given.
std::string plot_script(const std::string& grid_csv, const std::string& contour_csv,
                        double contour_level);

}  // namespace flocklab
