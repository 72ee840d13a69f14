#pragma once

#include <cstddef>
#include <vector>

#include "flocklab/controllers.hpp"

// Allocation-free control evaluation for the integrator's inner loop.
// Implementation detail; the stable entry point is evaluate_control().

namespace flocklab::detail {

struct ControlWorkspace {
  std::vector<double> row;     // one interaction row
  std::vector<double> rowsum;  // per-agent row sums / neighbor counts
  std::vector<double> mean;    // group mean velocity
  std::vector<double> acc;     // per-component accumulator
  AgentArray vdev;             // velocity deviations

  void resize(std::size_t n, std::size_t d);
};

void evaluate_control_into(const FlockState& s, const ControllerSpec& c, double t,
                           ControlWorkspace& ws, AgentArray& out);

}  // namespace flocklab::detail
