#include "flocklab/state.hpp"

#include <stdexcept>

namespace flocklab {

FlockState FlockState::zeros(std::size_t agents, std::size_t dim) {
  return FlockState{AgentArray(agents, dim), AgentArray(agents, dim)};
}

void FlockState::validate() const {
  if (positions.agents() == 0 || positions.dim() == 0)
    throw std::invalid_argument("state: empty");
  if (positions.agents() != velocities.agents() ||
      positions.dim() != velocities.dim())
    throw std::invalid_argument("state: position/velocity shape mismatch");
  if (!positions.all_finite() || !velocities.all_finite())
    throw std::invalid_argument("state: non-finite entry");
}

}  // namespace flocklab
