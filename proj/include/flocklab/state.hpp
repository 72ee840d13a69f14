#pragma once

#include <cstddef>

#include "flocklab/array.hpp"

namespace flocklab {

/// Positions and velocities of the whole group.
struct FlockState {
  AgentArray positions;
  AgentArray velocities;

  std::size_t agents() const { return positions.agents(); }
  std::size_t dim() const { return positions.dim(); }

  static FlockState zeros(std::size_t agents, std::size_t dim);

  /// Throws std::invalid_argument if the two arrays disagree in shape, the
  /// state is empty, or any entry is non-finite.
  void validate() const;

  friend bool operator==(const FlockState&, const FlockState&) = default;
};

}  // namespace flocklab
