#pragma once

#include <cstdint>

namespace flocklab {

/// SplitMix64 finalizer. Used on its own to derive sub-stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// SplitMix64. Chosen over the standard-library engines because its output
/// is fully pinned by these few lines — identical on every platform and
/// toolchain — which the experiment protocol depends on.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

  /// [0, 1): the top 53 bits scaled by 2^-53.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// [-1, 1)
  double uniform_symmetric() { return 2.0 * uniform01() - 1.0; }

 private:
  std::uint64_t state_;
};

}  // namespace flocklab
