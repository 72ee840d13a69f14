#include "flocklab/array.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flocklab {

bool AgentArray::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

void AgentArray::fill(double value) {
  std::fill(data_.begin(), data_.end(), value);
}

void axpy(double a, const AgentArray& x, AgentArray& y) {
  if (x.agents() != y.agents() || x.dim() != y.dim())
    throw std::invalid_argument("axpy: shape mismatch");
  const double* xs = x.data();
  double* ys = y.data();
  const std::size_t n = x.value_count();
  for (std::size_t i = 0; i < n; ++i) ys[i] += a * xs[i];
}

}  // namespace flocklab
