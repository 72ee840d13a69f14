#include "flocklab/functionals.hpp"

#include <cmath>
#include <stdexcept>

#include "flocklab/simd/ops.hpp"

namespace flocklab {

std::vector<double> mean_vector(const AgentArray& a) {
  const std::size_t n = a.agents();
  if (n == 0) throw std::invalid_argument("mean_vector: empty array");
  const auto& ops = simd::active_ops();
  std::vector<double> m(a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k)
    m[k] = ops.sum(a.component(k), n) / static_cast<double>(n);
  return m;
}

AgentArray deviations(const AgentArray& a) {
  const auto m = mean_vector(a);
  AgentArray out(a.agents(), a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k) {
    const double* src = a.component(k);
    double* dst = out.component(k);
    for (std::size_t i = 0; i < a.agents(); ++i) dst[i] = src[i] - m[k];
  }
  return out;
}

double mean_square_deviation(const AgentArray& a) {
  const auto& ops = simd::active_ops();
  const AgentArray dev = deviations(a);
  double s = 0.0;
  for (std::size_t k = 0; k < a.dim(); ++k)
    s += ops.sum_sq(dev.component(k), dev.agents());
  return s / static_cast<double>(a.agents());
}

double pairwise_dispersion(const AgentArray& a) {
  const std::size_t n = a.agents();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < a.dim(); ++k) {
        const double d = a(i, k) - a(j, k);
        d2 += d * d;
      }
      s += d2;
    }
  return s / (2.0 * static_cast<double>(n) * static_cast<double>(n));
}

DispersionPair dispersion(const FlockState& s) {
  return {mean_square_deviation(s.positions), mean_square_deviation(s.velocities)};
}

DispersionPair dispersion_pairwise(const FlockState& s) {
  return {pairwise_dispersion(s.positions), pairwise_dispersion(s.velocities)};
}

double max_pairwise_distance(const AgentArray& a) {
  const std::size_t n = a.agents();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < a.dim(); ++k) {
        const double d = a(i, k) - a(j, k);
        d2 += d * d;
      }
      if (d2 > best) best = d2;
    }
  return std::sqrt(best);
}

QuadraticFormSides weighted_alignment_quadratic(const SquareMatrix& w, const AgentArray& a) {
  const std::size_t n = a.agents();
  if (w.size() != n)
    throw std::invalid_argument("weighted_alignment_quadratic: weight size mismatch");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (w(i, j) != w(j, i))
        throw std::invalid_argument("weighted_alignment_quadratic: weights not symmetric");

  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  double lhs = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < a.dim(); ++k) dot += (a(j, k) - a(i, k)) * a(i, k);
      lhs += w(i, j) * dot;
    }
  lhs /= n2;

  double rhs = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < a.dim(); ++k) {
        const double d = a(i, k) - a(j, k);
        d2 += d * d;
      }
      rhs += w(i, j) * d2;
    }
  rhs /= -2.0 * n2;

  return {lhs, rhs};
}

}  // namespace flocklab
