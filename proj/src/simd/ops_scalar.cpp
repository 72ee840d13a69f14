#include <cmath>
#include <cstddef>

#include "flocklab/simd/ops.hpp"

namespace flocklab::simd {
namespace {

inline double dist_sq(const double* xs, std::size_t n, std::size_t dim,
                      std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double d = xs[k * n + j] - xs[k * n + i];
    s += d * d;
  }
  return s;
}

void powerlaw_row(const double* xs, std::size_t n, std::size_t dim,
                  std::size_t i, double delta, double* w) {
  if (delta == 0.0) {
    for (std::size_t j = 0; j < n; ++j) w[j] = 1.0;
    return;
  }
  if (delta == 1.0) {
    for (std::size_t j = 0; j < n; ++j) w[j] = 1.0 / (1.0 + dist_sq(xs, n, dim, i, j));
    return;
  }
  if (delta == 0.5) {
    for (std::size_t j = 0; j < n; ++j)
      w[j] = 1.0 / std::sqrt(1.0 + dist_sq(xs, n, dim, i, j));
    return;
  }
  if (delta == 2.0) {
    for (std::size_t j = 0; j < n; ++j) {
      const double b = 1.0 + dist_sq(xs, n, dim, i, j);
      w[j] = 1.0 / (b * b);
    }
    return;
  }
  for (std::size_t j = 0; j < n; ++j)
    w[j] = std::pow(1.0 + dist_sq(xs, n, dim, i, j), -delta);
}

void ball_row(const double* xs, std::size_t n, std::size_t dim, std::size_t i,
              double radius, double* w) {
  const double r2 = radius * radius;
  for (std::size_t j = 0; j < n; ++j)
    w[j] = dist_sq(xs, n, dim, i, j) <= r2 ? 1.0 : 0.0;
}

void distance_row(const double* xs, std::size_t n, std::size_t dim,
                  std::size_t i, double* r) {
  for (std::size_t j = 0; j < n; ++j) r[j] = std::sqrt(dist_sq(xs, n, dim, i, j));
}

void weighted_diff(const double* vs, const double* w, std::size_t n,
                   std::size_t dim, std::size_t i, double* out) {
  for (std::size_t k = 0; k < dim; ++k) {
    const double* vk = vs + k * n;
    const double vi = vk[i];
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += w[j] * (vk[j] - vi);
    out[k] = acc;
  }
}

double sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += x[j];
  return s;
}

double sum_sq(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += x[j] * x[j];
  return s;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{"scalar", powerlaw_row, ball_row,
                       distance_row, weighted_diff, sum, sum_sq};
  return ops;
}

}  // namespace flocklab::simd
