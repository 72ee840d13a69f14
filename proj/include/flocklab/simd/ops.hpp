#pragma once

#include <cstddef>

namespace flocklab::simd {

/// Row kernels over dimension-major agent data (see AgentArray). `xs`/`vs`
/// point at n*dim blocks where component k of agent j lives at [k*n + j].
/// Every entry point has a scalar reference implementation and, where the
/// host supports it, an AVX2 one; both compute the same quantities and are
/// equivalence-tested against each other.
struct Ops {
  const char* name;

  /// w[j] = (1 + ||x_i - x_j||^2)^(-delta)
  void (*powerlaw_row)(const double* xs, std::size_t n, std::size_t dim,
                       std::size_t i, double delta, double* w);

  /// w[j] = 1 if ||x_i - x_j|| <= radius else 0 (closed ball; radius may be +inf)
  void (*ball_row)(const double* xs, std::size_t n, std::size_t dim,
                   std::size_t i, double radius, double* w);

  /// r[j] = ||x_i - x_j||
  void (*distance_row)(const double* xs, std::size_t n, std::size_t dim,
                       std::size_t i, double* r);

  /// out[k] = sum_j w[j] * (v_j[k] - v_i[k]), k = 0..dim-1
  void (*weighted_diff)(const double* vs, const double* w, std::size_t n,
                        std::size_t dim, std::size_t i, double* out);

  double (*sum)(const double* x, std::size_t n);
  double (*sum_sq)(const double* x, std::size_t n);
};

const Ops& scalar_ops();

/// True when the running CPU (and this build) can execute the AVX2 variants.
bool avx2_supported();

/// Valid only when avx2_supported(). Exposed directly so equivalence tests
/// can pit the two implementations against each other.
const Ops& avx2_ops();

/// Backend picked at startup: best supported, unless the FLOCKLAB_SIMD
/// environment variable ("scalar" or "avx2") overrides the choice. Requesting
/// avx2 on a host without it throws std::runtime_error.
const Ops& active_ops();

const char* active_backend_name();

}  // namespace flocklab::simd
