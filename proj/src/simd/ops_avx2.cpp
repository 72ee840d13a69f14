#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "flocklab/simd/ops.hpp"

// AVX2/FMA variants of the row kernels. Compiled with -mavx2 -mfma; only ever
// executed after the runtime dispatch has confirmed CPU support.

namespace flocklab::simd {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline __m256d dist_sq4(const double* xs, std::size_t n, std::size_t dim,
                        std::size_t i, std::size_t j) {
  __m256d d2 = _mm256_setzero_pd();
  for (std::size_t k = 0; k < dim; ++k) {
    const double* xk = xs + k * n;
    const __m256d xi = _mm256_set1_pd(xk[i]);
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xk + j), xi);
    d2 = _mm256_fmadd_pd(dx, dx, d2);
  }
  return d2;
}

inline double dist_sq1(const double* xs, std::size_t n, std::size_t dim,
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
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t j = 0;
  if (delta == 0.0) {
    for (; j < n; ++j) w[j] = 1.0;
    return;
  }
  if (delta == 1.0) {
    for (; j + 4 <= n; j += 4) {
      const __m256d b = _mm256_add_pd(one, dist_sq4(xs, n, dim, i, j));
      _mm256_storeu_pd(w + j, _mm256_div_pd(one, b));
    }
    for (; j < n; ++j) w[j] = 1.0 / (1.0 + dist_sq1(xs, n, dim, i, j));
    return;
  }
  if (delta == 0.5) {
    for (; j + 4 <= n; j += 4) {
      const __m256d b = _mm256_add_pd(one, dist_sq4(xs, n, dim, i, j));
      _mm256_storeu_pd(w + j, _mm256_div_pd(one, _mm256_sqrt_pd(b)));
    }
    for (; j < n; ++j) w[j] = 1.0 / std::sqrt(1.0 + dist_sq1(xs, n, dim, i, j));
    return;
  }
  if (delta == 2.0) {
    for (; j + 4 <= n; j += 4) {
      const __m256d b = _mm256_add_pd(one, dist_sq4(xs, n, dim, i, j));
      _mm256_storeu_pd(w + j, _mm256_div_pd(one, _mm256_mul_pd(b, b)));
    }
    for (; j < n; ++j) {
      const double b = 1.0 + dist_sq1(xs, n, dim, i, j);
      w[j] = 1.0 / (b * b);
    }
    return;
  }
  // General exponent: vectorize the distance pass, weight with scalar pow.
  for (; j + 4 <= n; j += 4)
    _mm256_storeu_pd(w + j, _mm256_add_pd(one, dist_sq4(xs, n, dim, i, j)));
  for (; j < n; ++j) w[j] = 1.0 + dist_sq1(xs, n, dim, i, j);
  for (j = 0; j < n; ++j) w[j] = std::pow(w[j], -delta);
}

void ball_row(const double* xs, std::size_t n, std::size_t dim, std::size_t i,
              double radius, double* w) {
  const double r2 = radius * radius;
  const __m256d vr2 = _mm256_set1_pd(r2);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d d2 = dist_sq4(xs, n, dim, i, j);
    const __m256d mask = _mm256_cmp_pd(d2, vr2, _CMP_LE_OQ);
    _mm256_storeu_pd(w + j, _mm256_and_pd(mask, one));
  }
  for (; j < n; ++j) w[j] = dist_sq1(xs, n, dim, i, j) <= r2 ? 1.0 : 0.0;
}

void distance_row(const double* xs, std::size_t n, std::size_t dim,
                  std::size_t i, double* r) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4)
    _mm256_storeu_pd(r + j, _mm256_sqrt_pd(dist_sq4(xs, n, dim, i, j)));
  for (; j < n; ++j) r[j] = std::sqrt(dist_sq1(xs, n, dim, i, j));
}

void weighted_diff(const double* vs, const double* w, std::size_t n,
                   std::size_t dim, std::size_t i, double* out) {
  for (std::size_t k = 0; k < dim; ++k) {
    const double* vk = vs + k * n;
    const double vi = vk[i];
    const __m256d vvi = _mm256_set1_pd(vi);
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const __m256d dv = _mm256_sub_pd(_mm256_loadu_pd(vk + j), vvi);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + j), dv, acc);
    }
    double s = hsum(acc);
    for (; j < n; ++j) s += w[j] * (vk[j] - vi);
    out[k] = s;
  }
}

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + j));
  double s = hsum(acc);
  for (; j < n; ++j) s += x[j];
  return s;
}

double sum_sq(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d v = _mm256_loadu_pd(x + j);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; j < n; ++j) s += x[j] * x[j];
  return s;
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops{"avx2", powerlaw_row, ball_row,
                       distance_row, weighted_diff, sum, sum_sq};
  return ops;
}

}  // namespace flocklab::simd
