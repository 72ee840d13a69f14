#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"

#include "flocklab/rng.hpp"
#include "flocklab/simd/ops.hpp"

using namespace flocklab;

namespace {

// dimension-major block of n agents in `dim` components, entries in [-1, 1)
std::vector<double> random_block(std::size_t n, std::size_t dim, std::uint64_t seed) {
  SplitMix64 g(seed);
  std::vector<double> out(n * dim);
  for (auto& x : out) x = g.uniform_symmetric();
  return out;
}

double rel_gap(double a, double b) {
  return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("the active backend reports a consistent name") {
  CHECK_EQ(std::string(simd::active_ops().name), simd::active_backend_name());
  CHECK_EQ(std::string(simd::scalar_ops().name), "scalar");
}

TEST_CASE("vector backends reproduce the scalar row kernels") {
  if (!simd::avx2_supported()) return;  // nothing to compare on this host
  const auto& sc = simd::scalar_ops();
  const auto& vx = simd::avx2_ops();
  CHECK_EQ(std::string(vx.name), "avx2");

  const std::size_t n = 37;  // odd on purpose: exercises the remainder lanes
  const std::size_t dim = 3;
  const auto xs = random_block(n, dim, 101);
  const auto vs = random_block(n, dim, 202);

  std::vector<double> wa(n), wb(n), ra(n), rb(n);
  std::vector<double> da(dim), db(dim);

  for (const std::size_t i : {std::size_t{0}, std::size_t{5}, n - 1}) {
    for (const double delta : {0.0, 0.5, 1.0, 2.0, 2.7}) {
      sc.powerlaw_row(xs.data(), n, dim, i, delta, wa.data());
      vx.powerlaw_row(xs.data(), n, dim, i, delta, wb.data());
      for (std::size_t j = 0; j < n; ++j) {
        CHECK_LT(rel_gap(wa[j], wb[j]), 1e-13);
      }
      CHECK_EQ(wa[i], 1.0);  // self-distance is zero regardless of delta
    }

    sc.distance_row(xs.data(), n, dim, i, ra.data());
    vx.distance_row(xs.data(), n, dim, i, rb.data());
    for (std::size_t j = 0; j < n; ++j) CHECK_LT(rel_gap(ra[j], rb[j]), 1e-13);
    CHECK_EQ(ra[i], 0.0);

    for (const double radius : {0.0, 0.9, std::numeric_limits<double>::infinity()}) {
      sc.ball_row(xs.data(), n, dim, i, radius, wa.data());
      vx.ball_row(xs.data(), n, dim, i, radius, wb.data());
      // indicators must agree exactly: both sides compare the same squared sums
      for (std::size_t j = 0; j < n; ++j) CHECK_EQ(wa[j], wb[j]);
      CHECK_EQ(wa[i], 1.0);  // closed ball always holds its own center
    }

    sc.powerlaw_row(xs.data(), n, dim, i, 1.0, wa.data());
    sc.weighted_diff(vs.data(), wa.data(), n, dim, i, da.data());
    vx.weighted_diff(vs.data(), wa.data(), n, dim, i, db.data());
    for (std::size_t k = 0; k < dim; ++k) CHECK_LT(rel_gap(da[k], db[k]), 1e-13);
  }
}

TEST_CASE("vector reductions match scalar over every prefix length") {
  if (!simd::avx2_supported()) return;
  const auto& sc = simd::scalar_ops();
  const auto& vx = simd::avx2_ops();
  const auto xs = random_block(67, 1, 303);
  for (std::size_t len = 0; len <= xs.size(); ++len) {
    CHECK_LT(rel_gap(sc.sum(xs.data(), len), vx.sum(xs.data(), len)), 1e-13);
    CHECK_LT(rel_gap(sc.sum_sq(xs.data(), len), vx.sum_sq(xs.data(), len)), 1e-13);
  }
  CHECK_EQ(vx.sum(xs.data(), 0), 0.0);
  CHECK_EQ(vx.sum_sq(xs.data(), 0), 0.0);
}

}  // TEST_SUITE
