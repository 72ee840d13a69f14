#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace flocklab {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  std::size_t max_intervals = 4096;
};

/// The subdivision budget ran out before the error estimate met the
/// tolerance; carries the estimate that was achieved.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(double achieved, double requested)
      : std::runtime_error("quadrature: tolerance not met (achieved " +
                           std::to_string(achieved) + ", requested " +
                           std::to_string(requested) + ")"),
        achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

namespace quad_detail {

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& other) const { return error < other.error; }
};

// 15-point Kronrod rule with the embedded 7-point Gauss rule for the error
// estimate. Nodes/weights are the standard pair.
template <class F>
Piece gk15(F&& f, double a, double b) {
  static constexpr double xk[8] = {
      0.991455371120813, 0.949107912342759, 0.864864423359769,
      0.741531185599394, 0.586087235467691, 0.405845151377397,
      0.207784955007898, 0.0};
  static constexpr double wk[8] = {
      0.022935322010529, 0.063092092629979, 0.104790010322250,
      0.140653259715525, 0.169004726639267, 0.190350578064785,
      0.204432940075298, 0.209482141084728};
  static constexpr double wg[4] = {
      0.129484966168870, 0.279705391489277, 0.381830050505119,
      0.417959183673469};

  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = wk[7] * fc;
  double gauss = wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * xk[i];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    kron += wk[i] * (f1 + f2);
    if (i % 2 == 1) gauss += wg[i / 2] * (f1 + f2);
  }
  kron *= h;
  gauss *= h;
  return {a, b, kron, std::abs(kron - gauss)};
}

}  // namespace quad_detail

/// Globally adaptive integration of f over [a, b]: repeatedly bisects the
/// interval with the worst error estimate until the summed estimate meets
/// abs_tol. Throws QuadratureError when the interval budget runs out first.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("quadrature: bad interval");
  if (a == b) return 0.0;

  std::priority_queue<quad_detail::Piece> pieces;
  auto seed = quad_detail::gk15(f, a, b);
  if (!std::isfinite(seed.value))
    throw QuadratureError(std::numeric_limits<double>::infinity(), opt.abs_tol);
  double value = seed.value;
  double error = seed.error;
  pieces.push(seed);

  while (error > opt.abs_tol) {
    if (pieces.size() >= opt.max_intervals) throw QuadratureError(error, opt.abs_tol);
    const auto worst = pieces.top();
    pieces.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) throw QuadratureError(error, opt.abs_tol);
    const auto left = quad_detail::gk15(f, worst.a, mid);
    const auto right = quad_detail::gk15(f, mid, worst.b);
    if (!std::isfinite(left.value) || !std::isfinite(right.value))
      throw QuadratureError(error, opt.abs_tol);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    pieces.push(left);
    pieces.push(right);
  }
  return value;
}

}  // namespace flocklab
