#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "flocklab/kernel.hpp"

namespace flocklab {

enum class Verdict { Holds, Fails, Unconditional };

/// Improper integral of the kernel along the dispersion scale,
/// integral_lower^inf a(sqrt(2N) r) dr. Divergence is decided analytically
/// (power-law exponent <= 1/2); otherwise the value carries quadrature plus
/// an analytic tail whose own error stays below 1e-10.
struct TailIntegral {
  bool divergent = false;
  double value = 0.0;
};
TailIntegral kernel_tail_integral(const KernelSpec& kernel, double lower,
                                  std::size_t agents);

/// Control profiles the certificate knows how to integrate. Each one is a
/// non-increasing [0,1]-valued function of inter-agent distance.
struct NoControlFamily {};
struct BallIndicatorFamily {
  double radius = 1.0;  // 1 inside the closed ball, 0 outside; +inf allowed
};
struct ShiftedPowerTailFamily {
  double radius = 1.0;  // 1 inside the ball, (r - radius + 1)^(-theta) outside
  double theta = 2.0;   // must be > 1, otherwise the profile is not integrable
};
struct AlgebraicTailFamily {
  double epsilon = 1.0;  // (1 + r^2)^(-epsilon)
};
using ControlFamily = std::variant<NoControlFamily, BallIndicatorFamily,
                                   ShiftedPowerTailFamily, AlgebraicTailFamily>;

struct CertificateQuery {
  std::size_t agents = 2;
  double X0 = 0.0;
  double V0 = 0.0;
  KernelSpec kernel = KernelSpec::power_law(1.0);
  double gamma = 0.0;
  ControlFamily family = NoControlFamily{};
  double eta_bound = 0.0;  // normalization bound in [1, agents]; 0 means agents
};

/// lhs >= rhs guarantees consensus from (X0, V0); margin = lhs - rhs.
/// Unconditional means the left side diverges: every initial state is covered.
struct CertificateResult {
  Verdict verdict = Verdict::Fails;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};

/// Sufficient condition for the uncontrolled group: the kernel tail integral
/// from sqrt(X0) must reach sqrt(V0).
CertificateResult consensus_certificate(std::size_t agents, double X0, double V0,
                                        const KernelSpec& kernel);

/// Same condition with a control budget: the left side gains
/// gamma * agents / eta_bound times the control profile's tail integral.
CertificateResult consensus_certificate(const CertificateQuery& query);

/// Largest certified V0 for each X0 (squared left side); +inf marks
/// unconditional entries.
std::vector<double> certified_boundary(std::size_t agents, const KernelSpec& kernel,
                                       double gamma, const ControlFamily& family,
                                       const std::vector<double>& X_values,
                                       double eta_bound = 0.0);

}  // namespace flocklab
