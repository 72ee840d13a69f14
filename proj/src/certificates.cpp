#include "flocklab/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "flocklab/quadrature.hpp"

namespace flocklab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// integral_lower^inf (1 + c r^2)^(-e) dr with c = 2N. Finite iff e > 1/2.
// Quadrature carries [lower, R]; beyond R a two-term expansion of the
// integrand in 1/(c r^2) keeps the truncation error under 1e-10.
TailIntegral algebraic_tail(double c, double e, double lower) {
  if (e <= 0.5) return {true, 0.0};

  double r_far = std::max(lower, 1.0e3);
  // error of the two-term tail: next term of the alternating expansion
  auto tail_error = [&](double r) {
    return std::pow(c, -e) * e * (e + 1.0) / (2.0 * c * c) *
           std::pow(r, -3.0 - 2.0 * e) / (2.0 * e + 3.0);
  };
  while (tail_error(r_far) > 1e-10) r_far *= 2.0;

  double body = 0.0;
  if (r_far > lower) {
    body = integrate([&](double r) { return std::pow(1.0 + c * r * r, -e); },
                     lower, r_far, {1e-10, 4096});
  }
  const double tail = std::pow(c, -e) * (std::pow(r_far, 1.0 - 2.0 * e) / (2.0 * e - 1.0) -
                                         e / c * std::pow(r_far, -1.0 - 2.0 * e) /
                                             (2.0 * e + 1.0));
  return {false, body + tail};
}

double require_lower(double lower) {
  if (!(lower >= 0.0) || !std::isfinite(lower))
    throw std::invalid_argument("certificate: lower limit must be finite and >= 0");
  return lower;
}

}  // namespace

TailIntegral kernel_tail_integral(const KernelSpec& kernel, double lower,
                                  std::size_t agents) {
  require_lower(lower);
  if (agents < 1) throw std::invalid_argument("certificate: agents must be >= 1");
  const double scale = std::sqrt(2.0 * static_cast<double>(agents));

  if (kernel.is_power_law())
    return algebraic_tail(2.0 * static_cast<double>(agents),
                          kernel.power_law_exponent(), lower);

  // Tabulated kernel: integrate over the tabulated support, zero beyond it
  // (a conservative reading when the table extrapolates a positive constant).
  const double upper = kernel.table_extent() / scale;
  if (upper <= lower) return {false, 0.0};
  // Integrand is piecewise linear between breakpoints; one Kronrod panel per
  // piece is exact, so integrate piece by piece.
  double total = 0.0;
  double a = lower;
  for (double rk : kernel.sample_radii()) {
    const double b = std::min(rk / scale, upper);
    if (b > a) {
      total += integrate([&](double r) { return kernel(scale * r); }, a, b,
                         {1e-12, 1024});
      a = b;
    }
  }
  if (upper > a)
    total += integrate([&](double r) { return kernel(scale * r); }, a, upper,
                       {1e-12, 1024});
  return {false, total};
}

namespace {

// Tail integral of the control profile, integral_lower^inf psi(sqrt(2N) r) dr.
TailIntegral family_tail(const ControlFamily& family, double lower, std::size_t agents) {
  const double scale = std::sqrt(2.0 * static_cast<double>(agents));

  if (std::holds_alternative<NoControlFamily>(family)) return {false, 0.0};

  if (const auto* ball = std::get_if<BallIndicatorFamily>(&family)) {
    if (std::isnan(ball->radius) || ball->radius < 0.0)
      throw std::invalid_argument("certificate: ball radius must be >= 0");
    if (std::isinf(ball->radius)) return {true, 0.0};
    const double crossover = ball->radius / scale;
    return {false, lower <= crossover ? crossover - lower : 0.0};
  }

  if (const auto* sp = std::get_if<ShiftedPowerTailFamily>(&family)) {
    if (!(sp->theta > 1.0))
      throw std::domain_error("certificate: shifted-power tail needs theta > 1");
    if (std::isnan(sp->radius) || sp->radius < 0.0)
      throw std::invalid_argument("certificate: ball radius must be >= 0");
    if (std::isinf(sp->radius)) return {true, 0.0};
    const double crossover = sp->radius / scale;
    if (lower <= crossover) {
      // flat part up to the ball edge, then the power tail in closed form
      return {false, crossover - lower + 1.0 / (scale * (sp->theta - 1.0))};
    }
    const double base = scale * lower - sp->radius + 1.0;
    return {false,
            std::pow(base, 1.0 - sp->theta) / (scale * (sp->theta - 1.0))};
  }

  const auto& alg = std::get<AlgebraicTailFamily>(family);
  if (!(alg.epsilon >= 0.0) || !std::isfinite(alg.epsilon))
    throw std::invalid_argument("certificate: epsilon must be finite and >= 0");
  return algebraic_tail(2.0 * static_cast<double>(agents), alg.epsilon, lower);
}

double certificate_lhs(const CertificateQuery& q, double eta) {
  const double lower = std::sqrt(q.X0);
  const TailIntegral base = kernel_tail_integral(q.kernel, lower, q.agents);
  if (base.divergent) return kInf;
  double lhs = base.value;
  if (q.gamma > 0.0) {
    const TailIntegral ctrl = family_tail(q.family, lower, q.agents);
    if (ctrl.divergent) return kInf;
    lhs += q.gamma * static_cast<double>(q.agents) / eta * ctrl.value;
  } else {
    family_tail(q.family, lower, q.agents);  // still validate the family
  }
  return lhs;
}

double checked_eta(const CertificateQuery& q) {
  double eta = q.eta_bound == 0.0 ? static_cast<double>(q.agents) : q.eta_bound;
  if (!(eta >= 1.0) || eta > static_cast<double>(q.agents))
    throw std::invalid_argument("certificate: eta bound must lie in [1, agents]");
  return eta;
}

void check_query(const CertificateQuery& q) {
  if (q.agents < 2) throw std::invalid_argument("certificate: agents must be >= 2");
  if (!(q.X0 >= 0.0) || !std::isfinite(q.X0))
    throw std::invalid_argument("certificate: X0 must be finite and >= 0");
  if (!(q.V0 >= 0.0) || !std::isfinite(q.V0))
    throw std::invalid_argument("certificate: V0 must be finite and >= 0");
  if (!(q.gamma >= 0.0) || !std::isfinite(q.gamma))
    throw std::invalid_argument("certificate: gamma must be finite and >= 0");
}

CertificateResult finish(double lhs, double V0) {
  CertificateResult res;
  res.lhs = lhs;
  res.rhs = std::sqrt(V0);
  res.margin = lhs - res.rhs;
  if (std::isinf(lhs))
    res.verdict = Verdict::Unconditional;
  else
    res.verdict = res.margin >= 0.0 ? Verdict::Holds : Verdict::Fails;
  return res;
}

}  // namespace

CertificateResult consensus_certificate(std::size_t agents, double X0, double V0,
                                        const KernelSpec& kernel) {
  CertificateQuery q;
  q.agents = agents;
  q.X0 = X0;
  q.V0 = V0;
  q.kernel = kernel;
  q.gamma = 0.0;
  check_query(q);
  return finish(certificate_lhs(q, static_cast<double>(agents)), V0);
}

CertificateResult consensus_certificate(const CertificateQuery& query) {
  check_query(query);
  const double eta = checked_eta(query);
  return finish(certificate_lhs(query, eta), query.V0);
}

std::vector<double> certified_boundary(std::size_t agents, const KernelSpec& kernel,
                                       double gamma, const ControlFamily& family,
                                       const std::vector<double>& X_values,
                                       double eta_bound) {
  CertificateQuery q;
  q.agents = agents;
  q.kernel = kernel;
  q.gamma = gamma;
  q.family = family;
  q.eta_bound = eta_bound;
  check_query(q);
  const double eta = checked_eta(q);
  std::vector<double> out;
  out.reserve(X_values.size());
  for (double x : X_values) {
    q.X0 = x;
    check_query(q);
    const double lhs = certificate_lhs(q, eta);
    out.push_back(std::isinf(lhs) ? kInf : lhs * lhs);
  }
  return out;
}

}  // namespace flocklab
