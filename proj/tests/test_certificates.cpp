#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"

#include "flocklab/certificates.hpp"
#include "flocklab/kernel.hpp"
#include "flocklab/quadrature.hpp"

using namespace flocklab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// closed form of the delta = 1 tail: (pi/2 - atan(s * lower)) / s, s = sqrt(2N)
double arctan_tail(std::size_t agents, double lower) {
  const double s = std::sqrt(2.0 * static_cast<double>(agents));
  return (std::atan(1.0) * 2.0 - std::atan(s * lower)) / s;
}

}  // namespace

TEST_SUITE("certificates") {

TEST_CASE("adaptive quadrature: elementary integrals") {
  const auto sq = integrate([](double x) { return x * x; }, 0.0, 1.0, {});
  CHECK(sq == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  const auto sine = integrate([](double x) { return std::sin(x); }, 0.0,
                              2.0 * std::acos(0.0), {});
  CHECK(sine == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("adaptive quadrature: budget exhaustion is reported") {
  QuadratureOptions opt;
  opt.max_intervals = 16;
  CHECK_THROWS_AS(integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, opt),
                  QuadratureError);
}

TEST_CASE("kernel tail: frozen uncontrolled threshold at two agents") {
  const auto tail = kernel_tail_integral(KernelSpec::power_law(1.0), 1.0, 2);
  REQUIRE_FALSE(tail.divergent);
  CHECK(tail.value == doctest::Approx(0.23182380450040307).epsilon(1e-10));

  const auto r = consensus_certificate(2, 1.0, 1.0, KernelSpec::power_law(1.0));
  CHECK_EQ(r.verdict, Verdict::Fails);
  CHECK(r.lhs == doctest::Approx(0.23182380450040307).epsilon(1e-10));
  CHECK(r.rhs == doctest::Approx(1.0).epsilon(1e-15));

  // certified velocity threshold = lhs^2
  const auto boundary =
      certified_boundary(2, KernelSpec::power_law(1.0), 0.0, NoControlFamily{}, {1.0});
  REQUIRE_EQ(boundary.size(), 1);
  CHECK(boundary[0] == doctest::Approx(0.053742276333041107).epsilon(1e-9));
}

TEST_CASE("kernel tail: quadrature matches the arctangent closed form") {
  for (const std::size_t n : {2, 5, 20}) {
    for (const double lower : {0.1, 1.0, 3.0}) {
      const auto tail = kernel_tail_integral(KernelSpec::power_law(1.0), lower, n);
      REQUIRE_FALSE(tail.divergent);
      CHECK(tail.value == doctest::Approx(arctan_tail(n, lower)).epsilon(1e-9));
    }
  }
}

TEST_CASE("slow kernels diverge exactly at the critical exponent") {
  CHECK(kernel_tail_integral(KernelSpec::power_law(0.5), 1.0, 2).divergent);
  CHECK(kernel_tail_integral(KernelSpec::power_law(0.49), 1.0, 2).divergent);
  CHECK(kernel_tail_integral(KernelSpec::power_law(0.0), 1.0, 2).divergent);
  CHECK_FALSE(kernel_tail_integral(KernelSpec::power_law(0.51), 1.0, 2).divergent);

  const auto r = consensus_certificate(2, 1.0, 1e12, KernelSpec::power_law(0.4));
  CHECK_EQ(r.verdict, Verdict::Unconditional);
  CHECK(std::isinf(r.lhs));
  CHECK(std::isinf(r.margin));
}

TEST_CASE("tabulated kernel tail integrates the linear pieces") {
  const auto ramp = KernelSpec::tabulated({0.0, 1.0}, {1.0, 0.0});
  // scaled by sqrt(4) = 2: support of a(2r) ends at r = 0.5
  const auto full = kernel_tail_integral(ramp, 0.0, 2);
  REQUIRE_FALSE(full.divergent);
  CHECK(full.value == doctest::Approx(0.25).epsilon(1e-10));
  const auto part = kernel_tail_integral(ramp, 0.25, 2);
  CHECK(part.value == doctest::Approx(0.0625).epsilon(1e-10));
  const auto none = kernel_tail_integral(ramp, 2.0, 2);
  CHECK(none.value == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("ball profile: frozen extended threshold") {
  CertificateQuery q;
  q.agents = 2;
  q.X0 = 1.0;
  q.V0 = 1.0;
  q.kernel = KernelSpec::power_law(1.0);
  q.gamma = 1.0;
  q.family = BallIndicatorFamily{4.0};
  const auto r = consensus_certificate(q);
  CHECK_EQ(r.verdict, Verdict::Holds);
  CHECK(r.lhs == doctest::Approx(1.2318238045004031).epsilon(1e-10));

  const auto boundary = certified_boundary(2, KernelSpec::power_law(1.0), 1.0,
                                           BallIndicatorFamily{4.0}, {1.0});
  CHECK(boundary[0] == doctest::Approx(1.5173898853338472).epsilon(1e-9));
}

TEST_CASE("ball profile: no contribution beyond the ball, all of it at infinity") {
  CertificateQuery q;
  q.agents = 2;
  q.X0 = 4.0;  // sqrt(2N X0) = 4 = R: the ball term vanishes
  q.V0 = 0.01;
  q.kernel = KernelSpec::power_law(1.0);
  q.gamma = 1.0;
  q.family = BallIndicatorFamily{4.0};
  const auto r = consensus_certificate(q);
  CHECK(r.lhs == doctest::Approx(arctan_tail(2, 2.0)).epsilon(1e-9));

  q.family = BallIndicatorFamily{kInf};
  const auto u = consensus_certificate(q);
  CHECK_EQ(u.verdict, Verdict::Unconditional);
}

TEST_CASE("shifted-power profile: hand-integrated values") {
  CertificateQuery q;
  q.agents = 2;
  q.V0 = 1.0;
  q.kernel = KernelSpec::power_law(1.0);
  q.gamma = 1.0;
  q.family = ShiftedPowerTailFamily{4.0, 2.0};

  // lower = 1 inside the ball: (2 - 1) + 1/(2 * (2-1)) = 1.5
  q.X0 = 1.0;
  const auto inside = consensus_certificate(q);
  CHECK(inside.lhs - arctan_tail(2, 1.0) == doctest::Approx(1.5).epsilon(1e-9));

  // lower = 3 beyond the ball: (2*3 - 4 + 1)^(1-2) / (2 * (2-1)) = 1/6
  q.X0 = 9.0;
  const auto beyond = consensus_certificate(q);
  CHECK(beyond.lhs - arctan_tail(2, 3.0) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-9));
}

TEST_CASE("shifted-power profile: the two branches meet at the ball edge") {
  CertificateQuery q;
  q.agents = 20;
  q.V0 = 1.0;
  q.kernel = KernelSpec::power_law(1.0);
  q.gamma = 0.7;
  q.family = ShiftedPowerTailFamily{3.0, 2.5};
  const double crossover = 3.0 / std::sqrt(40.0);
  const double X_edge = crossover * crossover;
  q.X0 = X_edge * (1.0 - 1e-12);
  const double lo = consensus_certificate(q).lhs;
  q.X0 = X_edge * (1.0 + 1e-12);
  const double hi = consensus_certificate(q).lhs;
  CHECK(std::fabs(lo - hi) < 1e-10);
}

TEST_CASE("shifted-power profile tends to the ball indicator for huge exponents") {
  CertificateQuery q;
  q.agents = 2;
  q.X0 = 1.0;
  q.V0 = 1.0;
  q.kernel = KernelSpec::power_law(1.0);
  q.gamma = 1.0;
  q.family = ShiftedPowerTailFamily{4.0, 1e6};
  const double sp = consensus_certificate(q).lhs;
  q.family = BallIndicatorFamily{4.0};
  const double ball = consensus_certificate(q).lhs;
  CHECK(std::fabs(sp - ball) < 1e-5);
  CHECK_GE(sp, ball);  // the profile dominates the indicator
}

TEST_CASE("shifted-power profile dominates the ball indicator everywhere") {
  for (const double theta : {1.5, 2.0, 10.0}) {
    for (const double X0 : {0.25, 1.0, 4.0, 16.0}) {
      CertificateQuery q;
      q.agents = 5;
      q.X0 = X0;
      q.V0 = 1.0;
      q.kernel = KernelSpec::power_law(1.0);
      q.gamma = 1.0;
      q.family = ShiftedPowerTailFamily{2.0, theta};
      const double sp = consensus_certificate(q).lhs;
      q.family = BallIndicatorFamily{2.0};
      const double ball = consensus_certificate(q).lhs;
      CHECK_GE(sp, ball - 1e-12);
    }
  }
}

TEST_CASE("shifted-power profile rejects non-integrable exponents") {
  CertificateQuery q;
  q.agents = 2;
  q.X0 = 1.0;
  q.V0 = 1.0;
  q.gamma = 1.0;
  q.family = ShiftedPowerTailFamily{4.0, 1.0};
  CHECK_THROWS_AS(consensus_certificate(q), std::domain_error);
  q.family = ShiftedPowerTailFamily{4.0, 0.5};
  CHECK_THROWS_AS(consensus_certificate(q), std::domain_error);
}

TEST_CASE("algebraic profile matches the kernel tail machinery") {
  CertificateQuery q;
  q.agents = 3;
  q.X0 = 0.49;
  q.V0 = 1.0;
  q.kernel = KernelSpec::power_law(1.0);
  q.gamma = 2.0;
  q.family = AlgebraicTailFamily{1.3};
  const auto r = consensus_certificate(q);
  const auto kernel_part = kernel_tail_integral(KernelSpec::power_law(1.0), 0.7, 3);
  const auto control_part = kernel_tail_integral(KernelSpec::power_law(1.3), 0.7, 3);
  // gamma * N / eta = 2 * 3/3 = 2
  CHECK(r.lhs == doctest::Approx(kernel_part.value + 2.0 * control_part.value)
                     .epsilon(1e-10));

  q.family = AlgebraicTailFamily{0.5};
  CHECK_EQ(consensus_certificate(q).verdict, Verdict::Unconditional);
}

TEST_CASE("a tighter normalization bound scales the control contribution") {
  CertificateQuery q;
  q.agents = 4;
  q.X0 = 1.0;
  q.V0 = 1.0;
  q.kernel = KernelSpec::power_law(1.0);
  q.gamma = 1.0;
  q.family = BallIndicatorFamily{8.0};
  const double base = consensus_certificate(q).lhs;
  const double kernel_part = arctan_tail(4, 1.0);
  q.eta_bound = 1.0;
  const double tight = consensus_certificate(q).lhs;
  CHECK(tight - kernel_part ==
        doctest::Approx(4.0 * (base - kernel_part)).epsilon(1e-9));
}

TEST_CASE("certified boundary is monotone in the initial spread") {
  const std::vector<double> X = {0.25, 0.5, 1.0, 2.0, 4.0};
  const auto b =
      certified_boundary(2, KernelSpec::power_law(1.0), 0.0, NoControlFamily{}, X);
  REQUIRE_EQ(b.size(), X.size());
  for (std::size_t i = 1; i < b.size(); ++i) CHECK_LE(b[i], b[i - 1]);

  const auto u =
      certified_boundary(2, KernelSpec::power_law(0.5), 0.0, NoControlFamily{}, X);
  for (const double v : u) CHECK(std::isinf(v));
}

TEST_CASE("query validation") {
  CertificateQuery q;
  q.agents = 1;
  CHECK_THROWS_AS(consensus_certificate(q), std::invalid_argument);
  q = CertificateQuery{};
  q.X0 = -1.0;
  CHECK_THROWS_AS(consensus_certificate(q), std::invalid_argument);
  q = CertificateQuery{};
  q.gamma = -0.5;
  CHECK_THROWS_AS(consensus_certificate(q), std::invalid_argument);
  q = CertificateQuery{};
  q.eta_bound = 5.0;  // exceeds the agent count (2)
  CHECK_THROWS_AS(consensus_certificate(q), std::invalid_argument);
  q = CertificateQuery{};
  q.eta_bound = 0.5;  // below one
  CHECK_THROWS_AS(consensus_certificate(q), std::invalid_argument);
}

TEST_CASE("holds exactly when the margin is non-negative") {
  // V0 slightly below and above the frozen threshold
  auto r = consensus_certificate(2, 1.0, 0.0537, KernelSpec::power_law(1.0));
  CHECK_EQ(r.verdict, Verdict::Holds);
  CHECK_GE(r.margin, 0.0);
  r = consensus_certificate(2, 1.0, 0.0538, KernelSpec::power_law(1.0));
  CHECK_EQ(r.verdict, Verdict::Fails);
  CHECK_LT(r.margin, 0.0);
}

}  // TEST_SUITE
