#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "flocklab/array.hpp"
#include "flocklab/state.hpp"

namespace flocklab {

struct NoController {};

/// u_i = gamma * (vbar - v_i)
struct UniformController {
  double gamma = 1.0;
};

/// u_i = gamma * q * (v_leader - v_i); the leader itself is uncontrolled.
/// q in (0,1] is the weight the per-agent reference mean puts on the leader.
struct LeaderController {
  double gamma = 1.0;
  double q = 0.5;
  std::size_t leader = 0;
};

/// u_i = alpha (vbar - v_i) + beta sum_j w_ij (v_j - vbar), with w built from
/// the algebraic profile (1+r^2)^(-epsilon) normalized by its largest row sum.
/// Weights are rebuilt from the current positions at every evaluation.
struct WeightedPerturbationController {
  double alpha = 1.0;
  double beta = 0.1;
  double epsilon = 1.0;
};

enum class LocalNormalization {
  Exact,            // divide by the agent's own neighbor count
  MaxNeighborCount  // divide by the largest neighbor count in the group
};

/// Feedback toward the mean velocity over the closed ball of given radius.
///   Exact:            u_i = gamma * (local_mean_i - v_i)
///   MaxNeighborCount: u_i = (gamma / eta_R) sum_{j in ball} (v_j - v_i)
struct LocalRadiusController {
  double gamma = 1.0;
  double radius = 1.0;  // may be +inf; then both modes equal the uniform law
  LocalNormalization normalization = LocalNormalization::MaxNeighborCount;
};

/// Deviation rules for the general alpha/beta family below.
struct ConstantDeviation {
  std::vector<double> value;  // one d-vector shared by all agents
};
struct ScaledOwnDeviation {
  double epsilon = 0.1;  // delta_i = epsilon * (v_i - vbar)
};
struct TabulatedDeviation {
  std::vector<double> times;                // strictly increasing
  std::vector<std::vector<double>> values;  // one d-vector per time, linear in between
};
using DeviationProvider =
    std::variant<ConstantDeviation, ScaledOwnDeviation, TabulatedDeviation>;

/// u_i = alpha (vbar - v_i) + beta delta_i with delta from a named rule.
struct GeneralPerturbedController {
  double alpha = 1.0;
  double beta = 0.0;
  DeviationProvider deviation = ScaledOwnDeviation{};
};

using ControllerSpec =
    std::variant<NoController, UniformController, LeaderController,
                 WeightedPerturbationController, LocalRadiusController,
                 GeneralPerturbedController>;

/// Parameter-range checks; throws std::invalid_argument.
void validate(const ControllerSpec& c);

/// Control vector u_i for every agent at time t.
AgentArray evaluate_control(const FlockState& s, const ControllerSpec& c, double t);

/// Interaction weights w_ij = phi(r_ij)/eta with phi(r) = (1+r^2)^(-epsilon)
/// and eta the largest row sum of phi. The result is symmetric, entrywise
/// positive, and its largest row sum is 1 (up to roundoff).
struct PhiWeights {
  SquareMatrix w;
  double eta;
};
PhiWeights build_weights_phi(const FlockState& s, double epsilon);

/// u_i = alpha (vbar - v_i) + beta sum_j w_ij (v_j - vbar) for an explicit
/// weight matrix.
AgentArray control_weighted(const FlockState& s, const SquareMatrix& w,
                            double alpha, double beta);

/// Mean velocity over the closed ball around agent i (the agent itself always
/// counts, so the set is never empty).
std::vector<double> local_mean_velocity(const FlockState& s, std::size_t i, double radius);

/// min entry, largest row sum, and — when beta > 0 — the decay witness
/// S - N*I - alpha/beta. Negative witness certifies exponential velocity-
/// dispersion decay for the weighted law. Asking for the witness with
/// beta <= 0 is reported by leaving it empty; require_decay_bound() throws.
struct WeightDiagnostics {
  double min_entry = 0.0;
  double max_row_sum = 0.0;
  std::optional<double> decay_bound;
  double require_decay_bound() const;
};
WeightDiagnostics weight_diagnostics(const SquareMatrix& w, double alpha, double beta);

/// Every controller factors as u_i = alpha (vbar - v_i) + beta delta_i; this
/// returns that factorization at the given state and time. The group mean of
/// delta drives the mean velocity: d/dt vbar = beta * deltabar.
struct PerturbationForm {
  double alpha = 0.0;
  double beta = 0.0;
  AgentArray delta;
};
PerturbationForm perturbation_form(const FlockState& s, const ControllerSpec& c, double t);

}  // namespace flocklab
