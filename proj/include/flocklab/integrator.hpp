#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "flocklab/controllers.hpp"
#include "flocklab/kernel.hpp"
#include "flocklab/state.hpp"

namespace flocklab {

struct SimConfig {
  double dt = 0.01;
  double horizon = 20.0;
  std::size_t record_stride = 10;
  double consensus_threshold = 1e-5;
  bool record_snapshots = false;

  void validate() const;
  /// Number of fixed steps actually taken: round(horizon/dt), at least 1.
  std::size_t step_count() const;
};

/// A step produced a non-finite state (the step size is too coarse for the
/// feedback strength). Carries the 1-based index of the offending step.
class IntegrationBlowup : public std::runtime_error {
 public:
  explicit IntegrationBlowup(std::size_t step);
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Time derivative of the state: positions move with the velocities; each
/// velocity relaxes toward the others through the kernel (mean-normalized)
/// plus the control term.
FlockState rhs(const FlockState& s, const KernelSpec& kernel,
               const ControllerSpec& control, double t);

/// One classical fourth-order step of size dt from time t. Control weights
/// and neighborhoods are rebuilt at every stage. Throws IntegrationBlowup
/// (tagged with step_index) when the result is non-finite.
FlockState rk4_step(const FlockState& s, double t, double dt,
                    const KernelSpec& kernel, const ControllerSpec& control,
                    std::size_t step_index = 1);

struct Trajectory {
  std::vector<double> times;
  std::vector<double> position_dispersion;            // X at recorded times
  std::vector<double> velocity_dispersion;            // V at recorded times
  std::vector<std::vector<double>> mean_velocity;     // vbar at recorded times
  std::vector<FlockState> snapshots;                  // only if requested
  FlockState final_state;
  bool consensus = false;                              // V(T) <= threshold
  std::optional<double> first_crossing_time;           // earliest step with V <= threshold
};

/// Fixed-step integration with periodic records (step 0, every record_stride
/// steps, and the final step). The threshold crossing is checked every step.
Trajectory simulate(const FlockState& initial, const KernelSpec& kernel,
                    const ControllerSpec& control, const SimConfig& config);

/// Dissipation audit along a trajectory recorded with snapshots: at each
/// interior record, compares the finite-difference slope of V with
///   -2 a(sqrt(2N X)) V - 2 alpha V + (2 beta / N) sum_i <delta_i, v_i - vbar>
/// evaluated from the snapshot. residual = observed - bound; when the theory
/// applies the residual stays below a small finite-difference slack.
struct DecayReport {
  std::vector<double> times;
  std::vector<double> observed;
  std::vector<double> bound;
  std::vector<double> residual;
  bool stride_warning = false;  // records too far apart to difference honestly
};
DecayReport decay_monitor(const Trajectory& traj, const KernelSpec& kernel,
                          const ControllerSpec& control);

}  // namespace flocklab
