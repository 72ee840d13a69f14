#include "flocklab/integrator.hpp"

#include <cmath>
#include <string>

#include "flocklab/detail/control_eval.hpp"
#include "flocklab/functionals.hpp"
#include "flocklab/simd/ops.hpp"

namespace flocklab {

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("sim: dt must be finite and > 0");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("sim: horizon must be finite and > 0");
  if (dt > horizon) throw std::invalid_argument("sim: dt exceeds horizon");
  if (record_stride == 0) throw std::invalid_argument("sim: record_stride must be >= 1");
  if (!(consensus_threshold > 0.0))
    throw std::invalid_argument("sim: consensus threshold must be > 0");
}

std::size_t SimConfig::step_count() const {
  const auto n = static_cast<std::size_t>(std::llround(horizon / dt));
  return n == 0 ? 1 : n;
}

IntegrationBlowup::IntegrationBlowup(std::size_t step)
    : std::runtime_error("integration blew up at step " + std::to_string(step)),
      step_(step) {}

namespace {

struct Workspace {
  detail::ControlWorkspace ctrl;
  AgentArray u;
  FlockState k1, k2, k3, k4, stage;
  std::vector<double> row;   // kernel row
  std::vector<double> acc;   // per-component accumulator
  std::vector<double> dev;   // deviation buffer for dispersion

  void resize(std::size_t n, std::size_t d) {
    auto fit = [&](FlockState& s) {
      if (s.agents() != n || s.dim() != d) s = FlockState::zeros(n, d);
    };
    fit(k1); fit(k2); fit(k3); fit(k4); fit(stage);
    row.resize(n);
    acc.resize(d);
    dev.resize(n);
  }
};

void rhs_into(const FlockState& s, const KernelSpec& kernel,
              const ControllerSpec& control, double t, Workspace& ws,
              FlockState& out) {
  const std::size_t n = s.agents();
  const std::size_t d = s.dim();
  const auto& ops = simd::active_ops();
  if (out.agents() != n || out.dim() != d) out = FlockState::zeros(n, d);

  detail::evaluate_control_into(s, control, t, ws.ctrl, ws.u);

  // dx_i/dt = v_i
  out.positions = s.velocities;

  const double* xs = s.positions.data();
  const double* vs = s.velocities.data();
  const double inv_n = 1.0 / static_cast<double>(n);
  const bool powerlaw = kernel.is_power_law();
  const double delta = powerlaw ? kernel.power_law_exponent() : 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    if (powerlaw) {
      ops.powerlaw_row(xs, n, d, i, delta, ws.row.data());
    } else {
      ops.distance_row(xs, n, d, i, ws.row.data());
      for (std::size_t j = 0; j < n; ++j) ws.row[j] = kernel(ws.row[j]);
    }
    ops.weighted_diff(vs, ws.row.data(), n, d, i, ws.acc.data());
    for (std::size_t k = 0; k < d; ++k)
      out.velocities(i, k) = inv_n * ws.acc[k] + ws.u(i, k);
  }
}

// out = s + h*k (positions and velocities alike)
void add_scaled(const FlockState& s, double h, const FlockState& k, FlockState& out) {
  const std::size_t m = s.positions.value_count();
  const double* sp = s.positions.data();
  const double* sv = s.velocities.data();
  const double* kp = k.positions.data();
  const double* kv = k.velocities.data();
  double* op = out.positions.data();
  double* ov = out.velocities.data();
  for (std::size_t i = 0; i < m; ++i) {
    op[i] = sp[i] + h * kp[i];
    ov[i] = sv[i] + h * kv[i];
  }
}

void rk4_step_into(const FlockState& s, double t, double dt,
                   const KernelSpec& kernel, const ControllerSpec& control,
                   Workspace& ws, FlockState& out) {
  const std::size_t n = s.agents();
  const std::size_t d = s.dim();
  ws.resize(n, d);
  if (out.agents() != n || out.dim() != d) out = FlockState::zeros(n, d);

  rhs_into(s, kernel, control, t, ws, ws.k1);
  add_scaled(s, 0.5 * dt, ws.k1, ws.stage);
  rhs_into(ws.stage, kernel, control, t + 0.5 * dt, ws, ws.k2);
  add_scaled(s, 0.5 * dt, ws.k2, ws.stage);
  rhs_into(ws.stage, kernel, control, t + 0.5 * dt, ws, ws.k3);
  add_scaled(s, dt, ws.k3, ws.stage);
  rhs_into(ws.stage, kernel, control, t + dt, ws, ws.k4);

  const double w1 = dt / 6.0;
  const double w2 = dt / 3.0;
  const std::size_t m = s.positions.value_count();
  const double* sp = s.positions.data();
  const double* sv = s.velocities.data();
  double* op = out.positions.data();
  double* ov = out.velocities.data();
  auto combine = [&](const double* k1, const double* k2, const double* k3,
                     const double* k4, const double* base, double* dst) {
    for (std::size_t i = 0; i < m; ++i)
      dst[i] = base[i] + w1 * (k1[i] + k4[i]) + w2 * (k2[i] + k3[i]);
  };
  combine(ws.k1.positions.data(), ws.k2.positions.data(), ws.k3.positions.data(),
          ws.k4.positions.data(), sp, op);
  combine(ws.k1.velocities.data(), ws.k2.velocities.data(), ws.k3.velocities.data(),
          ws.k4.velocities.data(), sv, ov);
}

// Deviation-form mean squared deviation without allocating.
double msd_into(const AgentArray& a, const simd::Ops& ops, std::vector<double>& buf) {
  const std::size_t n = a.agents();
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t k = 0; k < a.dim(); ++k) {
    const double* src = a.component(k);
    const double mean = ops.sum(src, n) * inv_n;
    for (std::size_t i = 0; i < n; ++i) buf[i] = src[i] - mean;
    total += ops.sum_sq(buf.data(), n);
  }
  return total * inv_n;
}

}  // namespace

FlockState rhs(const FlockState& s, const KernelSpec& kernel,
               const ControllerSpec& control, double t) {
  s.validate();
  validate(control);
  Workspace ws;
  ws.resize(s.agents(), s.dim());
  FlockState out;
  rhs_into(s, kernel, control, t, ws, out);
  return out;
}

FlockState rk4_step(const FlockState& s, double t, double dt,
                    const KernelSpec& kernel, const ControllerSpec& control,
                    std::size_t step_index) {
  s.validate();
  validate(control);
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("rk4: dt must be finite and > 0");
  Workspace ws;
  FlockState out;
  rk4_step_into(s, t, dt, kernel, control, ws, out);
  if (!out.positions.all_finite() || !out.velocities.all_finite())
    throw IntegrationBlowup(step_index);
  return out;
}

Trajectory simulate(const FlockState& initial, const KernelSpec& kernel,
                    const ControllerSpec& control, const SimConfig& config) {
  initial.validate();
  validate(control);
  config.validate();

  const std::size_t n = initial.agents();
  const std::size_t d = initial.dim();
  const std::size_t steps = config.step_count();
  const auto& ops = simd::active_ops();

  Workspace ws;
  ws.resize(n, d);

  Trajectory traj;
  FlockState state = initial;
  FlockState next = FlockState::zeros(n, d);

  auto record = [&](double t, const FlockState& s) {
    traj.times.push_back(t);
    traj.position_dispersion.push_back(msd_into(s.positions, ops, ws.dev));
    traj.velocity_dispersion.push_back(msd_into(s.velocities, ops, ws.dev));
    std::vector<double> vbar(d);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < d; ++k)
      vbar[k] = ops.sum(s.velocities.component(k), n) * inv_n;
    traj.mean_velocity.push_back(std::move(vbar));
    if (config.record_snapshots) traj.snapshots.push_back(s);
  };

  double v_disp = msd_into(state.velocities, ops, ws.dev);
  if (v_disp <= config.consensus_threshold) traj.first_crossing_time = 0.0;
  record(0.0, state);

  for (std::size_t step = 1; step <= steps; ++step) {
    const double t = static_cast<double>(step - 1) * config.dt;
    rk4_step_into(state, t, config.dt, kernel, control, ws, next);
    std::swap(state, next);

    v_disp = msd_into(state.velocities, ops, ws.dev);
    if (!std::isfinite(v_disp) || !state.positions.all_finite() ||
        !state.velocities.all_finite())
      throw IntegrationBlowup(step);

    const double now = static_cast<double>(step) * config.dt;
    if (!traj.first_crossing_time && v_disp <= config.consensus_threshold)
      traj.first_crossing_time = now;
    if (step % config.record_stride == 0 || step == steps) record(now, state);
  }

  traj.consensus = v_disp <= config.consensus_threshold;
  traj.final_state = std::move(state);
  return traj;
}

DecayReport decay_monitor(const Trajectory& traj, const KernelSpec& kernel,
                          const ControllerSpec& control) {
  if (traj.snapshots.size() != traj.times.size() || traj.snapshots.size() < 3)
    throw std::invalid_argument(
        "decay_monitor: needs a trajectory recorded with snapshots (>= 3 records)");

  DecayReport report;
  const std::size_t records = traj.times.size();

  double alpha_scale = 0.0;
  double beta_scale = 0.0;

  for (std::size_t m = 1; m + 1 < records; ++m) {
    const FlockState& s = traj.snapshots[m];
    const std::size_t n = s.agents();
    const auto disp = dispersion(s);
    const PerturbationForm form = perturbation_form(s, control, traj.times[m]);
    alpha_scale = std::max(alpha_scale, form.alpha);
    beta_scale = std::max(beta_scale, form.beta);

    const AgentArray vdev = deviations(s.velocities);
    double cross = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < s.dim(); ++k)
        cross += form.delta(i, k) * vdev(i, k);

    const double a_far =
        kernel(std::sqrt(2.0 * static_cast<double>(n) * disp.X));
    const double bound = -2.0 * a_far * disp.V - 2.0 * form.alpha * disp.V +
                         2.0 * form.beta * cross / static_cast<double>(n);

    // Non-uniform three-point slope (the last record interval may be short).
    const double h0 = traj.times[m] - traj.times[m - 1];
    const double h1 = traj.times[m + 1] - traj.times[m];
    const double f0 = traj.velocity_dispersion[m - 1];
    const double f1 = traj.velocity_dispersion[m];
    const double f2 = traj.velocity_dispersion[m + 1];
    const double observed =
        (f2 * h0 * h0 - f0 * h1 * h1 + f1 * (h1 * h1 - h0 * h0)) /
        (h0 * h1 * (h0 + h1));

    report.times.push_back(traj.times[m]);
    report.observed.push_back(observed);
    report.bound.push_back(bound);
    report.residual.push_back(observed - bound);
  }

  double max_gap = 0.0;
  for (std::size_t m = 1; m < records; ++m)
    max_gap = std::max(max_gap, traj.times[m] - traj.times[m - 1]);
  const double rate = 2.0 * (kernel.upper_bound() + alpha_scale + beta_scale);
  report.stride_warning = rate * max_gap > 0.5;
  return report;
}

}  // namespace flocklab
