#include "flocklab/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flocklab/detail/control_eval.hpp"
#include "flocklab/functionals.hpp"
#include "flocklab/simd/ops.hpp"

namespace flocklab {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }
bool finite_nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }

void validate_provider(const DeviationProvider& p) {
  if (const auto* c = std::get_if<ConstantDeviation>(&p)) {
    require(!c->value.empty(), "controller: constant deviation needs a vector");
    for (double v : c->value)
      require(std::isfinite(v), "controller: non-finite deviation entry");
  } else if (const auto* s = std::get_if<ScaledOwnDeviation>(&p)) {
    require(finite_nonnegative(s->epsilon), "controller: epsilon must be >= 0");
  } else {
    const auto& tab = std::get<TabulatedDeviation>(p);
    require(!tab.times.empty() && tab.times.size() == tab.values.size(),
            "controller: deviation table sizes mismatch");
    for (std::size_t i = 0; i < tab.times.size(); ++i) {
      require(std::isfinite(tab.times[i]), "controller: non-finite table time");
      require(i == 0 || tab.times[i] > tab.times[i - 1],
              "controller: table times must be strictly increasing");
      require(tab.values[i].size() == tab.values[0].size() && !tab.values[i].empty(),
              "controller: ragged deviation table");
      for (double v : tab.values[i])
        require(std::isfinite(v), "controller: non-finite table value");
    }
  }
}

}  // namespace

void validate(const ControllerSpec& c) {
  std::visit(
      [](const auto& ctrl) {
        using T = std::decay_t<decltype(ctrl)>;
        if constexpr (std::is_same_v<T, NoController>) {
        } else if constexpr (std::is_same_v<T, UniformController>) {
          require(finite_positive(ctrl.gamma), "controller: gamma must be > 0");
        } else if constexpr (std::is_same_v<T, LeaderController>) {
          require(finite_positive(ctrl.gamma), "controller: gamma must be > 0");
          require(std::isfinite(ctrl.q) && ctrl.q > 0.0 && ctrl.q <= 1.0,
                  "controller: q must lie in (0, 1]");
        } else if constexpr (std::is_same_v<T, WeightedPerturbationController>) {
          require(finite_positive(ctrl.alpha), "controller: alpha must be > 0");
          require(finite_nonnegative(ctrl.beta), "controller: beta must be >= 0");
          require(finite_nonnegative(ctrl.epsilon), "controller: epsilon must be >= 0");
        } else if constexpr (std::is_same_v<T, LocalRadiusController>) {
          require(finite_positive(ctrl.gamma), "controller: gamma must be > 0");
          require(!std::isnan(ctrl.radius) && ctrl.radius >= 0.0,
                  "controller: radius must be >= 0");
        } else if constexpr (std::is_same_v<T, GeneralPerturbedController>) {
          require(finite_nonnegative(ctrl.alpha), "controller: alpha must be >= 0");
          require(finite_nonnegative(ctrl.beta), "controller: beta must be >= 0");
          validate_provider(ctrl.deviation);
        }
      },
      c);
}

namespace detail {

void ControlWorkspace::resize(std::size_t n, std::size_t d) {
  row.resize(n);
  rowsum.resize(n);
  mean.assign(d, 0.0);
  acc.assign(d, 0.0);
  if (vdev.agents() != n || vdev.dim() != d) vdev = AgentArray(n, d);
}

namespace {

void group_mean(const AgentArray& v, std::vector<double>& mean) {
  const auto& ops = simd::active_ops();
  const double inv_n = 1.0 / static_cast<double>(v.agents());
  for (std::size_t k = 0; k < v.dim(); ++k)
    mean[k] = ops.sum(v.component(k), v.agents()) * inv_n;
}

void velocity_deviations(const AgentArray& v, const std::vector<double>& mean,
                         AgentArray& dev) {
  for (std::size_t k = 0; k < v.dim(); ++k) {
    const double* src = v.component(k);
    double* dst = dev.component(k);
    for (std::size_t i = 0; i < v.agents(); ++i) dst[i] = src[i] - mean[k];
  }
}

// delta(t) for the tabulated rule, clamped to the table's span.
void tabulated_at(const TabulatedDeviation& tab, double t, std::vector<double>& out) {
  const auto& ts = tab.times;
  out.assign(tab.values[0].size(), 0.0);
  const std::vector<double>* lo = &tab.values.front();
  const std::vector<double>* hi = lo;
  double f = 0.0;
  if (t >= ts.back()) {
    lo = hi = &tab.values.back();
  } else if (t > ts.front()) {
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const std::size_t h = static_cast<std::size_t>(it - ts.begin());
    lo = &tab.values[h - 1];
    hi = &tab.values[h];
    f = (t - ts[h - 1]) / (ts[h] - ts[h - 1]);
  }
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = (*lo)[k] + f * ((*hi)[k] - (*lo)[k]);
}

}  // namespace

void evaluate_control_into(const FlockState& s, const ControllerSpec& c, double t,
                           ControlWorkspace& ws, AgentArray& out) {
  const std::size_t n = s.agents();
  const std::size_t d = s.dim();
  const auto& ops = simd::active_ops();
  if (out.agents() != n || out.dim() != d) out = AgentArray(n, d);
  ws.resize(n, d);

  if (std::holds_alternative<NoController>(c)) {
    out.fill(0.0);
    return;
  }

  if (const auto* u = std::get_if<UniformController>(&c)) {
    group_mean(s.velocities, ws.mean);
    for (std::size_t k = 0; k < d; ++k) {
      const double* vk = s.velocities.component(k);
      double* ok = out.component(k);
      const double m = ws.mean[k];
      for (std::size_t i = 0; i < n; ++i) ok[i] = u->gamma * (m - vk[i]);
    }
    return;
  }

  if (const auto* l = std::get_if<LeaderController>(&c)) {
    if (l->leader >= n) throw std::invalid_argument("controller: leader index out of range");
    const double gq = l->gamma * l->q;
    for (std::size_t k = 0; k < d; ++k) {
      const double* vk = s.velocities.component(k);
      double* ok = out.component(k);
      const double vl = vk[l->leader];
      for (std::size_t i = 0; i < n; ++i) ok[i] = gq * (vl - vk[i]);
    }
    return;
  }

  if (const auto* wp = std::get_if<WeightedPerturbationController>(&c)) {
    group_mean(s.velocities, ws.mean);
    velocity_deviations(s.velocities, ws.mean, ws.vdev);
    const double* xs = s.positions.data();
    double eta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ops.powerlaw_row(xs, n, d, i, wp->epsilon, ws.row.data());
      ws.rowsum[i] = ops.sum(ws.row.data(), n);
      eta = std::max(eta, ws.rowsum[i]);
    }
    const double scale = wp->beta / eta;
    for (std::size_t i = 0; i < n; ++i) {
      ops.powerlaw_row(xs, n, d, i, wp->epsilon, ws.row.data());
      ops.weighted_diff(ws.vdev.data(), ws.row.data(), n, d, i, ws.acc.data());
      for (std::size_t k = 0; k < d; ++k) {
        const double vdev_i = ws.vdev(i, k);
        out(i, k) = -wp->alpha * vdev_i +
                    scale * (ws.acc[k] + ws.rowsum[i] * vdev_i);
      }
    }
    return;
  }

  if (const auto* lr = std::get_if<LocalRadiusController>(&c)) {
    const double* xs = s.positions.data();
    const double* vs = s.velocities.data();
    if (lr->normalization == LocalNormalization::Exact) {
      for (std::size_t i = 0; i < n; ++i) {
        ops.ball_row(xs, n, d, i, lr->radius, ws.row.data());
        const double count = ops.sum(ws.row.data(), n);
        ops.weighted_diff(vs, ws.row.data(), n, d, i, ws.acc.data());
        const double g = lr->gamma / count;
        for (std::size_t k = 0; k < d; ++k) out(i, k) = g * ws.acc[k];
      }
      return;
    }
    double eta = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      ops.ball_row(xs, n, d, i, lr->radius, ws.row.data());
      eta = std::max(eta, ops.sum(ws.row.data(), n));
    }
    const double g = lr->gamma / eta;
    for (std::size_t i = 0; i < n; ++i) {
      ops.ball_row(xs, n, d, i, lr->radius, ws.row.data());
      ops.weighted_diff(vs, ws.row.data(), n, d, i, ws.acc.data());
      for (std::size_t k = 0; k < d; ++k) out(i, k) = g * ws.acc[k];
    }
    return;
  }

  const auto& gp = std::get<GeneralPerturbedController>(c);
  group_mean(s.velocities, ws.mean);
  if (const auto* cd = std::get_if<ConstantDeviation>(&gp.deviation)) {
    if (cd->value.size() != d)
      throw std::invalid_argument("controller: deviation dimension mismatch");
    for (std::size_t k = 0; k < d; ++k) {
      const double* vk = s.velocities.component(k);
      double* ok = out.component(k);
      const double base = gp.beta * cd->value[k];
      for (std::size_t i = 0; i < n; ++i)
        ok[i] = gp.alpha * (ws.mean[k] - vk[i]) + base;
    }
    return;
  }
  if (const auto* sd = std::get_if<ScaledOwnDeviation>(&gp.deviation)) {
    const double coeff = gp.beta * sd->epsilon;
    for (std::size_t k = 0; k < d; ++k) {
      const double* vk = s.velocities.component(k);
      double* ok = out.component(k);
      const double m = ws.mean[k];
      for (std::size_t i = 0; i < n; ++i)
        ok[i] = gp.alpha * (m - vk[i]) + coeff * (vk[i] - m);
    }
    return;
  }
  const auto& tab = std::get<TabulatedDeviation>(gp.deviation);
  if (tab.values[0].size() != d)
    throw std::invalid_argument("controller: deviation dimension mismatch");
  tabulated_at(tab, t, ws.acc);
  for (std::size_t k = 0; k < d; ++k) {
    const double* vk = s.velocities.component(k);
    double* ok = out.component(k);
    const double base = gp.beta * ws.acc[k];
    for (std::size_t i = 0; i < n; ++i)
      ok[i] = gp.alpha * (ws.mean[k] - vk[i]) + base;
  }
}

}  // namespace detail

AgentArray evaluate_control(const FlockState& s, const ControllerSpec& c, double t) {
  detail::ControlWorkspace ws;
  AgentArray out;
  detail::evaluate_control_into(s, c, t, ws, out);
  return out;
}

PhiWeights build_weights_phi(const FlockState& s, double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("weights: epsilon must be finite and >= 0");
  const std::size_t n = s.agents();
  const auto& ops = simd::active_ops();
  SquareMatrix w(n);
  double eta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ops.powerlaw_row(s.positions.data(), n, s.dim(), i, epsilon, w.row(i));
    eta = std::max(eta, ops.sum(w.row(i), n));
  }
  const double inv = 1.0 / eta;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w(i, j) *= inv;
  return {std::move(w), eta};
}

AgentArray control_weighted(const FlockState& s, const SquareMatrix& w,
                            double alpha, double beta) {
  const std::size_t n = s.agents();
  const std::size_t d = s.dim();
  if (w.size() != n) throw std::invalid_argument("control_weighted: weight size mismatch");
  const AgentArray vdev = deviations(s.velocities);
  const auto& ops = simd::active_ops();
  AgentArray out(n, d);
  std::vector<double> acc(d);
  for (std::size_t i = 0; i < n; ++i) {
    ops.weighted_diff(vdev.data(), w.row(i), n, d, i, acc.data());
    const double rowsum = ops.sum(w.row(i), n);
    for (std::size_t k = 0; k < d; ++k)
      out(i, k) = -alpha * vdev(i, k) + beta * (acc[k] + rowsum * vdev(i, k));
  }
  return out;
}

std::vector<double> local_mean_velocity(const FlockState& s, std::size_t i, double radius) {
  const std::size_t n = s.agents();
  if (i >= n) throw std::invalid_argument("local_mean: agent index out of range");
  if (std::isnan(radius) || radius < 0.0)
    throw std::invalid_argument("local_mean: radius must be >= 0");
  const auto& ops = simd::active_ops();
  std::vector<double> row(n), mean(s.dim());
  ops.ball_row(s.positions.data(), n, s.dim(), i, radius, row.data());
  const double count = ops.sum(row.data(), n);
  ops.weighted_diff(s.velocities.data(), row.data(), n, s.dim(), i, mean.data());
  for (std::size_t k = 0; k < s.dim(); ++k)
    mean[k] = s.velocities(i, k) + mean[k] / count;
  return mean;
}

double WeightDiagnostics::require_decay_bound() const {
  if (!decay_bound)
    throw std::domain_error("weight diagnostics: decay bound undefined for beta = 0");
  return *decay_bound;
}

WeightDiagnostics weight_diagnostics(const SquareMatrix& w, double alpha, double beta) {
  const std::size_t n = w.size();
  if (n == 0) throw std::invalid_argument("weight diagnostics: empty matrix");
  if (beta < 0.0) throw std::invalid_argument("weight diagnostics: beta must be >= 0");
  WeightDiagnostics diag;
  diag.min_entry = w(0, 0);
  diag.max_row_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double rowsum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      diag.min_entry = std::min(diag.min_entry, w(i, j));
      rowsum += w(i, j);
    }
    diag.max_row_sum = std::max(diag.max_row_sum, rowsum);
  }
  if (beta > 0.0)
    diag.decay_bound = diag.max_row_sum -
                       static_cast<double>(n) * diag.min_entry - alpha / beta;
  return diag;
}

PerturbationForm perturbation_form(const FlockState& s, const ControllerSpec& c, double t) {
  const std::size_t n = s.agents();
  const std::size_t d = s.dim();
  PerturbationForm form;
  form.delta = AgentArray(n, d);

  if (std::holds_alternative<NoController>(c)) return form;

  if (const auto* u = std::get_if<UniformController>(&c)) {
    form.alpha = u->gamma;
    return form;
  }

  const AgentArray vdev = deviations(s.velocities);

  if (const auto* l = std::get_if<LeaderController>(&c)) {
    if (l->leader >= n) throw std::invalid_argument("controller: leader index out of range");
    form.alpha = l->gamma;
    form.beta = l->gamma;
    for (std::size_t k = 0; k < d; ++k) {
      const double lead = vdev(l->leader, k);
      for (std::size_t i = 0; i < n; ++i)
        form.delta(i, k) = (1.0 - l->q) * vdev(i, k) + l->q * lead;
    }
    return form;
  }

  if (const auto* wp = std::get_if<WeightedPerturbationController>(&c)) {
    const PhiWeights pw = build_weights_phi(s, wp->epsilon);
    form.alpha = wp->alpha;
    form.beta = wp->beta;
    const auto& ops = simd::active_ops();
    std::vector<double> acc(d);
    for (std::size_t i = 0; i < n; ++i) {
      ops.weighted_diff(vdev.data(), pw.w.row(i), n, d, i, acc.data());
      const double rowsum = ops.sum(pw.w.row(i), n);
      for (std::size_t k = 0; k < d; ++k)
        form.delta(i, k) = acc[k] + rowsum * vdev(i, k);
    }
    return form;
  }

  if (const auto* lr = std::get_if<LocalRadiusController>(&c)) {
    const auto& ops = simd::active_ops();
    std::vector<double> row(n), acc(d);
    const auto vbar = mean_vector(s.velocities);
    if (lr->normalization == LocalNormalization::Exact) {
      form.alpha = lr->gamma;
      form.beta = lr->gamma;
      for (std::size_t i = 0; i < n; ++i) {
        const auto lm = local_mean_velocity(s, i, lr->radius);
        for (std::size_t k = 0; k < d; ++k) form.delta(i, k) = lm[k] - vbar[k];
      }
      return form;
    }
    double eta = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      ops.ball_row(s.positions.data(), n, d, i, lr->radius, row.data());
      eta = std::max(eta, ops.sum(row.data(), n));
    }
    form.alpha = lr->gamma * static_cast<double>(n) / eta;
    form.beta = lr->gamma;
    for (std::size_t i = 0; i < n; ++i) {
      ops.ball_row(s.positions.data(), n, d, i, lr->radius, row.data());
      ops.weighted_diff(s.velocities.data(), row.data(), n, d, i, acc.data());
      // sum_j (1-chi)(v_i - v_j) = sum_j chi (v_j - v_i) - N (vbar - v_i)
      for (std::size_t k = 0; k < d; ++k)
        form.delta(i, k) =
            (acc[k] - static_cast<double>(n) * (vbar[k] - s.velocities(i, k))) / eta;
    }
    return form;
  }

  const auto& gp = std::get<GeneralPerturbedController>(c);
  form.alpha = gp.alpha;
  form.beta = gp.beta;
  if (const auto* cd = std::get_if<ConstantDeviation>(&gp.deviation)) {
    if (cd->value.size() != d)
      throw std::invalid_argument("controller: deviation dimension mismatch");
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t i = 0; i < n; ++i) form.delta(i, k) = cd->value[k];
    return form;
  }
  if (const auto* sd = std::get_if<ScaledOwnDeviation>(&gp.deviation)) {
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t i = 0; i < n; ++i)
        form.delta(i, k) = sd->epsilon * vdev(i, k);
    return form;
  }
  const auto& tab = std::get<TabulatedDeviation>(gp.deviation);
  if (tab.values[0].size() != d)
    throw std::invalid_argument("controller: deviation dimension mismatch");
  detail::ControlWorkspace ws;
  ws.resize(n, d);
  AgentArray u;
  detail::evaluate_control_into(s, c, t, ws, u);
  // Recover delta from the evaluated control so the clamping rule stays in
  // one place: delta_i = (u_i - alpha (vbar - v_i)) / beta, or 0 when beta = 0.
  const auto vbar = mean_vector(s.velocities);
  if (gp.beta > 0.0) {
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t i = 0; i < n; ++i)
        form.delta(i, k) =
            (u(i, k) - gp.alpha * (vbar[k] - s.velocities(i, k))) / gp.beta;
  }
  return form;
}

}  // namespace flocklab
