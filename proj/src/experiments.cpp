#include "flocklab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "flocklab/functionals.hpp"
#include "flocklab/rng.hpp"

namespace flocklab {

FlockState generate_ic(std::size_t agents, std::size_t dim, std::uint64_t seed) {
  if (agents == 0 || dim == 0)
    throw std::invalid_argument("generate_ic: agents and dim must be >= 1");
  SplitMix64 g(seed);
  FlockState s = FlockState::zeros(agents, dim);
  for (std::size_t i = 0; i < agents; ++i)
    for (std::size_t k = 0; k < dim; ++k) s.positions(i, k) = g.uniform_symmetric();
  for (std::size_t i = 0; i < agents; ++i)
    for (std::size_t k = 0; k < dim; ++k) s.velocities(i, k) = g.uniform_symmetric();
  return s;
}

FlockState rescale_ic(const FlockState& raw, double X0, double V0) {
  raw.validate();
  if (!(X0 >= 0.0) || !(V0 >= 0.0) || !std::isfinite(X0) || !std::isfinite(V0))
    throw std::invalid_argument("rescale_ic: targets must be finite and >= 0");
  const DispersionPair disp = dispersion(raw);
  if (disp.X <= 0.0 || disp.V <= 0.0) throw DegenerateSample();
  const double sx = std::sqrt(X0 / disp.X);
  const double sv = std::sqrt(V0 / disp.V);
  FlockState out = raw;
  for (std::size_t i = 0; i < raw.positions.value_count(); ++i) {
    out.positions.data()[i] *= sx;
    out.velocities.data()[i] *= sv;
  }
  return out;
}

std::uint64_t cell_seed(std::uint64_t master, std::size_t x_index,
                        std::size_t v_index, int sample) {
  constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
  std::uint64_t h = mix64(master ^ 0x8BA6E9873CF0A1BDull);
  h = mix64(h + kGolden * (static_cast<std::uint64_t>(x_index) + 1));
  h = mix64(h + kGolden * (static_cast<std::uint64_t>(v_index) + 1));
  h = mix64(h + kGolden * (static_cast<std::uint64_t>(sample) + 1));
  return h;
}

void SweepConfig::validate() const {
  if (agents < 2) throw std::invalid_argument("sweep: agents must be >= 2");
  if (dim == 0) throw std::invalid_argument("sweep: dim must be >= 1");
  if (X_values.empty() || V_values.empty())
    throw std::invalid_argument("sweep: empty grid");
  for (double x : X_values)
    if (!(x > 0.0) || !std::isfinite(x))
      throw std::invalid_argument("sweep: X values must be finite and > 0");
  for (double v : V_values)
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("sweep: V values must be finite and > 0");
  if (samples_per_cell < 1) throw std::invalid_argument("sweep: samples_per_cell must be >= 1");
  if (max_resample_attempts < 1)
    throw std::invalid_argument("sweep: max_resample_attempts must be >= 1");
  if (threads < 0) throw std::invalid_argument("sweep: threads must be >= 0");
  flocklab::validate(controller);
  sim.validate();
}

SweepCertification sweep_certification(const ControllerSpec& controller) {
  if (std::holds_alternative<NoController>(controller) ||
      std::holds_alternative<UniformController>(controller) ||
      std::holds_alternative<LocalRadiusController>(controller))
    return SweepCertification::PerCell;
  if (std::holds_alternative<LeaderController>(controller))
    return SweepCertification::Always;
  return SweepCertification::Never;
}

CertificateQuery sweep_certificate_query(const SweepConfig& config, double X0,
                                         double V0) {
  CertificateQuery q;
  q.agents = config.agents;
  q.X0 = X0;
  q.V0 = V0;
  q.kernel = config.kernel;
  if (std::holds_alternative<NoController>(config.controller)) {
    q.gamma = 0.0;
    q.family = NoControlFamily{};
    return q;
  }
  if (const auto* u = std::get_if<UniformController>(&config.controller)) {
    q.gamma = u->gamma;
    q.family = BallIndicatorFamily{std::numeric_limits<double>::infinity()};
    return q;
  }
  if (const auto* lr = std::get_if<LocalRadiusController>(&config.controller)) {
    q.gamma = lr->gamma;
    q.family = BallIndicatorFamily{lr->radius};
    return q;
  }
  throw std::logic_error("sweep: controller has no per-cell certificate");
}

ProbabilityGrid run_sweep(const SweepConfig& config) {
  config.validate();
  const std::size_t nx = config.X_values.size();
  const std::size_t nv = config.V_values.size();

  ProbabilityGrid grid;
  grid.X_values = config.X_values;
  grid.V_values = config.V_values;
  grid.probability.assign(nx * nv, 0.0);
  grid.certified.assign(nx * nv, 0);

  const SweepCertification cert_kind = sweep_certification(config.controller);
  for (std::size_t xi = 0; xi < nx; ++xi)
    for (std::size_t vi = 0; vi < nv; ++vi) {
      bool certified = false;
      if (cert_kind == SweepCertification::Always) {
        certified = true;
      } else if (cert_kind == SweepCertification::PerCell) {
        const auto res = consensus_certificate(sweep_certificate_query(
            config, config.X_values[xi], config.V_values[vi]));
        certified = res.verdict != Verdict::Fails;
      }
      grid.certified[xi * nv + vi] = certified ? 1 : 0;
    }

  std::atomic<std::size_t> blowups{0};
  std::atomic<std::size_t> next_cell{0};

  auto run_cell = [&](std::size_t cell) {
    const std::size_t xi = cell / nv;
    const std::size_t vi = cell % nv;
    int hits = 0;
    for (int s = 0; s < config.samples_per_cell; ++s) {
      const std::uint64_t base = cell_seed(config.master_seed, xi, vi, s);
      FlockState ic;
      bool have_ic = false;
      for (int attempt = 0; attempt < config.max_resample_attempts; ++attempt) {
        const FlockState raw = generate_ic(config.agents, config.dim,
                                           base + static_cast<std::uint64_t>(attempt));
        try {
          ic = rescale_ic(raw, config.X_values[xi], config.V_values[vi]);
          have_ic = true;
          break;
        } catch (const DegenerateSample&) {
        }
      }
      if (!have_ic) throw DegenerateSample();
      try {
        const Trajectory traj = simulate(ic, config.kernel, config.controller, config.sim);
        if (traj.consensus) ++hits;
      } catch (const IntegrationBlowup&) {
        blowups.fetch_add(1, std::memory_order_relaxed);
      }
    }
    grid.probability[cell] =
        static_cast<double>(hits) / static_cast<double>(config.samples_per_cell);
  };

  const std::size_t cells = nx * nv;
  std::size_t workers = config.threads > 0
                            ? static_cast<std::size_t>(config.threads)
                            : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, cells);

  if (workers <= 1) {
    for (std::size_t cell = 0; cell < cells; ++cell) run_cell(cell);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t cell = next_cell.fetch_add(1); cell < cells;
               cell = next_cell.fetch_add(1))
            run_cell(cell);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  grid.simulation_count = cells * static_cast<std::size_t>(config.samples_per_cell);
  grid.blowup_count = blowups.load();
  return grid;
}

}  // namespace flocklab
