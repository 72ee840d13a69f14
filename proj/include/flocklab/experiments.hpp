#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "flocklab/certificates.hpp"
#include "flocklab/controllers.hpp"
#include "flocklab/integrator.hpp"
#include "flocklab/kernel.hpp"
#include "flocklab/state.hpp"

namespace flocklab {

/// A raw sample whose position or velocity spread vanished, so it cannot be
/// rescaled to a prescribed dispersion (resampling gave up).
class DegenerateSample : public std::runtime_error {
 public:
  DegenerateSample() : std::runtime_error("degenerate sample: zero dispersion") {}
};

/// Positions and velocities drawn i.i.d. uniform on [-1, 1), agent-major
/// (agent 0's components first), positions before velocities, from the pinned
/// generator seeded with `seed`.
FlockState generate_ic(std::size_t agents, std::size_t dim, std::uint64_t seed);

/// Scale positions and velocities separately so the dispersions become
/// exactly (X0, V0). Throws DegenerateSample when the raw dispersion is zero.
FlockState rescale_ic(const FlockState& raw, double X0, double V0);

/// Seed for one sample of one grid cell: the master seed with the cell
/// indices and sample number mixed in, one at a time.
std::uint64_t cell_seed(std::uint64_t master, std::size_t x_index,
                        std::size_t v_index, int sample);

struct SweepConfig {
  std::size_t agents = 20;
  std::size_t dim = 2;
  std::vector<double> X_values;
  std::vector<double> V_values;
  int samples_per_cell = 20;
  std::uint64_t master_seed = 0;
  KernelSpec kernel = KernelSpec::power_law(1.0);
  ControllerSpec controller = NoController{};
  SimConfig sim;
  int threads = 0;                  // 0: one per hardware thread
  int max_resample_attempts = 100;  // degenerate-sample retries per sample

  void validate() const;
};

struct ProbabilityGrid {
  std::vector<double> X_values;
  std::vector<double> V_values;
  std::vector<double> probability;     // row-major, X index major
  std::vector<std::uint8_t> certified; // certificate verdict per cell
  std::size_t simulation_count = 0;
  std::size_t blowup_count = 0;        // counted as non-consensus

  double at(std::size_t xi, std::size_t vi) const {
    return probability[xi * V_values.size() + vi];
  }
  bool certified_at(std::size_t xi, std::size_t vi) const {
    return certified[xi * V_values.size() + vi] != 0;
  }
};

/// Empirical consensus probability over the (X0, V0) grid: every cell runs
/// samples_per_cell rescaled random states through the integrator. Identical
/// configs give identical grids regardless of the thread count, because each
/// sample's seed depends only on (master_seed, cell, sample).
ProbabilityGrid run_sweep(const SweepConfig& config);

/// How the certified matrix is filled for a controller: an initial-state
/// certificate evaluated per cell (none / uniform = infinite-radius ball /
/// local radius = ball of that radius), Always for the leader law (its decay
/// holds for every initial state), Never for laws without an initial-state
/// certificate.
enum class SweepCertification { PerCell, Always, Never };
SweepCertification sweep_certification(const ControllerSpec& controller);

/// The per-cell query for PerCell controllers; throws std::logic_error for
/// the others.
CertificateQuery sweep_certificate_query(const SweepConfig& config, double X0,
                                         double V0);

}  // namespace flocklab
