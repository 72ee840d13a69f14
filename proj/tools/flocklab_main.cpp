#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "flocklab/certificates.hpp"
#include "flocklab/config.hpp"
#include "flocklab/contour.hpp"
#include "flocklab/csv.hpp"
#include "flocklab/experiments.hpp"
#include "flocklab/integrator.hpp"
#include "flocklab/quadrature.hpp"
#include "flocklab/simd/ops.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace flocklab;

namespace {

json number_or_inf(double x) { return std::isinf(x) ? json("inf") : json(x); }

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Unconditional: return "unconditional";
  }
  return "?";
}

json family_to_json(const ControlFamily& family) {
  json j;
  if (std::holds_alternative<NoControlFamily>(family)) {
    j["type"] = "none";
  } else if (const auto* b = std::get_if<BallIndicatorFamily>(&family)) {
    j["type"] = "ball";
    j["radius"] = number_or_inf(b->radius);
  } else if (const auto* s = std::get_if<ShiftedPowerTailFamily>(&family)) {
    j["type"] = "shifted-power";
    j["radius"] = number_or_inf(s->radius);
    j["theta"] = s->theta;
  } else {
    j["type"] = "algebraic";
    j["epsilon"] = std::get<AlgebraicTailFamily>(family).epsilon;
  }
  return j;
}

double parse_extended(const std::string& text, const std::string& flag) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ConfigError(flag, "expected a number, got '" + text + "'");
  return x;
}

RunConfig load_with_overrides(const std::string& config_path,
                              const std::vector<std::string>& overrides) {
  json doc = json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError(config_path, "cannot open file");
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(config_path, e.what());
    }
  }
  for (const std::string& assignment : overrides) apply_override(doc, assignment);
  return config_from_json(doc);
}

fs::path resolve_outdir(const RunConfig& config, const std::string& cli_out) {
  if (!cli_out.empty()) return cli_out;
  if (!config.output.directory.empty()) return config.output.directory;
  if (const char* env = std::getenv("FLOCKLAB_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

template <typename F>
int run_guarded(F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const CsvError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const IntegrationBlowup& e) {
    std::cerr << "numeric error: " << e.what() << " (reduce sim.dt or the feedback gain)\n";
    return 3;
  } catch (const QuadratureError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const DegenerateSample& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid parameter: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid parameter: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

int cmd_simulate(const RunConfig& config, const fs::path& outdir) {
  FlockState initial;
  if (!config.ic.file.empty())
    initial = read_state_file(config.ic.file);
  else
    initial = rescale_ic(generate_ic(config.agents, config.dim, config.ic.seed),
                         config.ic.X0, config.ic.V0);

  const Trajectory traj = simulate(initial, config.kernel, config.controller, config.sim);

  fs::create_directories(outdir);
  if (config.output.wants("csv")) {
    std::ofstream t(outdir / "trajectory.csv");
    write_trajectory_csv(t, traj);
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
      char name[32];
      std::snprintf(name, sizeof name, "snapshot_%04zu.csv", s);
      std::ofstream snap(outdir / name);
      write_state_csv(snap, traj.snapshots[s]);
    }
  }
  if (config.output.wants("json")) {
    json summary;
    summary["consensus"] = traj.consensus;
    summary["first_crossing_time"] =
        traj.first_crossing_time ? json(*traj.first_crossing_time) : json(nullptr);
    summary["final_X"] = traj.position_dispersion.back();
    summary["final_V"] = traj.velocity_dispersion.back();
    summary["steps"] = config.sim.step_count();
    summary["backend"] = simd::active_backend_name();
    summary["config"] = config_to_json(config);
    std::ofstream s(outdir / "summary.json");
    s << summary.dump(2) << "\n";
  }

  std::cout << "consensus=" << (traj.consensus ? "true" : "false");
  if (traj.first_crossing_time)
    std::cout << " first_crossing=" << format_double(*traj.first_crossing_time);
  std::cout << " final_X=" << format_double(traj.position_dispersion.back())
            << " final_V=" << format_double(traj.velocity_dispersion.back())
            << " outdir=" << outdir.string() << "\n";
  return 0;
}

int cmd_sweep(const RunConfig& config, const fs::path& outdir, int threads_override,
              std::optional<double> contour_level) {
  SweepConfig sweep = config.sweep_config();
  if (threads_override >= 0) sweep.threads = threads_override;

  const ProbabilityGrid grid = run_sweep(sweep);
  std::vector<Polyline> contours;
  if (contour_level) contours = contour_extract(grid, *contour_level);

  fs::create_directories(outdir);
  bool wrote_contour = false;
  if (config.output.wants("csv")) {
    std::ofstream g(outdir / "grid.csv");
    write_grid_csv(g, grid);
    if (contour_level) {
      std::ofstream c(outdir / "contour.csv");
      write_contour_csv(c, contours);
      wrote_contour = true;
    }
  }
  if (config.output.wants("gnuplot")) {
    std::ofstream p(outdir / "plot.gp");
    p << plot_script("grid.csv", wrote_contour ? "contour.csv" : "",
                     contour_level.value_or(0.0));
  }
  if (config.output.wants("json")) {
    json manifest;
    manifest["simulation_count"] = grid.simulation_count;
    manifest["blowup_count"] = grid.blowup_count;
    manifest["grid"]["X_cells"] = grid.X_values.size();
    manifest["grid"]["V_cells"] = grid.V_values.size();
    manifest["contour_level"] = contour_level ? json(*contour_level) : json(nullptr);
    manifest["artifacts"]["grid_csv"] =
        config.output.wants("csv") ? json("grid.csv") : json(nullptr);
    manifest["artifacts"]["contour_csv"] = wrote_contour ? json("contour.csv") : json(nullptr);
    manifest["artifacts"]["plot_script"] =
        config.output.wants("gnuplot") ? json("plot.gp") : json(nullptr);
    manifest["backend"] = simd::active_backend_name();
    manifest["config"] = config_to_json(config);
    std::ofstream m(outdir / "manifest.json");
    m << manifest.dump(2) << "\n";
  }

  double mean = 0.0;
  for (double p : grid.probability) mean += p;
  if (!grid.probability.empty()) mean /= static_cast<double>(grid.probability.size());
  std::cout << "cells=" << grid.probability.size()
            << " simulations=" << grid.simulation_count
            << " mean_probability=" << format_double(mean)
            << " outdir=" << outdir.string() << "\n";
  return 0;
}

int cmd_certify(const CertificateQuery& query) {
  const CertificateResult result = consensus_certificate(query);

  json out;
  out["query"]["agents"] = query.agents;
  out["query"]["X0"] = query.X0;
  out["query"]["V0"] = query.V0;
  out["query"]["kernel"] = kernel_to_json(query.kernel);
  out["query"]["gamma"] = query.gamma;
  out["query"]["family"] = family_to_json(query.family);
  out["query"]["eta_bound"] =
      query.eta_bound > 0 ? query.eta_bound : static_cast<double>(query.agents);
  out["verdict"] = verdict_name(result.verdict);
  out["lhs"] = number_or_inf(result.lhs);
  out["rhs"] = result.rhs;
  out["margin"] = number_or_inf(result.margin);
  std::cout << out.dump(2) << "\n";
  return result.verdict == Verdict::Fails ? 1 : 0;
}

int cmd_icgen(std::size_t agents, std::size_t dim, std::uint64_t seed, double X0,
              double V0, const std::string& out_path) {
  const FlockState state = rescale_ic(generate_ic(agents, dim, seed), X0, V0);
  if (out_path.empty()) {
    write_state_csv(std::cout, state);
  } else {
    if (const fs::path parent = fs::path(out_path).parent_path(); !parent.empty())
      fs::create_directories(parent);
    std::ofstream out(out_path);
    if (!out) throw CsvError("cannot open output file '" + out_path + "'");
    write_state_csv(out, state);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flocking consensus laboratory: simulation, certificates, sweeps"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  int threads_override = -1;
  double contour_level = 0.8;

  auto* sim_cmd =
      app.add_subcommand("simulate", "Integrate one trajectory and write its artifacts");
  sim_cmd->add_option("-c,--config", config_path, "JSON configuration file");
  sim_cmd->add_option("-s,--set", overrides,
                      "Override a config field, dotted.path=value (repeatable)");
  sim_cmd->add_option("-o,--out", out_dir, "Output directory");

  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Run the (X0, V0) probability grid defined by the experiment section");
  sweep_cmd->add_option("-c,--config", config_path, "JSON configuration file");
  sweep_cmd->add_option("-s,--set", overrides,
                        "Override a config field, dotted.path=value (repeatable)");
  sweep_cmd->add_option("-o,--out", out_dir, "Output directory");
  sweep_cmd->add_option("--threads", threads_override,
                        "Worker threads (0 = one per hardware thread)");
  auto* contour_opt = sweep_cmd->add_option(
      "--contour", contour_level, "Also extract the level-set polylines at this level");

  std::size_t cert_agents = 2;
  double cert_X0 = 1.0, cert_V0 = 1.0, cert_delta = 1.0, cert_gamma = 0.0;
  double cert_theta = 2.0, cert_epsilon = 1.0, cert_eta = 0.0;
  std::string cert_family = "none", cert_radius = "1";
  std::vector<double> cert_radii, cert_values;

  auto* cert_cmd = app.add_subcommand(
      "certify", "Evaluate the consensus certificate for one initial-dispersion pair");
  cert_cmd->add_option("-N,--agents", cert_agents, "Number of agents")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  cert_cmd->add_option("--X0", cert_X0, "Initial position dispersion");
  cert_cmd->add_option("--V0", cert_V0, "Initial velocity dispersion");
  cert_cmd->add_option("--delta", cert_delta, "Power-law kernel exponent");
  cert_cmd->add_option("--kernel-radii", cert_radii,
                       "Tabulated kernel sample radii (comma separated)")
      ->delimiter(',');
  cert_cmd->add_option("--kernel-values", cert_values,
                       "Tabulated kernel sample values (comma separated)")
      ->delimiter(',');
  cert_cmd->add_option("--gamma", cert_gamma, "Control gain");
  cert_cmd->add_option("--family", cert_family,
                       "Control profile: none, ball, shifted-power, algebraic");
  cert_cmd->add_option("--radius", cert_radius, "Profile ball radius (number or 'inf')");
  cert_cmd->add_option("--theta", cert_theta, "Shifted-power tail exponent (> 1)");
  cert_cmd->add_option("--epsilon", cert_epsilon, "Algebraic profile exponent");
  cert_cmd->add_option("--eta-bound", cert_eta,
                       "Normalization bound in [1, N] (0 = use N)");

  std::size_t ic_agents = 20, ic_dim = 2;
  std::uint64_t ic_seed = 1;
  double ic_X0 = 1.0, ic_V0 = 1.0;
  std::string ic_out;

  auto* ic_cmd = app.add_subcommand(
      "ic-gen", "Emit a seeded initial state rescaled to exact dispersions as CSV");
  ic_cmd->add_option("-N,--agents", ic_agents, "Number of agents");
  ic_cmd->add_option("-d,--dim", ic_dim, "Space dimension");
  ic_cmd->add_option("--seed", ic_seed, "Sample seed");
  ic_cmd->add_option("--X0", ic_X0, "Target position dispersion");
  ic_cmd->add_option("--V0", ic_V0, "Target velocity dispersion");
  ic_cmd->add_option("-o,--out", ic_out, "Output file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (sim_cmd->parsed()) {
    return run_guarded([&] {
      const RunConfig config = load_with_overrides(config_path, overrides);
      return cmd_simulate(config, resolve_outdir(config, out_dir));
    });
  }
  if (sweep_cmd->parsed()) {
    return run_guarded([&] {
      const RunConfig config = load_with_overrides(config_path, overrides);
      std::optional<double> level;
      if (contour_opt->count() > 0) level = contour_level;
      return cmd_sweep(config, resolve_outdir(config, out_dir), threads_override, level);
    });
  }
  if (cert_cmd->parsed()) {
    return run_guarded([&] {
      CertificateQuery query;
      query.agents = cert_agents;
      query.X0 = cert_X0;
      query.V0 = cert_V0;
      if (!cert_radii.empty() || !cert_values.empty())
        query.kernel = KernelSpec::tabulated(cert_radii, cert_values);
      else
        query.kernel = KernelSpec::power_law(cert_delta);
      query.gamma = cert_gamma;
      query.eta_bound = cert_eta;
      const double radius = parse_extended(cert_radius, "--radius");
      if (cert_family == "none")
        query.family = NoControlFamily{};
      else if (cert_family == "ball")
        query.family = BallIndicatorFamily{radius};
      else if (cert_family == "shifted-power")
        query.family = ShiftedPowerTailFamily{radius, cert_theta};
      else if (cert_family == "algebraic")
        query.family = AlgebraicTailFamily{cert_epsilon};
      else
        throw ConfigError("--family",
                          "expected one of: none, ball, shifted-power, algebraic");
      return cmd_certify(query);
    });
  }
  return run_guarded([&] {
    return cmd_icgen(ic_agents, ic_dim, ic_seed, ic_X0, ic_V0, ic_out);
  });
}
