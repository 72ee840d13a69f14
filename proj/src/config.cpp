#include "flocklab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <utility>

namespace flocklab {

using nlohmann::json;

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path, message);
}

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

// library validation messages may already lead with the section name
std::string strip_prefix(const std::string& message, const std::string& path) {
  const std::string prefix = path.substr(path.rfind('.') + 1) + ": ";
  return message.rfind(prefix, 0) == 0 ? message.substr(prefix.size()) : message;
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& path) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known) fail(join(path, item.key()), "unknown field");
  }
}

bool parse_inf_string(const json& j, double& out) {
  if (!j.is_string()) return false;
  std::string s = j.get<std::string>();
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (s == "inf" || s == "+inf" || s == "infinity") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  return false;
}

double as_number(const json& j, const std::string& path, bool allow_inf = false) {
  double inf = 0.0;
  if (allow_inf && parse_inf_string(j, inf)) return inf;
  if (!j.is_number()) fail(path, "expected a number");
  const double x = j.get<double>();
  if (!allow_inf && !std::isfinite(x)) fail(path, "must be finite");
  return x;
}

std::uint64_t as_seed(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    fail(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

std::int64_t as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned())
    fail(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> as_number_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

json number_or_inf(double x) {
  if (std::isinf(x)) return json("inf");
  return json(x);
}

DeviationProvider deviation_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  const std::string type = j.contains("type") ? as_string(j["type"], join(path, "type"))
                                              : std::string();
  if (type == "constant") {
    check_keys(j, {"type", "value"}, path);
    if (!j.contains("value")) fail(join(path, "value"), "required");
    return ConstantDeviation{as_number_list(j["value"], join(path, "value"))};
  }
  if (type == "scaled-own-deviation") {
    check_keys(j, {"type", "epsilon"}, path);
    ScaledOwnDeviation d;
    if (j.contains("epsilon")) d.epsilon = as_number(j["epsilon"], join(path, "epsilon"));
    return d;
  }
  if (type == "tabulated") {
    check_keys(j, {"type", "times", "values"}, path);
    if (!j.contains("times")) fail(join(path, "times"), "required");
    if (!j.contains("values")) fail(join(path, "values"), "required");
    TabulatedDeviation d;
    d.times = as_number_list(j["times"], join(path, "times"));
    const json& rows = j["values"];
    if (!rows.is_array()) fail(join(path, "values"), "expected an array of arrays");
    for (std::size_t i = 0; i < rows.size(); ++i)
      d.values.push_back(
          as_number_list(rows[i], join(path, "values") + "[" + std::to_string(i) + "]"));
    return d;
  }
  fail(join(path, "type"),
       "expected one of: constant, scaled-own-deviation, tabulated");
}

json deviation_to_json(const DeviationProvider& p) {
  json j;
  if (const auto* c = std::get_if<ConstantDeviation>(&p)) {
    j["type"] = "constant";
    j["value"] = c->value;
  } else if (const auto* s = std::get_if<ScaledOwnDeviation>(&p)) {
    j["type"] = "scaled-own-deviation";
    j["epsilon"] = s->epsilon;
  } else {
    const auto& t = std::get<TabulatedDeviation>(p);
    j["type"] = "tabulated";
    j["times"] = t.times;
    j["values"] = t.values;
  }
  return j;
}

}  // namespace

bool OutputSection::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

KernelSpec kernel_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  const std::string type = j.contains("type") ? as_string(j["type"], join(path, "type"))
                                              : std::string("power-law");
  try {
    if (type == "power-law") {
      check_keys(j, {"type", "delta"}, path);
      double delta = 1.0;
      if (j.contains("delta")) delta = as_number(j["delta"], join(path, "delta"));
      return KernelSpec::power_law(delta);
    }
    if (type == "tabulated") {
      check_keys(j, {"type", "radii", "values"}, path);
      if (!j.contains("radii")) fail(join(path, "radii"), "required");
      if (!j.contains("values")) fail(join(path, "values"), "required");
      return KernelSpec::tabulated(as_number_list(j["radii"], join(path, "radii")),
                                   as_number_list(j["values"], join(path, "values")));
    }
  } catch (const std::invalid_argument& e) {
    fail(path, strip_prefix(e.what(), path));
  } catch (const std::domain_error& e) {
    fail(path, strip_prefix(e.what(), path));
  }
  fail(join(path, "type"), "expected one of: power-law, tabulated");
}

json kernel_to_json(const KernelSpec& kernel) {
  json j;
  if (kernel.is_power_law()) {
    j["type"] = "power-law";
    j["delta"] = kernel.power_law_exponent();
  } else {
    j["type"] = "tabulated";
    j["radii"] = kernel.sample_radii();
    j["values"] = kernel.sample_values();
  }
  return j;
}

ControllerSpec controller_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  if (!j.contains("type")) fail(join(path, "type"), "required");
  const std::string type = as_string(j["type"], join(path, "type"));

  ControllerSpec spec;
  if (type == "none") {
    check_keys(j, {"type"}, path);
    spec = NoController{};
  } else if (type == "uniform") {
    check_keys(j, {"type", "gamma"}, path);
    UniformController c;
    if (j.contains("gamma")) c.gamma = as_number(j["gamma"], join(path, "gamma"));
    spec = c;
  } else if (type == "leader") {
    check_keys(j, {"type", "gamma", "q", "leader"}, path);
    LeaderController c;
    if (j.contains("gamma")) c.gamma = as_number(j["gamma"], join(path, "gamma"));
    if (j.contains("q")) c.q = as_number(j["q"], join(path, "q"));
    if (j.contains("leader")) {
      const std::int64_t idx = as_integer(j["leader"], join(path, "leader"));
      if (idx < 0) fail(join(path, "leader"), "must be a valid agent index");
      c.leader = static_cast<std::size_t>(idx);
    }
    spec = c;
  } else if (type == "weighted-perturbation") {
    check_keys(j, {"type", "alpha", "beta", "epsilon"}, path);
    WeightedPerturbationController c;
    if (j.contains("alpha")) c.alpha = as_number(j["alpha"], join(path, "alpha"));
    if (j.contains("beta")) c.beta = as_number(j["beta"], join(path, "beta"));
    if (j.contains("epsilon")) c.epsilon = as_number(j["epsilon"], join(path, "epsilon"));
    spec = c;
  } else if (type == "local-radius") {
    check_keys(j, {"type", "gamma", "radius", "normalization"}, path);
    LocalRadiusController c;
    if (j.contains("gamma")) c.gamma = as_number(j["gamma"], join(path, "gamma"));
    if (j.contains("radius"))
      c.radius = as_number(j["radius"], join(path, "radius"), /*allow_inf=*/true);
    if (j.contains("normalization")) {
      const std::string n = as_string(j["normalization"], join(path, "normalization"));
      if (n == "exact")
        c.normalization = LocalNormalization::Exact;
      else if (n == "max-neighbor-count")
        c.normalization = LocalNormalization::MaxNeighborCount;
      else
        fail(join(path, "normalization"),
             "expected one of: exact, max-neighbor-count");
    }
    spec = c;
  } else if (type == "general-perturbed") {
    check_keys(j, {"type", "alpha", "beta", "deviation"}, path);
    GeneralPerturbedController c;
    if (j.contains("alpha")) c.alpha = as_number(j["alpha"], join(path, "alpha"));
    if (j.contains("beta")) c.beta = as_number(j["beta"], join(path, "beta"));
    if (j.contains("deviation"))
      c.deviation = deviation_from_json(j["deviation"], join(path, "deviation"));
    spec = c;
  } else {
    fail(join(path, "type"),
         "expected one of: none, uniform, leader, weighted-perturbation, "
         "local-radius, general-perturbed");
  }

  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    fail(path, strip_prefix(e.what(), path));
  }
  return spec;
}

json controller_to_json(const ControllerSpec& controller) {
  json j;
  if (std::holds_alternative<NoController>(controller)) {
    j["type"] = "none";
  } else if (const auto* u = std::get_if<UniformController>(&controller)) {
    j["type"] = "uniform";
    j["gamma"] = u->gamma;
  } else if (const auto* l = std::get_if<LeaderController>(&controller)) {
    j["type"] = "leader";
    j["gamma"] = l->gamma;
    j["q"] = l->q;
    j["leader"] = l->leader;
  } else if (const auto* w = std::get_if<WeightedPerturbationController>(&controller)) {
    j["type"] = "weighted-perturbation";
    j["alpha"] = w->alpha;
    j["beta"] = w->beta;
    j["epsilon"] = w->epsilon;
  } else if (const auto* r = std::get_if<LocalRadiusController>(&controller)) {
    j["type"] = "local-radius";
    j["gamma"] = r->gamma;
    j["radius"] = number_or_inf(r->radius);
    j["normalization"] = r->normalization == LocalNormalization::Exact
                             ? "exact"
                             : "max-neighbor-count";
  } else {
    const auto& g = std::get<GeneralPerturbedController>(controller);
    j["type"] = "general-perturbed";
    j["alpha"] = g.alpha;
    j["beta"] = g.beta;
    j["deviation"] = deviation_to_json(g.deviation);
  }
  return j;
}

RunConfig config_from_json(const json& doc) {
  require_object(doc, "");
  check_keys(doc, {"model", "controller", "sim", "ic", "experiment", "output"}, "");

  RunConfig config;

  if (doc.contains("model")) {
    const json& m = doc["model"];
    require_object(m, "model");
    check_keys(m, {"N", "d", "kernel"}, "model");
    if (m.contains("N")) {
      const std::int64_t n = as_integer(m["N"], "model.N");
      if (n < 1) fail("model.N", "must be at least 1");
      config.agents = static_cast<std::size_t>(n);
    }
    if (m.contains("d")) {
      const std::int64_t d = as_integer(m["d"], "model.d");
      if (d < 1) fail("model.d", "must be at least 1");
      config.dim = static_cast<std::size_t>(d);
    }
    if (m.contains("kernel")) config.kernel = kernel_from_json(m["kernel"], "model.kernel");
  }

  if (doc.contains("controller"))
    config.controller = controller_from_json(doc["controller"], "controller");

  if (doc.contains("sim")) {
    const json& s = doc["sim"];
    require_object(s, "sim");
    check_keys(s, {"dt", "T", "stride", "threshold", "snapshots"}, "sim");
    if (s.contains("dt")) config.sim.dt = as_number(s["dt"], "sim.dt");
    if (s.contains("T")) config.sim.horizon = as_number(s["T"], "sim.T");
    if (s.contains("stride")) {
      const std::int64_t v = as_integer(s["stride"], "sim.stride");
      if (v < 1) fail("sim.stride", "must be at least 1");
      config.sim.record_stride = static_cast<std::size_t>(v);
    }
    if (s.contains("threshold"))
      config.sim.consensus_threshold = as_number(s["threshold"], "sim.threshold");
    if (s.contains("snapshots")) {
      if (!s["snapshots"].is_boolean()) fail("sim.snapshots", "expected a boolean");
      config.sim.record_snapshots = s["snapshots"].get<bool>();
    }
    try {
      config.sim.validate();
    } catch (const std::invalid_argument& e) {
      fail("sim", strip_prefix(e.what(), "sim"));
    }
  }

  if (doc.contains("ic")) {
    const json& ic = doc["ic"];
    require_object(ic, "ic");
    check_keys(ic, {"seed", "X0", "V0", "file"}, "ic");
    if (ic.contains("seed")) config.ic.seed = as_seed(ic["seed"], "ic.seed");
    if (ic.contains("X0")) config.ic.X0 = as_number(ic["X0"], "ic.X0");
    if (ic.contains("V0")) config.ic.V0 = as_number(ic["V0"], "ic.V0");
    if (ic.contains("file")) config.ic.file = as_string(ic["file"], "ic.file");
    if (config.ic.file.empty()) {
      if (config.ic.X0 < 0) fail("ic.X0", "must be non-negative");
      if (config.ic.V0 < 0) fail("ic.V0", "must be non-negative");
    }
  }

  if (doc.contains("experiment")) {
    const json& e = doc["experiment"];
    require_object(e, "experiment");
    check_keys(e, {"X_values", "V_values", "samples_per_cell", "master_seed", "threads"},
               "experiment");
    ExperimentSection section;
    if (!e.contains("X_values")) fail("experiment.X_values", "required");
    if (!e.contains("V_values")) fail("experiment.V_values", "required");
    section.X_values = as_number_list(e["X_values"], "experiment.X_values");
    section.V_values = as_number_list(e["V_values"], "experiment.V_values");
    if (e.contains("samples_per_cell")) {
      const std::int64_t v = as_integer(e["samples_per_cell"], "experiment.samples_per_cell");
      if (v < 1) fail("experiment.samples_per_cell", "must be at least 1");
      section.samples_per_cell = static_cast<int>(v);
    }
    if (e.contains("master_seed"))
      section.master_seed = as_seed(e["master_seed"], "experiment.master_seed");
    if (e.contains("threads")) {
      const std::int64_t v = as_integer(e["threads"], "experiment.threads");
      if (v < 0) fail("experiment.threads", "must be non-negative");
      section.threads = static_cast<int>(v);
    }
    config.experiment = std::move(section);
  }

  if (doc.contains("output")) {
    const json& o = doc["output"];
    require_object(o, "output");
    check_keys(o, {"directory", "formats"}, "output");
    if (o.contains("directory"))
      config.output.directory = as_string(o["directory"], "output.directory");
    if (o.contains("formats")) {
      if (!o["formats"].is_array()) fail("output.formats", "expected an array");
      config.output.formats.clear();
      for (std::size_t i = 0; i < o["formats"].size(); ++i) {
        const std::string f =
            as_string(o["formats"][i], "output.formats[" + std::to_string(i) + "]");
        if (f != "csv" && f != "json" && f != "gnuplot")
          fail("output.formats[" + std::to_string(i) + "]",
               "expected one of: csv, json, gnuplot");
        config.output.formats.push_back(f);
      }
      if (config.output.formats.empty()) fail("output.formats", "must not be empty");
    }
  }

  return config;
}

json config_to_json(const RunConfig& config) {
  json doc;
  doc["model"]["N"] = config.agents;
  doc["model"]["d"] = config.dim;
  doc["model"]["kernel"] = kernel_to_json(config.kernel);
  doc["controller"] = controller_to_json(config.controller);
  doc["sim"]["dt"] = config.sim.dt;
  doc["sim"]["T"] = config.sim.horizon;
  doc["sim"]["stride"] = config.sim.record_stride;
  doc["sim"]["threshold"] = config.sim.consensus_threshold;
  doc["sim"]["snapshots"] = config.sim.record_snapshots;
  if (config.ic.file.empty()) {
    doc["ic"]["seed"] = config.ic.seed;
    doc["ic"]["X0"] = config.ic.X0;
    doc["ic"]["V0"] = config.ic.V0;
  } else {
    doc["ic"]["file"] = config.ic.file;
  }
  if (config.experiment) {
    doc["experiment"]["X_values"] = config.experiment->X_values;
    doc["experiment"]["V_values"] = config.experiment->V_values;
    doc["experiment"]["samples_per_cell"] = config.experiment->samples_per_cell;
    doc["experiment"]["master_seed"] = config.experiment->master_seed;
    doc["experiment"]["threads"] = config.experiment->threads;
  }
  if (!config.output.directory.empty())
    doc["output"]["directory"] = config.output.directory;
  doc["output"]["formats"] = config.output.formats;
  return doc;
}

SweepConfig RunConfig::sweep_config() const {
  if (!experiment)
    throw ConfigError("experiment", "section required for a sweep run");
  SweepConfig sweep;
  sweep.agents = agents;
  sweep.dim = dim;
  sweep.X_values = experiment->X_values;
  sweep.V_values = experiment->V_values;
  sweep.samples_per_cell = experiment->samples_per_cell;
  sweep.master_seed = experiment->master_seed;
  sweep.kernel = kernel;
  sweep.controller = controller;
  sweep.sim = sim;
  sweep.threads = experiment->threads;
  try {
    sweep.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("experiment", strip_prefix(e.what(), "sweep"));
  }
  return sweep;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, e.what());
  }
  return config_from_json(doc);
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("--set", "expected dotted.path=value, got '" + assignment + "'");
  std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  std::string pointer = "/";
  for (char c : key) pointer += (c == '.') ? '/' : c;

  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;  // bare strings stay strings
  }
  try {
    doc[json::json_pointer(pointer)] = std::move(parsed);
  } catch (const json::exception& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace flocklab
