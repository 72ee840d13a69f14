#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "flocklab/config.hpp"
#include "flocklab/csv.hpp"
#include "test_helpers.hpp"

using namespace flocklab;
using nlohmann::json;

namespace {

std::uint64_t bits_of(double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, sizeof u);
  return u;
}

void check_echo_roundtrip(const RunConfig& config) {
  const json echo = config_to_json(config);
  const RunConfig reparsed = config_from_json(echo);
  CHECK_EQ(config_to_json(reparsed), echo);
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("empty document yields the documented defaults") {
  const RunConfig c = config_from_json(json::object());
  CHECK_EQ(c.agents, 2);
  CHECK_EQ(c.dim, 2);
  CHECK(c.kernel.is_power_law());
  CHECK_EQ(c.kernel.power_law_exponent(), 1.0);
  CHECK(std::holds_alternative<NoController>(c.controller));
  CHECK_EQ(c.sim.dt, 0.01);
  CHECK_EQ(c.sim.horizon, 20.0);
  CHECK_EQ(c.ic.seed, 1);
  CHECK_FALSE(c.experiment.has_value());
  CHECK(c.output.wants("csv"));
  CHECK(c.output.wants("json"));
  CHECK(c.output.wants("gnuplot"));
}

TEST_CASE("canonical echo survives a parse/emit cycle for every law") {
  RunConfig c;
  check_echo_roundtrip(c);

  c.controller = UniformController{0.7};
  check_echo_roundtrip(c);

  c.controller = LeaderController{1.5, 0.25, 2};
  c.agents = 5;
  check_echo_roundtrip(c);

  c.controller = WeightedPerturbationController{0.5, 0.03125, 2.0};
  check_echo_roundtrip(c);

  c.controller = LocalRadiusController{1.0, 2.5, LocalNormalization::Exact};
  check_echo_roundtrip(c);

  c.controller = GeneralPerturbedController{1.0, 0.5, ConstantDeviation{{0.5, -0.25}}};
  check_echo_roundtrip(c);

  c.controller = GeneralPerturbedController{1.0, 0.5, ScaledOwnDeviation{0.0625}};
  check_echo_roundtrip(c);

  c.controller = GeneralPerturbedController{
      1.0, 0.25, TabulatedDeviation{{0.0, 1.0}, {{0.0, 0.0}, {1.0, -1.0}}}};
  check_echo_roundtrip(c);

  c.kernel = KernelSpec::tabulated({0.0, 1.0, 2.0}, {1.0, 0.5, 0.0});
  check_echo_roundtrip(c);

  c.experiment = ExperimentSection{{0.25, 0.5}, {0.5, 1.0}, 4, 99, 2};
  c.output.directory = "out";
  c.output.formats = {"csv", "json"};
  c.ic.file = "state.csv";
  check_echo_roundtrip(c);
}

TEST_CASE("an infinite interaction radius is spelled out in the document") {
  RunConfig c;
  c.controller = LocalRadiusController{1.0, std::numeric_limits<double>::infinity(),
                                       LocalNormalization::MaxNeighborCount};
  const json echo = config_to_json(c);
  CHECK_EQ(echo["controller"]["radius"], json("inf"));
  const RunConfig back = config_from_json(echo);
  const auto& lr = std::get<LocalRadiusController>(back.controller);
  CHECK(std::isinf(lr.radius));
  check_echo_roundtrip(c);

  // the spelled-out forms are case-insensitive
  json doc = json::object();
  doc["controller"] = {{"type", "local-radius"}, {"radius", "Infinity"}};
  const RunConfig parsed = config_from_json(doc);
  CHECK(std::isinf(std::get<LocalRadiusController>(parsed.controller).radius));
}

TEST_CASE("configuration errors carry the dotted field path") {
  auto path_of = [](const json& doc) -> std::string {
    try {
      config_from_json(doc);
    } catch (const ConfigError& e) {
      return e.path();
    }
    return "<no error>";
  };

  CHECK_EQ(path_of(json{{"bogus", 1}}), "bogus");
  CHECK_EQ(path_of(json{{"model", {{"N", 0}}}}), "model.N");
  CHECK_EQ(path_of(json{{"model", {{"N", "two"}}}}), "model.N");
  CHECK_EQ(path_of(json{{"model", {{"blob", 1}}}}), "model.blob");
  CHECK_EQ(path_of(json{{"model", {{"kernel", {{"type", "noise"}}}}}}),
           "model.kernel.type");
  CHECK_EQ(path_of(json{{"model",
                         {{"kernel",
                           {{"type", "tabulated"}, {"radii", {0.0, 1.0}}}}}}}),
           "model.kernel.values");
  CHECK_EQ(path_of(json{{"controller", {{"type", "warp"}}}}), "controller.type");
  CHECK_EQ(path_of(json{{"controller", {{"type", "uniform"}, {"gamma", -1.0}}}}),
           "controller");
  CHECK_EQ(path_of(json{{"controller", {{"type", "uniform"}, {"radius", 1.0}}}}),
           "controller.radius");
  CHECK_EQ(path_of(json{{"sim", {{"dt", -0.5}}}}), "sim");
  CHECK_EQ(path_of(json{{"sim", {{"dt", "fast"}}}}), "sim.dt");
  CHECK_EQ(path_of(json{{"sim", {{"stride", 0}}}}), "sim.stride");
  CHECK_EQ(path_of(json{{"ic", {{"seed", -4}}}}), "ic.seed");
  CHECK_EQ(path_of(json{{"ic", {{"X0", -1.0}}}}), "ic.X0");
  CHECK_EQ(path_of(json{{"experiment", {{"X_values", {0.1}}}}}),
           "experiment.V_values");
  CHECK_EQ(path_of(json{{"experiment",
                         {{"X_values", {0.1}},
                          {"V_values", {0.1}},
                          {"samples_per_cell", 0}}}}),
           "experiment.samples_per_cell");
  CHECK_EQ(path_of(json{{"output", {{"formats", {"csv", "png"}}}}}),
           "output.formats[1]");
  CHECK_EQ(path_of(json{{"output", {{"formats", json::array()}}}}),
           "output.formats");
  CHECK_EQ(path_of(json(42)), "");

  // messages repeat the path for log readability
  try {
    config_from_json(json{{"sim", {{"dt", -0.5}}}});
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).rfind("sim: ", 0) == 0);
  }
}

TEST_CASE("dotted overrides edit raw documents in place") {
  json doc = json::object();
  apply_override(doc, "model.N=7");
  apply_override(doc, "controller.type=uniform");
  apply_override(doc, "controller.gamma=2.5");
  apply_override(doc, "sim.snapshots=true");
  apply_override(doc, "experiment.X_values=[0.25,0.5]");
  apply_override(doc, "experiment.V_values=[0.5]");
  apply_override(doc, "output.directory=run/out");
  CHECK_EQ(doc["model"]["N"], json(7));
  CHECK_EQ(doc["controller"]["type"], json("uniform"));
  CHECK_EQ(doc["controller"]["gamma"], json(2.5));
  CHECK_EQ(doc["sim"]["snapshots"], json(true));
  CHECK_EQ(doc["experiment"]["X_values"], json({0.25, 0.5}));
  CHECK_EQ(doc["output"]["directory"], json("run/out"));  // bare string fallback

  const RunConfig c = config_from_json(doc);
  CHECK_EQ(c.agents, 7);
  CHECK_EQ(std::get<UniformController>(c.controller).gamma, 2.5);

  apply_override(doc, "model.N=3");  // overrides stack, last one wins
  CHECK_EQ(doc["model"]["N"], json(3));

  CHECK_THROWS_AS(apply_override(doc, "model.N"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "=5"), ConfigError);
}

TEST_CASE("numeric fields print with full round-trip precision") {
  const double cases[] = {0.0,    1.0,          -1.0,   0.1,   1.0 / 3.0,
                          1e300,  -2.5e-8,      5e-324, 0.125, 0.9048375,
                          1e-10,  123456789.0,  -0.0};
  for (const double x : cases) {
    const std::string s = format_double(x);
    const double back = std::strtod(s.c_str(), nullptr);
    CHECK_EQ(bits_of(back), bits_of(x));
  }
  CHECK_EQ(format_double(0.5), "0.5");  // trailing zeros dropped
  CHECK_EQ(format_double(-1.0), "-1");
  CHECK_EQ(format_double(0.1), "0.10000000000000001");
}

TEST_CASE("state files round trip bitwise") {
  const FlockState s = testutil::random_state(31, 6, 3);
  std::ostringstream out;
  write_state_csv(out, s);
  std::istringstream in(out.str());
  const FlockState back = read_state_csv(in);
  CHECK(back == s);

  const std::string header = out.str().substr(0, out.str().find('\n'));
  CHECK_EQ(header, "agent,x_1,x_2,x_3,v_1,v_2,v_3");
}

TEST_CASE("carriage returns and blank lines are tolerated in state files") {
  std::istringstream in("agent,x_1,v_1\r\n0,0.5,1\r\n\r\n1,-0.5,-1\r\n");
  const FlockState s = read_state_csv(in);
  CHECK_EQ(s.agents(), 2);
  CHECK_EQ(s.positions(0, 0), 0.5);
  CHECK_EQ(s.velocities(1, 0), -1.0);
}

TEST_CASE("malformed state files are rejected with line context") {
  auto reject = [](const std::string& text) {
    std::istringstream in(text);
    CHECK_THROWS_AS(read_state_csv(in), CsvError);
  };
  reject("");
  reject("agent,x_1\n0,1\n");                     // odd column count
  reject("particle,x_1,v_1\n0,1,2\n");            // wrong lead column
  reject("agent,x_1,v_2\n0,1,2\n");               // mislabeled component
  reject("agent,x_1,v_1\n0,1\n");                 // ragged row
  reject("agent,x_1,v_1\n0,one,2\n");             // non-numeric field
  reject("agent,x_1,v_1\n");                      // no rows
  std::istringstream nan_state("agent,x_1,v_1\n0,nan,2\n");
  CHECK_THROWS(read_state_csv(nan_state));        // non-finite states never load

  CHECK_THROWS_AS(read_state_file("/nonexistent/state.csv"), CsvError);
}

TEST_CASE("trajectory files print the recorded series verbatim") {
  Trajectory t;
  t.times = {0.0, 0.5};
  t.position_dispersion = {1.0, 0.5};
  t.velocity_dispersion = {2.0, 1.0};
  t.mean_velocity = {{0.25, -1.0}, {0.25, -1.0}};
  std::ostringstream out;
  write_trajectory_csv(out, t);
  CHECK_EQ(out.str(),
           "t,X,V,vbar_1,vbar_2\n"
           "0,1,2,0.25,-1\n"
           "0.5,0.5,1,0.25,-1\n");
}

TEST_CASE("grid files scan X-major with V fastest") {
  ProbabilityGrid g;
  g.X_values = {0.25, 0.5};
  g.V_values = {0.75};
  g.probability = {1.0, 0.5};
  g.certified = {1, 0};
  std::ostringstream out;
  write_grid_csv(out, g);
  CHECK_EQ(out.str(),
           "X0,V0,probability,certified\n"
           "0.25,0.75,1,1\n"
           "0.5,0.75,0.5,0\n");
}

TEST_CASE("contour files separate polylines with a blank record") {
  const std::vector<Polyline> lines = {
      {{1.0, 2.0}, {1.5, 2.5}},
      {{0.25, 0.5}, {0.75, 0.5}},
  };
  std::ostringstream out;
  write_contour_csv(out, lines);
  CHECK_EQ(out.str(),
           "contour_id,X,V\n"
           "0,1,2\n"
           "0,1.5,2.5\n"
           "\n"
           "1,0.25,0.5\n"
           "1,0.75,0.5\n");
}

TEST_CASE("plot scripts reference the data files they are given") {
  const std::string bare = plot_script("grid.csv", "", 0.75);
  CHECK(bare.find("\"grid.csv\" skip 1 using 1:2:3 with image") != std::string::npos);
  CHECK_EQ(bare.find("contour"), std::string::npos);

  const std::string with_contour = plot_script("grid.csv", "contour.csv", 0.75);
  CHECK(with_contour.find("\"contour.csv\" skip 1 using 2:3 with lines") !=
        std::string::npos);
  CHECK(with_contour.find("p = 0.75") != std::string::npos);
}

TEST_CASE("config files load through the same strict parser") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "flocklab_io_test";
  fs::create_directories(dir);
  const fs::path good = dir / "good.json";
  const fs::path bad = dir / "bad.json";
  std::ofstream(good) << R"({"model": {"N": 4}})";
  std::ofstream(bad) << "{not json";

  const RunConfig c = load_config_file(good.string());
  CHECK_EQ(c.agents, 4);

  CHECK_THROWS_AS(load_config_file(bad.string()), ConfigError);
  CHECK_THROWS_AS(load_config_file((dir / "missing.json").string()), ConfigError);
  fs::remove_all(dir);
}

}  // TEST_SUITE
