#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "replidyn/cli.hpp"
#include "replidyn/errors.hpp"
#include "replidyn/scenario.hpp"
#include "replidyn/svg.hpp"
#include "replidyn/trajectory_csv.hpp"
#include "test_util.hpp"

using namespace replidyn;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("cli_io");

namespace {

const fs::path kScenarioDir = REPLIDYN_SCENARIO_DIR;

struct CoutCapture {
  std::stringstream ss;
  std::streambuf* old;
  CoutCapture() : old(std::cout.rdbuf(ss.rdbuf())) {}
  ~CoutCapture() { std::cout.rdbuf(old); }
  std::string str() const { return ss.str(); }
};

int run_cli(std::initializer_list<const char*> args, std::string* stdout_text = nullptr) {
  std::vector<const char*> argv{"replidyn"};
  argv.insert(argv.end(), args.begin(), args.end());
  CoutCapture capture;
  int code = cli_main(static_cast<int>(argv.size()), argv.data());
  if (stdout_text) *stdout_text = capture.str();
  return code;
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("replidyn_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++count;
  return count;
}

}  // namespace

TEST_CASE("bundled scenarios parse to the showcase parameters") {
  ScenarioFile retail = load_scenario(kScenarioDir / "retail.json");
  CHECK(retail.name == "retail");
  CHECK(retail.params.u1 == 8.0);
  CHECK(retail.params.psi == -10.0);
  CHECK(retail.params.mu == 2.0);
  REQUIRE(retail.initial_conditions.size() == 1);
  CHECK(retail.initial_conditions[0].x == 0.4);
  CHECK(retail.initial_conditions[0].y == 0.3);
  CHECK(validate(retail.params).empty());
  CHECK(retail.warnings.empty());

  ScenarioFile shop = load_scenario(kScenarioDir / "ecommerce.json");
  CHECK(shop.params.psi == 10.0);
  REQUIRE(shop.initial_conditions.size() == 2);
  CHECK(shop.initial_conditions[0].x == 0.35);
  CHECK(shop.initial_conditions[1].y == 0.15);
}

TEST_CASE("unknown keys are rejected by name") {
  try {
    parse_scenario(R"({"name":"x","u1":8,"u2":5,"u3":2,"u4":1,"psi":-10,"mu":2,"bogus":1})");
    FAIL("expected ScenarioParseError");
  } catch (const ScenarioParseError& e) {
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
  try {
    parse_scenario(
        R"({"u1":8,"u2":5,"u3":2,"u4":1,"psi":-10,"mu":2,"integrator":{"stepp":0.1}})");
    FAIL("expected ScenarioParseError");
  } catch (const ScenarioParseError& e) {
    CHECK(std::string(e.what()).find("stepp") != std::string::npos);
  }
}

TEST_CASE("ordering violations surface as validation errors") {
  try {
    parse_scenario(R"({"u1":5,"u2":8,"u3":2,"u4":1,"psi":-10,"mu":2})");
    FAIL("expected ScenarioValidationError");
  } catch (const ScenarioValidationError& e) {
    REQUIRE(!e.violations.empty());
    CHECK(e.violations[0] == "u1 > u2");
  }
}

TEST_CASE("initial conditions must stay inside the unit square") {
  CHECK_THROWS_AS(parse_scenario(R"({"u1":8,"u2":5,"u3":2,"u4":1,"psi":-10,"mu":2,
                                     "initial_conditions":[[1.5,0.5]]})"),
                  ScenarioValidationError);
}

TEST_CASE("malformed JSON reports a byte position") {
  try {
    parse_scenario("{\"u1\": 8,, }");
    FAIL("expected ScenarioParseError");
  } catch (const ScenarioParseError& e) {
    CHECK(e.byte_offset > 0);
  }
}

TEST_CASE("primitives alone define the markups") {
  ScenarioFile sc = parse_scenario(
      R"({"u1":8,"u2":5,"u3":2,"u4":1,
          "primitives":{"p":20,"cmg":30,"delta":5,"cf":3}})");
  CHECK(sc.params.psi == -10.0);
  CHECK(sc.params.mu == 2.0);
  CHECK(sc.warnings.empty());
  REQUIRE(sc.primitives.has_value());
  CHECK(sc.primitives->price == 20.0);
}

TEST_CASE("direct markups win over primitives, with a warning") {
  ScenarioFile sc = parse_scenario(
      R"({"u1":8,"u2":5,"u3":2,"u4":1,"psi":-10,"mu":2,
          "primitives":{"p":40,"cmg":30,"delta":5,"cf":3}})");
  CHECK(sc.params.psi == -10.0);  // primitives would say +10
  REQUIRE(sc.warnings.size() == 1);
  CHECK(sc.warnings[0].find("precedence") != std::string::npos);
}

TEST_CASE("integrator overrides are honored") {
  ScenarioFile sc = parse_scenario(
      R"({"u1":8,"u2":5,"u3":2,"u4":1,"psi":-10,"mu":2,
          "integrator":{"method":"rk4","step":0.001,"t_max":50,"abs_tol":1e-10}})");
  CHECK(sc.integrator.method == Method::FixedRK4);
  CHECK(sc.integrator.step == 0.001);
  CHECK(sc.integrator.t_max == 50.0);
  CHECK(sc.integrator.abs_tol == 1e-10);
  CHECK(sc.integrator.rel_tol == 1e-9);  // untouched default
}

TEST_CASE("unknown output names warn instead of failing") {
  ScenarioFile sc = parse_scenario(
      R"({"u1":8,"u2":5,"u3":2,"u4":1,"psi":-10,"mu":2,"outputs":["phase_portrait","hologram"]})");
  REQUIRE(sc.outputs.size() == 2);
  REQUIRE(sc.warnings.size() == 1);
  CHECK(sc.warnings[0].find("hologram") != std::string::npos);
}

TEST_CASE("scenario parse-serialize-parse is the identity on content") {
  ScenarioFile a = load_scenario(kScenarioDir / "ecommerce.json");
  ScenarioFile b = parse_scenario(serialize_scenario(a));
  CHECK(a.name == b.name);
  CHECK(a.params.u1 == b.params.u1);
  CHECK(a.params.psi == b.params.psi);
  CHECK(a.params.mu == b.params.mu);
  REQUIRE(a.initial_conditions.size() == b.initial_conditions.size());
  for (std::size_t k = 0; k < a.initial_conditions.size(); ++k) {
    CHECK(a.initial_conditions[k].x == b.initial_conditions[k].x);
    CHECK(a.initial_conditions[k].y == b.initial_conditions[k].y);
  }
  CHECK(a.integrator.method == b.integrator.method);
  CHECK(a.integrator.abs_tol == b.integrator.abs_tol);
  CHECK(a.integrator.t_max == b.integrator.t_max);
  CHECK(a.outputs == b.outputs);
}

TEST_CASE("trajectory csv: exact bytes for a one-sample trajectory") {
  Trajectory traj;
  traj.samples.push_back({0.0, 0.0, 0.0});
  std::ostringstream out;
  write_trajectory_csv(traj, out);
  CHECK(out.str() ==
        "t,x,y\n0,0,0\n#termination=reached_t_max\n#accepted=0\n#rejected=0\n");
}

TEST_CASE("trajectory csv: retail header row and round trip") {
  Trajectory traj = integrate(testutil::retail_params(), {0.4, 0.3});
  std::ostringstream out;
  write_trajectory_csv(traj, out);
  std::string text = out.str();
  CHECK(text.rfind("t,x,y\n0,0.40000000000000002,0.29999999999999999\n", 0) == 0);
  CHECK(text.find("#termination=orbit_closed\n") != std::string::npos);
  CHECK(text.find("#period=") != std::string::npos);

  std::istringstream in(text);
  Trajectory back = read_trajectory_csv(in);
  REQUIRE(back.samples.size() == traj.samples.size());
  CHECK(std::memcmp(back.samples.data(), traj.samples.data(),
                    traj.samples.size() * sizeof(Sample)) == 0);
  CHECK(back.termination == Termination::OrbitClosed);
  REQUIRE(back.period.has_value());
  CHECK(*back.period == *traj.period);
  CHECK(back.stats.accepted == traj.stats.accepted);
}

TEST_CASE("portrait spec validation") {
  PhasePortraitSpec spec;
  spec.glyph_density = 1;
  CHECK_THROWS_AS(validate_spec(spec), std::invalid_argument);
  spec = {};
  spec.width = 50;
  CHECK_THROWS_AS(validate_spec(spec), std::invalid_argument);
}

TEST_CASE("phase portrait: deterministic bytes and marker census") {
  GameParams p = testutil::retail_params();
  std::vector<Trajectory> trajs{integrate(p, {0.4, 0.3})};
  PhasePortraitSpec spec;
  std::ostringstream a, b;
  render_phase_portrait(p, trajs, {}, spec, a);
  render_phase_portrait(p, trajs, {}, spec, b);
  CHECK(a.str() == b.str());

  const std::string svg = a.str();
  CHECK(count_occurrences(svg, "marker-saddle") == 4);
  CHECK(count_occurrences(svg, "marker-center") == 1);
  CHECK(count_occurrences(svg, "marker-sink") == 0);
  CHECK(count_occurrences(svg, "class=\"trajectory\"") == 1);
  CHECK(svg.find(">x</text>") != std::string::npos);
  CHECK(svg.find(">y</text>") != std::string::npos);
  CHECK(svg.find("xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);
  CHECK(svg.find("href") == std::string::npos);  // self-contained
}

TEST_CASE("phase portrait: e-commerce overlays") {
  GameParams p = testutil::ecommerce_params();
  std::vector<Trajectory> trajs{integrate(p, {0.35, 0.60}), integrate(p, {0.65, 0.15})};
  Separatrix sep = separatrix(p);
  BasinMap basins = basin_map(p, 8);
  PortraitOverlays overlays;
  overlays.separatrix = &sep;
  overlays.basins = &basins;
  std::ostringstream out;
  render_phase_portrait(p, trajs, overlays, PhasePortraitSpec{}, out);
  const std::string svg = out.str();
  CHECK(count_occurrences(svg, "marker-sink") == 2);
  CHECK(count_occurrences(svg, "marker-source") == 2);
  CHECK(count_occurrences(svg, "marker-saddle") == 1);
  CHECK(count_occurrences(svg, "class=\"trajectory\"") == 2);
  CHECK(count_occurrences(svg, "class=\"separatrix\"") == 1);
  CHECK(svg.find("stroke-dasharray=\"6,4\"") != std::string::npos);
  CHECK(count_occurrences(svg, "class=\"basins\"") == 1);
}

TEST_CASE("phase portrait with no trajectories still draws field and markers") {
  std::ostringstream out;
  render_phase_portrait(testutil::retail_params(), {}, {}, PhasePortraitSpec{}, out);
  const std::string svg = out.str();
  CHECK(count_occurrences(svg, "class=\"trajectory\"") == 0);
  CHECK(count_occurrences(svg, "class=\"field\"") == 1);
  CHECK(count_occurrences(svg, "marker-saddle") == 4);
}

TEST_CASE("time series uses red for x and blue for y") {
  Trajectory traj = integrate(testutil::ecommerce_params(), {0.65, 0.15});
  std::ostringstream out;
  render_timeseries(traj, 800, 420, out);
  const std::string svg = out.str();
  CHECK(svg.find("class=\"series-x\" fill=\"none\" stroke=\"red\"") != std::string::npos);
  CHECK(svg.find("class=\"series-y\" fill=\"none\" stroke=\"blue\"") != std::string::npos);
  CHECK(svg.find(">t</text>") != std::string::npos);
}

TEST_CASE("cli classify: retail") {
  std::string out;
  int code = run_cli({"classify", (kScenarioDir / "retail.json").c_str()}, &out);
  CHECK(code == 0);
  auto doc = nlohmann::json::parse(out);
  CHECK(doc["regime"] == "OscillatoryProp1");
  REQUIRE(doc["stationary_points"].size() == 5);
  int saddles = 0;
  for (const auto& sp : doc["stationary_points"]) {
    if (sp["stability"] == "saddle") ++saddles;
    if (sp["kind"] == "interior") {
      CHECK(sp["stability"] == "center");
      CHECK(std::abs(sp["x"].get<double>() - 10.0 / 18.0) <= 1e-12);
      CHECK(std::abs(sp["y"].get<double>() - 0.4) <= 1e-12);
    }
  }
  CHECK(saddles == 4);
}

TEST_CASE("cli classify: e-commerce sinks") {
  std::string out;
  int code = run_cli({"classify", (kScenarioDir / "ecommerce.json").c_str()}, &out);
  CHECK(code == 0);
  auto doc = nlohmann::json::parse(out);
  CHECK(doc["regime"] == "BistableProp2");
  int sinks = 0;
  for (const auto& sp : doc["stationary_points"])
    if (sp["stability"] == "sink") {
      ++sinks;
      bool at00 = sp["x"] == 0.0 && sp["y"] == 0.0;
      bool at11 = sp["x"] == 1.0 && sp["y"] == 1.0;
      CHECK((at00 || at11));
    }
  CHECK(sinks == 2);
}

TEST_CASE("cli simulate writes oscillating csv and svg") {
  fs::path dir = fresh_dir("simulate");
  int code = run_cli({"simulate", (kScenarioDir / "retail.json").c_str(), "--out",
                      dir.c_str()});
  CHECK(code == 0);
  fs::path csv = dir / "retail_ic0.csv";
  fs::path svg = dir / "retail_ic0_timeseries.svg";
  REQUIRE(fs::exists(csv));
  REQUIRE(fs::exists(svg));

  std::ifstream in(csv);
  Trajectory traj = read_trajectory_csv(in);
  CHECK(traj.termination == Termination::OrbitClosed);
  double xmin = 1, xmax = 0;
  for (const Sample& s : traj.samples) {
    xmin = std::min(xmin, s.x);
    xmax = std::max(xmax, s.x);
  }
  CHECK(xmax > 0.7);   // swings well above the start
  CHECK(xmin < 0.39);  // and below it: sustained oscillation
}

TEST_CASE("cli portrait with separatrix") {
  fs::path dir = fresh_dir("portrait");
  fs::path out_file = dir / "ecommerce.svg";
  int code = run_cli({"portrait", (kScenarioDir / "ecommerce.json").c_str(), "--separatrix",
                      "--out", out_file.c_str()});
  CHECK(code == 0);
  REQUIRE(fs::exists(out_file));
  std::ifstream in(out_file);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str().find("class=\"separatrix\"") != std::string::npos);
}

TEST_CASE("cli basins csv") {
  fs::path dir = fresh_dir("basins");
  fs::path out_file = dir / "map.csv";
  int code = run_cli({"basins", (kScenarioDir / "ecommerce.json").c_str(), "--n", "8", "--out",
                      out_file.c_str()});
  CHECK(code == 0);
  std::ifstream in(out_file);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "i,j,x,y,label");
  int rows = 0, labeled = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    ++rows;
    if (line.find("sink(0,0)") != std::string::npos ||
        line.find("sink(1,1)") != std::string::npos)
      ++labeled;
  }
  CHECK(rows == 64);
  CHECK(labeled == 64);
}

TEST_CASE("cli period reports period, level and orientation") {
  std::string out;
  int code = run_cli({"period", (kScenarioDir / "retail.json").c_str()}, &out);
  CHECK(code == 0);
  auto doc = nlohmann::json::parse(out);
  REQUIRE(doc["results"].size() == 1);
  CHECK(doc["results"][0]["period"].get<double>() > 0.0);
  CHECK(std::abs(doc["results"][0]["h_level"].get<double>() - (-20.205453189805614)) <= 1e-9);
  CHECK(doc["results"][0]["orientation"] == "clockwise");
}

TEST_CASE("cli exit codes") {
  // Wrong regime for period detection.
  CHECK(run_cli({"period", (kScenarioDir / "ecommerce.json").c_str()}) == 1);
  // Missing file.
  CHECK(run_cli({"classify", "/nonexistent/scenario.json"}) == 1);
  // Usage error.
  CHECK(run_cli({"swim"}) == 1);

  // Invalid parameters in a scratch scenario.
  fs::path dir = fresh_dir("badscenario");
  fs::path bad = dir / "bad.json";
  std::ofstream(bad) << R"({"u1":5,"u2":8,"u3":2,"u4":1,"psi":-10,"mu":2})";
  CHECK(run_cli({"classify", bad.c_str()}) == 1);

  // Numerical failure: hopeless tolerances.
  fs::path doomed = dir / "doomed.json";
  std::ofstream(doomed) << R"({"name":"doomed","u1":8,"u2":5,"u3":2,"u4":1,"psi":-10,"mu":2,
      "initial_conditions":[[0.4,0.3]],
      "integrator":{"abs_tol":1e-300,"rel_tol":1e-300}})";
  fs::path out_dir = dir / "out";
  CHECK(run_cli({"simulate", doomed.c_str(), "--out", out_dir.c_str()}) == 2);
}

TEST_SUITE_END();
