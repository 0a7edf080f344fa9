#include "replidyn/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "replidyn/analysis.hpp"
#include "replidyn/errors.hpp"
#include "replidyn/scenario.hpp"
#include "replidyn/svg.hpp"
#include "replidyn/trajectory_csv.hpp"

namespace replidyn {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;

void print_warnings(const ScenarioFile& sc) {
  for (const auto& w : sc.warnings) std::cerr << "warning: " << w << '\n';
}

std::string basin_label(const BasinCell& cell) {
  switch (cell.kind) {
    case OutcomeKind::PeriodicOrbit: return "periodic";
    case OutcomeKind::Undecided: return "undecided";
    case OutcomeKind::Converged: break;
  }
  if (!cell.sink) return "undecided";
  switch (*cell.sink) {
    case PointKind::Corner00: return "sink(0,0)";
    case PointKind::Corner10: return "sink(1,0)";
    case PointKind::Corner01: return "sink(0,1)";
    case PointKind::Corner11: return "sink(1,1)";
    case PointKind::Interior: return "sink(interior)";
  }
  return "undecided";
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path.string());
  return out;
}

int run_classify(const ScenarioFile& sc) {
  StationaryAnalysis sa = stationary_points(sc.params);
  ReducedCoefficients rc = reduced_coefficients(sc.params);
  ordered_json doc;
  doc["name"] = sc.name;
  doc["regime"] = to_string(classify_regime(sc.params));
  doc["reduced_coefficients"] = {{"a", rc.a}, {"b", rc.b}, {"c", rc.c}, {"d", rc.d}};
  doc["stationary_points"] = ordered_json::array();
  for (const StationaryPoint& p : sa.points) {
    doc["stationary_points"].push_back(
        {{"kind", to_string(p.kind)},
         {"x", p.location.x},
         {"y", p.location.y},
         {"eigenvalues",
          {{p.eigenvalues.first.real(), p.eigenvalues.first.imag()},
           {p.eigenvalues.second.real(), p.eigenvalues.second.imag()}}},
         {"stability", to_string(p.stability)}});
  }
  doc["notes"] = sa.notes;
  std::cout << doc.dump(2) << '\n';
  return kExitOk;
}

int run_simulate(const ScenarioFile& sc, const fs::path& out_dir) {
  if (sc.initial_conditions.empty()) {
    std::cerr << "error: scenario has no initial_conditions to simulate\n";
    return kExitInput;
  }
  fs::create_directories(out_dir);
  int exit_code = kExitOk;
  for (std::size_t k = 0; k < sc.initial_conditions.size(); ++k) {
    const PopulationState& ic = sc.initial_conditions[k];
    Trajectory traj = integrate(sc.params, ic, sc.integrator);
    if (traj.termination == Termination::StepFailure) exit_code = kExitNumerical;

    std::string stem = sc.name.empty() ? "scenario" : sc.name;
    fs::path csv_path = out_dir / (stem + "_ic" + std::to_string(k) + ".csv");
    fs::path svg_path = out_dir / (stem + "_ic" + std::to_string(k) + "_timeseries.svg");
    {
      auto out = open_out(csv_path);
      write_trajectory_csv(traj, out);
    }
    {
      auto out = open_out(svg_path);
      render_timeseries(traj, 800, 420, out);
    }
    std::cout << "ic" << k << " (" << ic.x << ", " << ic.y
              << "): " << to_string(traj.termination);
    if (traj.converged_to) std::cout << " at " << to_string(traj.converged_to->kind);
    if (traj.period) std::cout << " period=" << *traj.period;
    std::cout << " -> " << csv_path.string() << ' ' << svg_path.string() << '\n';
  }
  return exit_code;
}

int run_portrait(const ScenarioFile& sc, bool with_separatrix, int basins_n,
                 const std::string& out_file) {
  std::vector<Trajectory> trajectories;
  trajectories.reserve(sc.initial_conditions.size());
  for (const PopulationState& ic : sc.initial_conditions)
    trajectories.push_back(integrate(sc.params, ic, sc.integrator));

  Separatrix sep;
  BasinMap basins;
  PortraitOverlays overlays;
  if (with_separatrix) {
    sep = separatrix(sc.params, sc.integrator);
    overlays.separatrix = &sep;
  }
  if (basins_n > 0) {
    basins = basin_map(sc.params, basins_n, sc.integrator);
    overlays.basins = &basins;
  }

  fs::path path = out_file.empty() ? fs::path((sc.name.empty() ? "scenario" : sc.name) +
                                              "_portrait.svg")
                                   : fs::path(out_file);
  auto out = open_out(path);
  render_phase_portrait(sc.params, trajectories, overlays, PhasePortraitSpec{}, out);
  std::cout << path.string() << '\n';
  return kExitOk;
}

int run_basins(const ScenarioFile& sc, int n, const std::string& out_file) {
  BasinMap map = basin_map(sc.params, n, sc.integrator);
  fs::path path = out_file.empty()
                      ? fs::path((sc.name.empty() ? "scenario" : sc.name) + "_basins.csv")
                      : fs::path(out_file);
  auto out = open_out(path);
  out << "i,j,x,y,label\n";
  char buf[96];
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      PopulationState c = BasinMap::center(n, i, j);
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,", i, j, c.x, c.y);
      out << buf << basin_label(map.at(i, j)) << '\n';
    }
  }
  for (const auto& note : map.notes) out << "#" << note << '\n';
  std::cout << path.string() << '\n';
  return kExitOk;
}

int run_period(const ScenarioFile& sc) {
  if (classify_regime(sc.params) != Regime::OscillatoryProp1) {
    std::cerr << "error: period detection applies to the oscillatory regime only\n";
    return kExitInput;
  }
  if (sc.initial_conditions.empty()) {
    std::cerr << "error: scenario has no initial_conditions\n";
    return kExitInput;
  }
  auto ip = interior_point(sc.params);
  int exit_code = kExitOk;
  ordered_json results = ordered_json::array();
  for (const PopulationState& ic : sc.initial_conditions) {
    ordered_json entry;
    entry["initial_condition"] = {ic.x, ic.y};
    Trajectory traj = integrate(sc.params, ic, sc.integrator);
    if (traj.termination == Termination::OrbitClosed) {
      Vec2 f = vector_field(sc.params, ic);
      double angular = (ic.x - ip->x) * f.y - (ic.y - ip->y) * f.x;
      entry["period"] = *traj.period;
      entry["h_level"] = conserved_quantity(sc.params, ic);
      entry["orientation"] = angular < 0 ? "clockwise" : "counterclockwise";
    } else {
      entry["period"] = nullptr;
      entry["error"] = std::string("no closed orbit detected (") +
                       to_string(traj.termination) + ")";
      exit_code = kExitNumerical;
    }
    results.push_back(entry);
  }
  ordered_json doc;
  doc["name"] = sc.name;
  doc["results"] = results;
  std::cout << doc.dump(2) << '\n';
  return exit_code;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Replicator-dynamics toolkit for the consumer/producer delivery game"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";
  std::string out_file;
  bool with_separatrix = false;
  int basins_overlay_n = 0;
  int basins_n = 0;

  auto* classify = app.add_subcommand("classify", "Regime and stationary-point table as JSON");
  classify->add_option("scenario", scenario_path, "scenario JSON file")->required();

  auto* simulate = app.add_subcommand("simulate", "Integrate all initial conditions");
  simulate->add_option("scenario", scenario_path, "scenario JSON file")->required();
  simulate->add_option("--out", out_dir, "output directory");

  auto* portrait = app.add_subcommand("portrait", "Render the phase portrait SVG");
  portrait->add_option("scenario", scenario_path, "scenario JSON file")->required();
  portrait->add_flag("--separatrix", with_separatrix, "overlay the saddle separatrix");
  portrait->add_option("--basins", basins_overlay_n, "overlay an NxN basin shading")
      ->check(CLI::Range(2, 4096));
  portrait->add_option("--out", out_file, "output SVG file");

  auto* basins = app.add_subcommand("basins", "Write a basin-of-attraction map as CSV");
  basins->add_option("scenario", scenario_path, "scenario JSON file")->required();
  basins->add_option("--n", basins_n, "grid resolution")->required()->check(CLI::Range(2, 4096));
  basins->add_option("--out", out_file, "output CSV file");

  auto* period = app.add_subcommand("period", "Detected period and H-level per initial condition");
  period->add_option("scenario", scenario_path, "scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    ScenarioFile sc = load_scenario(scenario_path);
    print_warnings(sc);
    if (classify->parsed()) return run_classify(sc);
    if (simulate->parsed()) return run_simulate(sc, out_dir);
    if (portrait->parsed()) return run_portrait(sc, with_separatrix, basins_overlay_n, out_file);
    if (basins->parsed()) return run_basins(sc, basins_n, out_file);
    if (period->parsed()) return run_period(sc);
  } catch (const ScenarioParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ScenarioValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NoSaddleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const StepFailureError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NonFiniteStateError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace replidyn
