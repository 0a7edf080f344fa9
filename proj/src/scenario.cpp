#include "replidyn/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "replidyn/errors.hpp"

namespace replidyn {

namespace {

using nlohmann::ordered_json;

void reject_unknown_keys(const ordered_json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!known.count(item.key()))
      throw ScenarioParseError("unknown key \"" + item.key() + "\" in " + where, 0);
  }
}

double number_field(const ordered_json& obj, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_number())
    throw ScenarioParseError("field \"" + key + "\" must be a number", 0);
  return v.get<double>();
}

Method parse_method(const std::string& name) {
  if (name == "rk45") return Method::AdaptiveRK45;
  if (name == "rk4") return Method::FixedRK4;
  throw ScenarioParseError("integrator.method must be \"rk4\" or \"rk45\", got \"" + name + "\"",
                           0);
}

const char* method_name(Method m) { return m == Method::AdaptiveRK45 ? "rk45" : "rk4"; }

const std::set<std::string> kKnownOutputs{"trajectory_csv", "timeseries_svg", "phase_portrait",
                                          "basins_csv"};

}  // namespace

ScenarioFile parse_scenario(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioParseError(e.what(), e.byte);
  }
  if (!doc.is_object()) throw ScenarioParseError("scenario must be a JSON object", 0);

  reject_unknown_keys(doc,
                      {"name", "u1", "u2", "u3", "u4", "psi", "mu", "primitives",
                       "initial_conditions", "integrator", "outputs"},
                      "scenario");

  ScenarioFile sc;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ScenarioParseError("\"name\" must be a string", 0);
    sc.name = doc["name"].get<std::string>();
  }

  for (const char* key : {"u1", "u2", "u3", "u4"})
    if (!doc.contains(key)) throw ScenarioParseError(std::string("missing field \"") + key + "\"", 0);
  sc.params.u1 = number_field(doc, "u1");
  sc.params.u2 = number_field(doc, "u2");
  sc.params.u3 = number_field(doc, "u3");
  sc.params.u4 = number_field(doc, "u4");

  bool direct = doc.contains("psi") || doc.contains("mu");
  if (doc.contains("primitives")) {
    const auto& pr = doc["primitives"];
    if (!pr.is_object()) throw ScenarioParseError("\"primitives\" must be an object", 0);
    reject_unknown_keys(pr, {"p", "cmg", "delta", "cf"}, "primitives");
    for (const char* key : {"p", "cmg", "delta", "cf"})
      if (!pr.contains(key))
        throw ScenarioParseError(std::string("missing field \"") + key + "\" in primitives", 0);
    EconomicPrimitives prim{number_field(pr, "p"), number_field(pr, "cmg"),
                            number_field(pr, "delta"), number_field(pr, "cf")};
    sc.primitives = prim;
    auto [psi, mu] = markups_from_primitives(prim);
    sc.params.psi = psi;
    sc.params.mu = mu;
  }
  if (direct) {
    if (!doc.contains("psi") || !doc.contains("mu"))
      throw ScenarioParseError("psi and mu must be given together", 0);
    if (sc.primitives)
      sc.warnings.emplace_back(
          "both direct markups and primitives given; direct (psi, mu) take precedence");
    sc.params.psi = number_field(doc, "psi");
    sc.params.mu = number_field(doc, "mu");
  }
  if (!direct && !sc.primitives)
    throw ScenarioParseError("either (psi, mu) or primitives required", 0);

  auto violations = validate(sc.params);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "invalid game parameters; violated:";
    for (const auto& v : violations) msg << " [" << v << "]";
    throw ScenarioValidationError(msg.str(), violations);
  }

  if (doc.contains("initial_conditions")) {
    const auto& ics = doc["initial_conditions"];
    if (!ics.is_array())
      throw ScenarioParseError("\"initial_conditions\" must be an array of [x, y] pairs", 0);
    for (std::size_t k = 0; k < ics.size(); ++k) {
      const auto& ic = ics[k];
      if (!ic.is_array() || ic.size() != 2 || !ic[0].is_number() || !ic[1].is_number())
        throw ScenarioParseError("initial_conditions entries must be [x, y] number pairs", 0);
      PopulationState s{ic[0].get<double>(), ic[1].get<double>()};
      if (!(s.x >= 0 && s.x <= 1 && s.y >= 0 && s.y <= 1)) {
        std::ostringstream msg;
        msg << "initial_conditions[" << k << "] outside the unit square";
        throw ScenarioValidationError(msg.str(), {msg.str()});
      }
      sc.initial_conditions.push_back(s);
    }
  }

  if (doc.contains("integrator")) {
    const auto& in = doc["integrator"];
    if (!in.is_object()) throw ScenarioParseError("\"integrator\" must be an object", 0);
    reject_unknown_keys(in,
                        {"method", "step", "abs_tol", "rel_tol", "t_max", "convergence_radius",
                         "convergence_speed", "boundary_clamp", "closure_tolerance"},
                        "integrator");
    if (in.contains("method")) {
      if (!in["method"].is_string())
        throw ScenarioParseError("integrator.method must be a string", 0);
      sc.integrator.method = parse_method(in["method"].get<std::string>());
    }
    if (in.contains("step")) sc.integrator.step = number_field(in, "step");
    if (in.contains("abs_tol")) sc.integrator.abs_tol = number_field(in, "abs_tol");
    if (in.contains("rel_tol")) sc.integrator.rel_tol = number_field(in, "rel_tol");
    if (in.contains("t_max")) sc.integrator.t_max = number_field(in, "t_max");
    if (in.contains("convergence_radius"))
      sc.integrator.convergence_radius = number_field(in, "convergence_radius");
    if (in.contains("convergence_speed"))
      sc.integrator.convergence_speed = number_field(in, "convergence_speed");
    if (in.contains("boundary_clamp"))
      sc.integrator.boundary_clamp = number_field(in, "boundary_clamp");
    if (in.contains("closure_tolerance"))
      sc.integrator.closure_tolerance = number_field(in, "closure_tolerance");
    try {
      validate_options(sc.integrator);
    } catch (const std::invalid_argument& e) {
      throw ScenarioValidationError(e.what(), {e.what()});
    }
  }

  if (doc.contains("outputs")) {
    const auto& outs = doc["outputs"];
    if (!outs.is_array()) throw ScenarioParseError("\"outputs\" must be an array of strings", 0);
    for (const auto& o : outs) {
      if (!o.is_string()) throw ScenarioParseError("\"outputs\" entries must be strings", 0);
      std::string name = o.get<std::string>();
      if (!kKnownOutputs.count(name))
        sc.warnings.push_back("unknown output \"" + name + "\" ignored");
      sc.outputs.push_back(name);
    }
  }

  return sc;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioParseError("cannot open scenario file " + path.string(), 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const ScenarioFile& sc) {
  ordered_json doc;
  doc["name"] = sc.name;
  doc["u1"] = sc.params.u1;
  doc["u2"] = sc.params.u2;
  doc["u3"] = sc.params.u3;
  doc["u4"] = sc.params.u4;
  doc["psi"] = sc.params.psi;
  doc["mu"] = sc.params.mu;
  if (sc.primitives) {
    doc["primitives"] = {{"p", sc.primitives->price},
                         {"cmg", sc.primitives->marginal_cost},
                         {"delta", sc.primitives->premium},
                         {"cf", sc.primitives->freight_cost}};
  }
  doc["initial_conditions"] = ordered_json::array();
  for (const auto& ic : sc.initial_conditions)
    doc["initial_conditions"].push_back({ic.x, ic.y});
  doc["integrator"] = {{"method", method_name(sc.integrator.method)},
                       {"step", sc.integrator.step},
                       {"abs_tol", sc.integrator.abs_tol},
                       {"rel_tol", sc.integrator.rel_tol},
                       {"t_max", sc.integrator.t_max},
                       {"convergence_radius", sc.integrator.convergence_radius},
                       {"convergence_speed", sc.integrator.convergence_speed},
                       {"boundary_clamp", sc.integrator.boundary_clamp},
                       {"closure_tolerance", sc.integrator.closure_tolerance}};
  doc["outputs"] = sc.outputs;
  return doc.dump(2) + "\n";
}

}  // namespace replidyn
