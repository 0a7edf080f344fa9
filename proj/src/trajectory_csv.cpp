#include "replidyn/trajectory_csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "replidyn/errors.hpp"

namespace replidyn {

namespace {

// 17 significant digits round-trip doubles exactly.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  out << "t,x,y\n";
  for (const Sample& s : traj.samples)
    out << fmt(s.t) << ',' << fmt(s.x) << ',' << fmt(s.y) << '\n';
  out << "#termination=" << to_string(traj.termination) << '\n';
  if (traj.converged_to)
    out << "#target=" << to_string(traj.converged_to->kind) << '\n';
  if (traj.period) out << "#period=" << fmt(*traj.period) << '\n';
  out << "#accepted=" << traj.stats.accepted << '\n';
  out << "#rejected=" << traj.stats.rejected << '\n';
}

Trajectory read_trajectory_csv(std::istream& in) {
  Trajectory traj;
  std::string line;
  if (!std::getline(in, line) || line != "t,x,y")
    throw std::runtime_error("trajectory csv: missing t,x,y header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      std::string value = line.substr(eq + 1);
      if (key == "termination") {
        for (Termination t : {Termination::ReachedTMax, Termination::Converged,
                              Termination::OrbitClosed, Termination::StepFailure})
          if (value == to_string(t)) traj.termination = t;
      } else if (key == "period") {
        traj.period = std::strtod(value.c_str(), nullptr);
      } else if (key == "accepted") {
        traj.stats.accepted = std::strtol(value.c_str(), nullptr, 10);
      } else if (key == "rejected") {
        traj.stats.rejected = std::strtol(value.c_str(), nullptr, 10);
      }
      continue;
    }
    Sample s{};
    const char* p = line.c_str();
    char* end = nullptr;
    s.t = std::strtod(p, &end);
    if (end == p || *end != ',') throw std::runtime_error("trajectory csv: malformed row");
    p = end + 1;
    s.x = std::strtod(p, &end);
    if (end == p || *end != ',') throw std::runtime_error("trajectory csv: malformed row");
    p = end + 1;
    s.y = std::strtod(p, &end);
    if (end == p) throw std::runtime_error("trajectory csv: malformed row");
    traj.samples.push_back(s);
  }
  return traj;
}

}  // namespace replidyn
