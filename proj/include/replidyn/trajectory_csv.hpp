#pragma once

// Trajectory serialization: `t,x,y` header, one row per sample at 17
// significant digits (round-trip exact for doubles), then '#'-prefixed
// trailer comments carrying termination and step statistics.

#include <iosfwd>

#include "replidyn/integrate.hpp"

namespace replidyn {

void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

// Parses the sample rows and the trailer back into a Trajectory. Samples
// round-trip bit-for-bit.
Trajectory read_trajectory_csv(std::istream& in);

}  // namespace replidyn
