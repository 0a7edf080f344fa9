#pragma once

// Self-contained SVG rendering: phase portraits (vector-field glyphs,
// trajectories, stationary-point markers by stability class, optional
// separatrix and basin shading) and time-series charts (x red, y blue).
// Output is byte-deterministic for fixed inputs.

#include <iosfwd>
#include <vector>

#include "replidyn/analysis.hpp"
#include "replidyn/game_model.hpp"
#include "replidyn/integrate.hpp"

namespace replidyn {

struct PhasePortraitSpec {
  int glyph_density = 16;  // arrows per axis; must be >= 2
  int width = 640;         // canvas pixels; must be >= 100
  int height = 640;
  double trajectory_width = 2.0;
  double marker_radius = 7.0;
};

// Throws std::invalid_argument when the spec is out of range.
void validate_spec(const PhasePortraitSpec& spec);

struct PortraitOverlays {
  const Separatrix* separatrix = nullptr;
  const BasinMap* basins = nullptr;
};

void render_phase_portrait(const GameParams& params,
                           const std::vector<Trajectory>& trajectories,
                           const PortraitOverlays& overlays, const PhasePortraitSpec& spec,
                           std::ostream& out);

void render_timeseries(const Trajectory& traj, int width, int height, std::ostream& out);

}  // namespace replidyn
