#include "replidyn/svg.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "replidyn/dynamics.hpp"

namespace replidyn {

namespace {

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Frame {
  double margin, plot_w, plot_h, height;
  double X(double x) const { return margin + x * plot_w; }
  double Y(double y) const { return height - margin - y * plot_h; }
};

void axes(std::ostream& out, const Frame& f, const char* xlabel, const char* ylabel,
          double x_lo, double x_hi) {
  out << "<g class=\"axes\" stroke=\"#333\" fill=\"none\">\n";
  out << "<rect x=\"" << px(f.margin) << "\" y=\"" << px(f.height - f.margin - f.plot_h)
      << "\" width=\"" << px(f.plot_w) << "\" height=\"" << px(f.plot_h) << "\"/>\n";
  out << "</g>\n<g class=\"axis-labels\" font-family=\"sans-serif\" font-size=\"13\" "
         "fill=\"#333\">\n";
  for (int k = 0; k <= 4; ++k) {
    double v = k / 4.0;
    double tx = f.margin + v * f.plot_w;
    double ty = f.height - f.margin + 16;
    char label[32];
    std::snprintf(label, sizeof label, "%.3g", x_lo + v * (x_hi - x_lo));
    out << "<text x=\"" << px(tx) << "\" y=\"" << px(ty) << "\" text-anchor=\"middle\">" << label
        << "</text>\n";
    std::snprintf(label, sizeof label, "%.3g", v);
    out << "<text x=\"" << px(f.margin - 8) << "\" y=\"" << px(f.Y(v) + 4)
        << "\" text-anchor=\"end\">" << label << "</text>\n";
  }
  out << "<text x=\"" << px(f.margin + f.plot_w / 2) << "\" y=\"" << px(f.height - 8)
      << "\" text-anchor=\"middle\" font-style=\"italic\">" << xlabel << "</text>\n";
  out << "<text x=\"" << px(14.0) << "\" y=\"" << px(f.height - f.margin - f.plot_h / 2)
      << "\" text-anchor=\"middle\" font-style=\"italic\">" << ylabel << "</text>\n";
  out << "</g>\n";
}

const char* basin_fill(const BasinCell& cell) {
  if (cell.kind == OutcomeKind::PeriodicOrbit) return "#d6def5";
  if (cell.kind == OutcomeKind::Undecided) return "#eeeeee";
  if (!cell.sink) return "#e0e0e0";
  switch (*cell.sink) {
    case PointKind::Corner00: return "#f6d5d5";
    case PointKind::Corner11: return "#d5ecd5";
    case PointKind::Corner10: return "#f0e6c8";
    case PointKind::Corner01: return "#e6d8f0";
    case PointKind::Interior: return "#e0e0e0";
  }
  return "#e0e0e0";
}

const char* trajectory_color(std::size_t index) {
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b"};
  return palette[index % 5];
}

void polyline(std::ostream& out, const Frame& f, const std::vector<PopulationState>& pts,
              const std::string& attrs) {
  out << "<polyline " << attrs << " points=\"";
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k) out << ' ';
    out << px(f.X(pts[k].x)) << ',' << px(f.Y(pts[k].y));
  }
  out << "\"/>\n";
}

}  // namespace

void validate_spec(const PhasePortraitSpec& spec) {
  if (spec.glyph_density < 2)
    throw std::invalid_argument("portrait: glyph_density must be >= 2");
  if (spec.width < 100 || spec.height < 100)
    throw std::invalid_argument("portrait: canvas must be at least 100x100");
}

void render_phase_portrait(const GameParams& params,
                           const std::vector<Trajectory>& trajectories,
                           const PortraitOverlays& overlays, const PhasePortraitSpec& spec,
                           std::ostream& out) {
  validate_spec(spec);
  Frame f{40.0, spec.width - 80.0, spec.height - 80.0, static_cast<double>(spec.height)};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
      << spec.height << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\">\n";
  out << "<rect width=\"" << spec.width << "\" height=\"" << spec.height
      << "\" fill=\"#ffffff\"/>\n";

  if (overlays.basins && overlays.basins->n >= 2) {
    const BasinMap& bm = *overlays.basins;
    double cw = f.plot_w / bm.n, ch = f.plot_h / bm.n;
    out << "<g class=\"basins\" stroke=\"none\">\n";
    for (int i = 0; i < bm.n; ++i) {
      for (int j = 0; j < bm.n; ++j) {
        out << "<rect x=\"" << px(f.margin + i * cw) << "\" y=\""
            << px(f.height - f.margin - (j + 1) * ch) << "\" width=\"" << px(cw)
            << "\" height=\"" << px(ch) << "\" fill=\"" << basin_fill(bm.at(i, j)) << "\"/>\n";
      }
    }
    out << "</g>\n";
  }

  // Normalized direction glyphs on the cell centers of a uniform grid.
  out << "<g class=\"field\" stroke=\"#9aa5b1\" fill=\"#9aa5b1\" stroke-width=\"1\">\n";
  int g = spec.glyph_density;
  double len = 0.38 * std::min(f.plot_w, f.plot_h) / g;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      PopulationState s{(i + 0.5) / g, (j + 0.5) / g};
      Vec2 v = vector_field(params, s);
      double mag = std::hypot(v.x, v.y);
      double cx = f.X(s.x), cy = f.Y(s.y);
      if (mag < 1e-13) {
        out << "<circle cx=\"" << px(cx) << "\" cy=\"" << px(cy) << "\" r=\"1.2\"/>\n";
        continue;
      }
      // Screen direction (y axis flips).
      double dx = v.x / mag, dy = -v.y / mag;
      double x0 = cx - 0.5 * len * dx, y0 = cy - 0.5 * len * dy;
      double x1 = cx + 0.5 * len * dx, y1 = cy + 0.5 * len * dy;
      double hw = 0.22 * len, hl = 0.38 * len;
      out << "<line x1=\"" << px(x0) << "\" y1=\"" << px(y0) << "\" x2=\"" << px(x1)
          << "\" y2=\"" << px(y1) << "\"/>\n";
      out << "<polygon points=\"" << px(x1) << ',' << px(y1) << ' '
          << px(x1 - hl * dx - hw * dy) << ',' << px(y1 - hl * dy + hw * dx) << ' '
          << px(x1 - hl * dx + hw * dy) << ',' << px(y1 - hl * dy - hw * dx) << "\"/>\n";
    }
  }
  out << "</g>\n";

  if (overlays.separatrix) {
    out << "<g class=\"separatrix\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1.6\" "
           "stroke-dasharray=\"6,4\">\n";
    polyline(out, f, overlays.separatrix->upper, "");
    polyline(out, f, overlays.separatrix->lower, "");
    out << "</g>\n";
  }

  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    out << "<g class=\"trajectory\" fill=\"none\" stroke=\"" << trajectory_color(k)
        << "\" stroke-width=\"" << px(spec.trajectory_width) << "\">\n";
    std::vector<PopulationState> pts;
    pts.reserve(trajectories[k].samples.size());
    for (const Sample& s : trajectories[k].samples) pts.push_back({s.x, s.y});
    polyline(out, f, pts, "");
    out << "</g>\n";
  }

  out << "<g class=\"stationary-points\" stroke=\"#000000\" stroke-width=\"1.5\">\n";
  double r = spec.marker_radius;
  for (const StationaryPoint& p : stationary_points(params).points) {
    double cx = f.X(p.location.x), cy = f.Y(p.location.y);
    switch (p.stability) {
      case Stability::Sink:
        out << "<circle class=\"marker-sink\" cx=\"" << px(cx) << "\" cy=\"" << px(cy)
            << "\" r=\"" << px(r) << "\" fill=\"#000000\"/>\n";
        break;
      case Stability::Source:
        out << "<circle class=\"marker-source\" cx=\"" << px(cx) << "\" cy=\"" << px(cy)
            << "\" r=\"" << px(r) << "\" fill=\"#ffffff\"/>\n";
        break;
      case Stability::Saddle: {
        double o = r * 0.7071;
        out << "<g class=\"marker-saddle\"><circle cx=\"" << px(cx) << "\" cy=\"" << px(cy)
            << "\" r=\"" << px(r) << "\" fill=\"#ffffff\"/>"
            << "<line x1=\"" << px(cx - o) << "\" y1=\"" << px(cy - o) << "\" x2=\"" << px(cx + o)
            << "\" y2=\"" << px(cy + o) << "\"/>"
            << "<line x1=\"" << px(cx - o) << "\" y1=\"" << px(cy + o) << "\" x2=\"" << px(cx + o)
            << "\" y2=\"" << px(cy - o) << "\"/></g>\n";
        break;
      }
      case Stability::Center:
        out << "<circle class=\"marker-center\" cx=\"" << px(cx) << "\" cy=\"" << px(cy)
            << "\" r=\"" << px(r) << "\" fill=\"none\" stroke-dasharray=\"2.5,2.5\"/>\n";
        break;
      case Stability::NonHyperbolicOther:
        out << "<rect class=\"marker-other\" x=\"" << px(cx - r) << "\" y=\"" << px(cy - r)
            << "\" width=\"" << px(2 * r) << "\" height=\"" << px(2 * r)
            << "\" fill=\"#bbbbbb\"/>\n";
        break;
    }
  }
  out << "</g>\n";

  axes(out, f, "x", "y", 0.0, 1.0);
  out << "</svg>\n";
}

void render_timeseries(const Trajectory& traj, int width, int height, std::ostream& out) {
  if (width < 100 || height < 100)
    throw std::invalid_argument("timeseries: canvas must be at least 100x100");
  Frame f{45.0, width - 90.0, height - 90.0, static_cast<double>(height)};
  double t0 = traj.samples.front().t;
  double t1 = traj.samples.back().t;
  if (t1 <= t0) t1 = t0 + 1.0;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";

  auto series = [&](double Sample::*var, const char* color, const char* cls) {
    out << "<polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.8\" points=\"";
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
      if (k) out << ' ';
      double u = (traj.samples[k].t - t0) / (t1 - t0);
      out << px(f.margin + u * f.plot_w) << ',' << px(f.Y(traj.samples[k].*var));
    }
    out << "\"/>\n";
  };
  series(&Sample::x, "red", "series-x");
  series(&Sample::y, "blue", "series-y");

  out << "<g font-family=\"sans-serif\" font-size=\"13\">"
      << "<text x=\"" << px(f.margin + f.plot_w - 34) << "\" y=\"" << px(f.margin - 8)
      << "\" fill=\"red\" font-style=\"italic\">x</text>"
      << "<text x=\"" << px(f.margin + f.plot_w - 16) << "\" y=\"" << px(f.margin - 8)
      << "\" fill=\"blue\" font-style=\"italic\">y</text></g>\n";

  axes(out, f, "t", "share", t0, t1);
  out << "</svg>\n";
}

}  // namespace replidyn
