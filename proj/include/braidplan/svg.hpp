#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "braidplan/geometry.hpp"

namespace braidplan::svg {

namespace detail {

inline const char* color(int robot) {
  static constexpr std::array<const char*, 10> palette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                       "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return palette[static_cast<std::size_t>(robot) % palette.size()];
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string header(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace detail

struct PathsInput {
  std::span<const Trajectory> trajectories;
  std::span<const Point2> bases;
  std::span<const Point2> targets;  // may be empty; final waypoints are used then
};

// Top view: one polyline per moving robot, base rings, start dots, target
// crosses. A robot that never moves is a single dot.
inline std::string render_paths(const PathsInput& in, double scale = 30.0, double margin = 20.0) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  auto grow = [&](Point2 p) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  };
  for (const auto& tr : in.trajectories)
    for (const auto& w : tr.waypoints) grow(w.position);
  for (const auto& p : in.bases) grow(p);
  for (const auto& p : in.targets) grow(p);
  if (xmin > xmax) xmin = xmax = ymin = ymax = 0.0;
  const double w = (xmax - xmin) * scale + 2 * margin, h = (ymax - ymin) * scale + 2 * margin;
  auto X = [&](Point2 p) { return detail::num(margin + (p.x - xmin) * scale); };
  auto Y = [&](Point2 p) { return detail::num(h - margin - (p.y - ymin) * scale); };

  std::ostringstream out;
  out << detail::header(w, h);
  for (std::size_t i = 0; i < in.bases.size(); ++i)
    out << "<circle class=\"base\" cx=\"" << X(in.bases[i]) << "\" cy=\"" << Y(in.bases[i])
        << "\" r=\"6\" fill=\"none\" stroke=\"" << detail::color(static_cast<int>(i)) << "\"/>\n";
  for (const auto& tr : in.trajectories) {
    const char* c = detail::color(tr.robot_id);
    std::vector<Point2> pts;
    for (const auto& wp : tr.waypoints)
      if (pts.empty() || !(pts.back() == wp.position)) pts.push_back(wp.position);
    if (pts.size() > 1) {
      out << "<polyline class=\"path\" fill=\"none\" stroke-width=\"2\" stroke=\"" << c << "\" points=\"";
      for (std::size_t k = 0; k < pts.size(); ++k) out << (k ? " " : "") << X(pts[k]) << "," << Y(pts[k]);
      out << "\"/>\n";
    }
    out << "<circle class=\"start\" cx=\"" << X(pts.front()) << "\" cy=\"" << Y(pts.front()) << "\" r=\"3\" fill=\""
        << c << "\"/>\n";
  }
  for (std::size_t i = 0; i < in.targets.size(); ++i) {
    const auto p = in.targets[i];
    const double cx = margin + (p.x - xmin) * scale, cy = h - margin - (p.y - ymin) * scale;
    out << "<path class=\"target\" stroke-width=\"2\" stroke=\"" << detail::color(static_cast<int>(i)) << "\" d=\"M"
        << detail::num(cx - 4) << "," << detail::num(cy - 4) << " L" << detail::num(cx + 4) << "," << detail::num(cy + 4)
        << " M" << detail::num(cx - 4) << "," << detail::num(cy + 4) << " L" << detail::num(cx + 4) << ","
        << detail::num(cy - 4) << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

// Braid diagram of one crossing list: strands placed left to right by initial
// rank, one row per crossing with time increasing upward. At a crossing the
// strand of the robot with larger depth passes under and is drawn with a gap.
inline std::string render_braid(const CrossingList& list, double spacing = 40.0, double row = 40.0,
                                double margin = 30.0) {
  const auto n = list.initial_order.size();
  const std::size_t rows = list.events.size();
  const double w = 2 * margin + spacing * static_cast<double>(n > 0 ? n - 1 : 0);
  const double h = 2 * margin + row * static_cast<double>(rows + 1);
  auto X = [&](std::size_t slot) { return margin + spacing * static_cast<double>(slot); };
  auto Y = [&](double level) { return h - margin - row * level; };
  auto line = [](double x1, double y1, double x2, double y2, const char* c, const char* cls) {
    return "<line class=\"" + std::string(cls) + "\" x1=\"" + detail::num(x1) + "\" y1=\"" + detail::num(y1) +
           "\" x2=\"" + detail::num(x2) + "\" y2=\"" + detail::num(y2) + "\" stroke=\"" + c +
           "\" stroke-width=\"3\"/>\n";
  };

  std::ostringstream out;
  out << detail::header(w, h);
  std::vector<int> order = list.initial_order;
  for (std::size_t s = 0; s < n; ++s)
    out << "<text x=\"" << detail::num(X(s)) << "\" y=\"" << detail::num(h - 8) << "\" font-size=\"12\" "
        << "text-anchor=\"middle\">" << order[s] << "</text>\n";

  // crossing k spans levels k + 0.25 .. k + 0.75; strands run straight between
  for (std::size_t k = 0; k <= rows; ++k) {
    const double y0 = Y(k == 0 ? 0.0 : static_cast<double>(k) - 0.25);
    const double y1 = Y(static_cast<double>(k) + 0.25);
    for (std::size_t s = 0; s < n; ++s) out << line(X(s), y0, X(s), y1, detail::color(order[s]), "strand");
    if (k == rows) break;
    const auto& ev = list.events[k];
    const auto a = static_cast<std::size_t>(ev.letter.index - 1), b = a + 1;
    const double ya = Y(static_cast<double>(k) + 0.25), yb = Y(static_cast<double>(k) + 0.75);
    const double ym = (ya + yb) / 2, xm = (X(a) + X(b)) / 2, gap = 0.18;
    // left strand moves right, right strand moves left
    const bool left_under = ev.letter.sign > 0;
    out << "<g class=\"crossing\" data-time=\"" << detail::num(ev.time) << "\" data-letter=\"" << to_string(ev.letter)
        << "\">\n";
    const char* cl = detail::color(order[a]);
    const char* cr = detail::color(order[b]);
    auto under = [&](double x1, double y1, double x2, double y2, const char* c) {
      const double fx = xm - x1, fy = ym - y1;
      return line(x1, y1, x1 + fx * (1 - gap), y1 + fy * (1 - gap), c, "under") +
             line(xm + (x2 - xm) * gap, ym + (y2 - ym) * gap, x2, y2, c, "under");
    };
    if (left_under) {
      out << under(X(a), ya, X(b), yb, cl) << line(X(b), ya, X(a), yb, cr, "over");
    } else {
      out << under(X(b), ya, X(a), yb, cr) << line(X(a), ya, X(b), yb, cl, "over");
    }
    out << "</g>\n";
    std::swap(order[a], order[b]);
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace braidplan::svg
