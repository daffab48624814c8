#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "braidplan/braid.hpp"
#include "braidplan/error.hpp"
#include "braidplan/geometry.hpp"
#include "braidplan/planner.hpp"

namespace braidplan {

struct Rect {
  double xmin = -10.0;
  double xmax = 10.0;
  double ymin = -10.0;
  double ymax = 10.0;

  Point2 center() const { return {(xmin + xmax) / 2, (ymin + ymax) / 2}; }
  bool contains(Point2 p, double slack = 1e-9) const {
    return p.x >= xmin - slack && p.x <= xmax + slack && p.y >= ymin - slack && p.y <= ymax + slack;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

struct WorkspaceConfig {
  Rect region;
  double height = 3.0;
  GridAxes axes;
  double cell_size = 1.5;
  double d_safe = 1.0;
  double speed = 1.0;

  void validate(int n) const {
    auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!(region.xmax > region.xmin) || !(region.ymax > region.ymin)) throw ConfigError("workspace region is empty");
    if (!finite_pos(height)) throw ConfigError("workspace height must be positive");
    if (!finite_pos(cell_size) || !finite_pos(d_safe) || !finite_pos(speed))
      throw ConfigError("cell_size, d_safe and speed must be positive");
    if (cell_size < d_safe) throw ConfigError("cell_size must be at least d_safe");
    if (n < 1) return;
    const double half = (n - 1) * cell_size / 2;
    for (double a : {-half, half})
      for (double b : {-half, half})
        if (!region.contains(region.center() + a * axes.axis(0).u_direction() + b * axes.axis(1).u_direction()))
          throw ConfigError("the " + std::to_string(n) + "x" + std::to_string(n) + " grid does not fit the workspace");
  }
};

// Ranks by projected coordinate on each grid axis; equal coordinates are
// ordered by robot index.
inline PermutationState ranks_from_positions(std::span<const Point2> points, const GridAxes& axes) {
  const std::size_t n = points.size();
  if (n == 0) throw InputError("ranks_from_positions: no points");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (points[a] == points[b])
        throw InputError("ranks_from_positions: robots " + std::to_string(a) + " and " + std::to_string(b) +
                         " share a position");
  PermutationState perms;
  for (int axis = 0; axis < 2; ++axis) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    const auto& pa = axes.axis(axis);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return detail::before(pa.u(points[static_cast<std::size_t>(a)]), a, pa.u(points[static_cast<std::size_t>(b)]), b);
    });
    auto& ranks = perms.ranks(axis);
    ranks.assign(n, 0);
    for (std::size_t r = 0; r < n; ++r) ranks[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
  }
  return perms;
}

// theta: rank pair -> centre of that grid cell, grid centred on the workspace.
inline Point2 cell_center(const WorkspaceConfig& cfg, int n, int rank1, int rank2) {
  const double mid = (n - 1) / 2.0;
  return cfg.region.center() + ((rank1 - mid) * cfg.cell_size) * cfg.axes.axis(0).u_direction() +
         ((rank2 - mid) * cfg.cell_size) * cfg.axes.axis(1).u_direction();
}

inline std::vector<Point2> cell_positions(const WorkspaceConfig& cfg, const PermutationState& perms) {
  std::vector<Point2> out;
  for (int i = 0; i < perms.size(); ++i) out.push_back(cell_center(cfg, perms.size(), perms.pi1[static_cast<std::size_t>(i)], perms.pi2[static_cast<std::size_t>(i)]));
  return out;
}

namespace detail {

// Shared timeline: every robot gets a waypoint at every breakpoint.
class Timeline {
 public:
  explicit Timeline(std::span<const Point2> start) : current_(start.begin(), start.end()) {
    for (std::size_t i = 0; i < current_.size(); ++i) paths_.push_back({static_cast<int>(i), {{current_[i], 0.0}}});
  }

  const std::vector<Point2>& current() const { return current_; }

  // All robots move in straight lines to `next`, arriving together after the
  // slowest one needs at `speed`. Skipped when nobody moves.
  void synchronized_move(const std::vector<Point2>& next, double speed) {
    double longest = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) longest = std::max(longest, distance(current_[i], next[i]));
    if (longest == 0.0) return;
    advance(next, longest / speed);
  }

  void advance(const std::vector<Point2>& next, double duration) {
    now_ += duration;
    for (std::size_t i = 0; i < next.size(); ++i) paths_[i].waypoints.push_back({next[i], now_});
    current_ = next;
  }

  std::vector<Trajectory> finish() && { return std::move(paths_); }

 private:
  std::vector<Point2> current_;
  std::vector<Trajectory> paths_;
  double now_ = 0.0;
};

// Moves every robot along `dir` until its projected coordinate equals the one
// of its goal; the perpendicular coordinate is untouched.
inline std::vector<Point2> slide_along(std::span<const Point2> from, std::span<const Point2> goal,
                                      const ProjectionAxis& axis) {
  std::vector<Point2> out;
  const Point2 dir = axis.u_direction();
  for (std::size_t i = 0; i < from.size(); ++i) {
    const double delta = axis.u(goal[i]) - axis.u(from[i]);
    out.push_back(delta == 0.0 ? from[i] : from[i] + delta * dir);
  }
  return out;
}

inline bool single_swap_apart(const PermutationState& a, const PermutationState& b) {
  for (const auto& act : action_space(a))
    if (apply_action(a, act) == b) return true;
  return false;
}

}  // namespace detail

// Timed trajectories realizing a permutation path.
//
// Entry: robots slide along grid axis 1, then axis 2, onto their cells (each
// slide synchronized). Swaps: one action at a time, the two robots exchange
// cells in cell_size / speed while everyone else holds. Exit: slide along
// axis 2, then axis 1, to the exact targets. Every slide changes one projected
// coordinate linearly between same-order endpoints, so it creates no
// crossings and keeps pairwise distance >= min(start/target distance, cell_size).
inline std::vector<Trajectory> map_path(std::span<const PermutationState> perm_path, const WorkspaceConfig& cfg,
                                        std::span<const Point2> start, std::span<const Point2> targets) {
  if (perm_path.empty()) throw InputError("map_path: empty permutation path");
  const int n = perm_path.front().size();
  if (static_cast<int>(start.size()) != n || static_cast<int>(targets.size()) != n)
    throw InputError("map_path: position count does not match the team");
  if (!(ranks_from_positions(start, cfg.axes) == perm_path.front()))
    throw InputError("map_path: first permutation does not match the start positions");
  if (!(ranks_from_positions(targets, cfg.axes) == perm_path.back()))
    throw InputError("map_path: last permutation does not match the target positions");
  for (std::size_t k = 1; k < perm_path.size(); ++k)
    if (!detail::single_swap_apart(perm_path[k - 1], perm_path[k]))
      throw InputError("map_path: steps " + std::to_string(k - 1) + " and " + std::to_string(k) +
                       " are not one adjacent swap apart");

  // nothing to do: stay put instead of touring the grid
  if (perm_path.size() == 1 && std::ranges::equal(start, targets)) {
    std::vector<Trajectory> still;
    for (int i = 0; i < n; ++i) still.push_back({i, {{start[i], 0.0}}});
    return still;
  }

  const auto& ax1 = cfg.axes.axis(0);
  const auto& ax2 = cfg.axes.axis(1);
  detail::Timeline line(start);

  const auto entry_cells = cell_positions(cfg, perm_path.front());
  line.synchronized_move(detail::slide_along(line.current(), entry_cells, ax1), cfg.speed);
  line.synchronized_move(detail::slide_along(line.current(), entry_cells, ax2), cfg.speed);

  const double swap_time = cfg.cell_size / cfg.speed;
  for (std::size_t k = 1; k < perm_path.size(); ++k) line.advance(cell_positions(cfg, perm_path[k]), swap_time);

  line.synchronized_move(detail::slide_along(line.current(), targets, ax2), cfg.speed);
  line.synchronized_move(detail::slide_along(line.current(), targets, ax1), cfg.speed);

  // Slides leave round-off in the perpendicular coordinate on rotated grids.
  auto paths = std::move(line).finish();
  for (std::size_t i = 0; i < paths.size(); ++i) paths[i].waypoints.back().position = targets[i];
  return paths;
}

// Raised when executed motion folds into a forbidden braid.
class EntanglementAlarm : public Error {
 public:
  explicit EntanglementAlarm(FoldViolation v)
      : Error("entanglement alarm: robots " + describe(v.robots) + " on axis " + std::to_string(v.axis) +
              " at t=" + std::to_string(v.time) + " reached " + to_string(v.word)),
        violation_(std::move(v)) {}

  const FoldViolation& violation() const { return violation_; }

 private:
  static std::string describe(const std::vector<int>& robots) {
    std::string s = "(";
    for (std::size_t k = 0; k < robots.size(); ++k) s += (k ? "," : "") + std::to_string(robots[k]);
    return s + ")";
  }

  FoldViolation violation_;
};

// Folds the crossings of executed trajectories (both grid axes) into the
// previous braid table. Throws EntanglementAlarm on the first violation.
inline BraidTable carry_over_braids(std::span<const Trajectory> executed, const BraidTable& previous,
                                    const WorkspaceConfig& cfg) {
  if (previous.axes() != 2 || previous.robots() != static_cast<int>(executed.size()))
    throw InputError("carry_over_braids: braid table does not match the team");
  BraidTable table = previous;
  for (int axis = 0; axis < 2; ++axis) {
    const auto list = extract_crossings(executed, cfg.axes.axis(axis), axis, cfg.height);
    auto found = fold_crossings(list, table, axis);
    if (!found.empty()) throw EntanglementAlarm(std::move(found.front()));
  }
  return table;
}

}  // namespace braidplan
