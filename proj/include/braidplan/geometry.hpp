#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "braidplan/braid.hpp"
#include "braidplan/error.hpp"

namespace braidplan {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 lerp(Point2 a, Point2 b, double s) { return {a.x + (b.x - a.x) * s, a.y + (b.y - a.y) * s}; }

struct Waypoint {
  Point2 position;
  double time = 0.0;
  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

// Timed planar path of one robot, linear between waypoints.
struct Trajectory {
  int robot_id = 0;
  std::vector<Waypoint> waypoints;

  double arrival_time() const { return waypoints.empty() ? 0.0 : waypoints.back().time; }

  // Holds the final position after arrival_time().
  Point2 position_at(double t) const {
    if (waypoints.empty()) throw InputError("empty trajectory");
    if (t <= waypoints.front().time) return waypoints.front().position;
    if (t >= waypoints.back().time) return waypoints.back().position;
    auto hi = std::upper_bound(waypoints.begin(), waypoints.end(), t,
                               [](double v, const Waypoint& w) { return v < w.time; });
    auto lo = hi - 1;
    const double s = (t - lo->time) / (hi->time - lo->time);
    return lerp(lo->position, hi->position, s);
  }

  double length() const {
    double l = 0.0;
    for (std::size_t k = 1; k < waypoints.size(); ++k) l += distance(waypoints[k - 1].position, waypoints[k].position);
    return l;
  }

  void validate() const {
    if (waypoints.empty()) throw InputError("robot " + std::to_string(robot_id) + ": empty trajectory");
    if (waypoints.front().time != 0.0) throw InputError("robot " + std::to_string(robot_id) + ": first time must be 0");
    for (std::size_t k = 1; k < waypoints.size(); ++k)
      if (!(waypoints[k].time > waypoints[k - 1].time))
        throw InputError("robot " + std::to_string(robot_id) + ": waypoint times must be strictly increasing");
  }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct SpaceTimePoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double t = 0.0;  // source time, z = t * height / horizon
};

struct SpaceTimeTrajectory {
  int robot_id = 0;
  std::vector<SpaceTimePoint> points;
  double horizon = 0.0;
  double height = 0.0;
};

// Vertical plane P(angle). u is the coordinate along the plane, d the depth
// perpendicular to it; (u, d) is an orthonormal frame of the workspace.
class ProjectionAxis {
 public:
  ProjectionAxis() : ProjectionAxis(0.0) {}
  explicit ProjectionAxis(double angle) : angle_(angle), sin_(std::sin(angle)), cos_(std::cos(angle)) {
    // Multiples of pi/2 get exact 0/+-1 so axis-aligned ties stay exact.
    if (std::abs(sin_) < 1e-12) {
      sin_ = 0.0;
      cos_ = cos_ > 0 ? 1.0 : -1.0;
    } else if (std::abs(cos_) < 1e-12) {
      cos_ = 0.0;
      sin_ = sin_ > 0 ? 1.0 : -1.0;
    }
  }

  double angle() const { return angle_; }
  double u(Point2 p) const { return -p.x * sin_ + p.y * cos_; }
  double depth(Point2 p) const { return p.x * cos_ + p.y * sin_; }
  Point2 u_direction() const { return {-sin_, cos_}; }
  Point2 depth_direction() const { return {cos_, sin_}; }

 private:
  double angle_;
  double sin_;
  double cos_;
};

// A(m) = { i * pi / m : i = 0..m }.
inline std::vector<ProjectionAxis> projection_axes(int m) {
  if (m < 1) throw InputError("projection count m must be positive");
  std::vector<ProjectionAxis> axes;
  for (int i = 0; i <= m; ++i) axes.emplace_back(std::numbers::pi * i / m);
  return axes;
}

struct CrossingEvent {
  double time = 0.0;
  int axis = 0;
  int i = 0;  // smaller robot id
  int j = 0;  // larger robot id
  int left = 0;  // robot on the left just before the swap
  ElementaryBraid letter;
  friend bool operator==(const CrossingEvent&, const CrossingEvent&) = default;
};

struct CrossingList {
  int axis = 0;
  std::vector<int> initial_order;  // robot ids by increasing u at t = 0
  std::vector<int> final_order;
  std::vector<CrossingEvent> events;
  std::size_t tie_breaks = 0;  // grid instants where the id tie-break decided an order
};

// Lifts timed paths to ascending space-time polylines on a shared time grid
// (the union of all waypoint times). Robots hold their last position until the
// team horizon T = max arrival time.
inline std::vector<SpaceTimeTrajectory> build_space_time(std::span<const Trajectory> paths, double height) {
  if (paths.empty()) throw InputError("build_space_time: empty path list");
  if (!(height > 0.0)) throw InputError("build_space_time: height must be positive");
  std::vector<double> grid;
  double horizon = 0.0;
  for (const auto& p : paths) {
    p.validate();
    horizon = std::max(horizon, p.arrival_time());
    for (const auto& w : p.waypoints) grid.push_back(w.time);
  }
  if (!(horizon > 0.0)) throw InputError("build_space_time: team horizon must be positive");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<SpaceTimeTrajectory> out;
  out.reserve(paths.size());
  for (const auto& p : paths) {
    SpaceTimeTrajectory st{p.robot_id, {}, horizon, height};
    st.points.reserve(grid.size());
    for (double t : grid) {
      const Point2 q = p.position_at(t);
      st.points.push_back({q.x, q.y, t * height / horizon, t});
    }
    out.push_back(std::move(st));
  }
  return out;
}

namespace detail {

// (u, id) ordering: the smaller id is treated as infinitesimally smaller in u.
inline bool before(double ua, int a, double ub, int b) { return ua < ub || (ua == ub && a < b); }

}  // namespace detail

// Swap events of the projected order on one axis, in time order.
//
// Within each time-grid segment all motion is linear, so every pair changes
// order at most once; swaps are replayed kinetically (earliest crossing among
// currently adjacent pairs first, lexicographic pair order among events closer
// than `time_tolerance * horizon`). sigma_k has k = 1-based rank of the left
// robot; the sign is +1 iff the left robot is deeper (larger d) at the swap.
inline CrossingList extract_crossings(std::span<const SpaceTimeTrajectory> trajs, const ProjectionAxis& axis,
                                      int axis_id = 0, double time_tolerance = 1e-9) {
  CrossingList out;
  out.axis = axis_id;
  const std::size_t n = trajs.size();
  if (n == 0) return out;
  const std::size_t steps = trajs[0].points.size();
  for (const auto& tr : trajs)
    if (tr.points.size() != steps) throw InputError("extract_crossings: trajectories must share one time grid");

  auto u_at = [&](std::size_t r, std::size_t k) { return axis.u({trajs[r].points[k].x, trajs[r].points[k].y}); };
  auto id = [&](std::size_t r) { return trajs[r].robot_id; };

  // order holds trajectory slots, not robot ids
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto sort_at = [&](std::vector<std::size_t>& ord, std::size_t k) {
    std::sort(ord.begin(), ord.end(),
              [&](std::size_t a, std::size_t b) { return detail::before(u_at(a, k), id(a), u_at(b, k), id(b)); });
    for (std::size_t p = 0; p + 1 < n; ++p)
      if (u_at(ord[p], k) == u_at(ord[p + 1], k)) ++out.tie_breaks;
  };
  sort_at(order, 0);
  for (auto r : order) out.initial_order.push_back(id(r));

  const double horizon = trajs[0].horizon;
  std::vector<std::size_t> end_order(n), end_pos(n);
  for (std::size_t k = 0; k + 1 < steps; ++k) {
    end_order = order;
    sort_at(end_order, k + 1);
    for (std::size_t p = 0; p < n; ++p) end_pos[end_order[p]] = p;
    const double t0 = trajs[0].points[k].t;
    const double t1 = trajs[0].points[k + 1].t;
    const double tol = time_tolerance * horizon / std::max(t1 - t0, std::numeric_limits<double>::min());

    while (true) {
      // earliest inverted adjacent pair
      std::size_t best = n;
      double best_lambda = 0.0;
      for (std::size_t p = 0; p + 1 < n; ++p) {
        const std::size_t a = order[p], b = order[p + 1];
        if (end_pos[a] < end_pos[b]) continue;
        const double s0 = u_at(a, k) - u_at(b, k);
        const double s1 = u_at(a, k + 1) - u_at(b, k + 1);
        double lambda = (s0 == s1) ? 0.0 : s0 / (s0 - s1);
        lambda = std::clamp(lambda, 0.0, 1.0);
        if (best == n || lambda < best_lambda - tol) {
          best = p;
          best_lambda = lambda;
        } else if (lambda <= best_lambda + tol) {
          auto key = [&](std::size_t q) {
            const int x = id(order[q]), y = id(order[q + 1]);
            return std::pair{std::min(x, y), std::max(x, y)};
          };
          if (key(p) < key(best)) {
            best = p;
            best_lambda = std::min(best_lambda, lambda);
          }
        }
      }
      if (best == n) break;

      const std::size_t a = order[best], b = order[best + 1];
      const auto& pa0 = trajs[a].points[k];
      const auto& pa1 = trajs[a].points[k + 1];
      const auto& pb0 = trajs[b].points[k];
      const auto& pb1 = trajs[b].points[k + 1];
      const Point2 qa = lerp({pa0.x, pa0.y}, {pa1.x, pa1.y}, best_lambda);
      const Point2 qb = lerp({pb0.x, pb0.y}, {pb1.x, pb1.y}, best_lambda);
      const double da = axis.depth(qa), db = axis.depth(qb);
      const double t_star = t0 + best_lambda * (t1 - t0);
      if (std::abs(da - db) <= 1e-12 * std::max({1.0, std::abs(da), std::abs(db)}))
        throw DegenerateInput("robots " + std::to_string(id(a)) + " and " + std::to_string(id(b)) +
                              " coincide at t=" + std::to_string(t_star));
      CrossingEvent ev;
      ev.time = t_star;
      ev.axis = axis_id;
      ev.i = std::min(id(a), id(b));
      ev.j = std::max(id(a), id(b));
      ev.left = id(a);
      ev.letter = {static_cast<int>(best) + 1, da > db ? 1 : -1};
      out.events.push_back(ev);
      std::swap(order[best], order[best + 1]);
    }
  }
  for (auto r : order) out.final_order.push_back(id(r));
  return out;
}

// Convenience over raw paths: a team that never moves has no crossings.
inline CrossingList extract_crossings(std::span<const Trajectory> paths, const ProjectionAxis& axis, int axis_id,
                                      double height, double time_tolerance = 1e-9) {
  double horizon = 0.0;
  for (const auto& p : paths) {
    p.validate();
    horizon = std::max(horizon, p.arrival_time());
  }
  if (horizon > 0.0) {
    const auto st = build_space_time(paths, height);
    return extract_crossings(st, axis, axis_id, time_tolerance);
  }
  CrossingList out;
  out.axis = axis_id;
  std::vector<std::size_t> order(paths.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto u0 = [&](std::size_t r) { return axis.u(paths[r].waypoints.front().position); };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detail::before(u0(a), paths[a].robot_id, u0(b), paths[b].robot_id);
  });
  for (auto r : order) out.initial_order.push_back(paths[r].robot_id);
  out.final_order = out.initial_order;
  return out;
}

// Sub-braid of 2 or 3 robots: keeps only events inside the subset and
// re-indexes generators to ranks among the subset.
inline BraidWord sub_braid(const CrossingList& list, std::span<const int> subset) {
  if (subset.size() != 2 && subset.size() != 3) throw InputError("sub_braid: subset must have 2 or 3 robots");
  std::vector<int> order;
  for (int r : list.initial_order)
    if (std::find(subset.begin(), subset.end(), r) != subset.end()) order.push_back(r);
  if (order.size() != subset.size()) throw InputError("sub_braid: subset robots must be distinct team members");
  BraidWord w(static_cast<int>(subset.size()));
  auto in = [&](int r) { return std::find(subset.begin(), subset.end(), r) != subset.end(); };
  for (const auto& ev : list.events) {
    if (!in(ev.i) || !in(ev.j)) continue;
    const auto p = static_cast<std::size_t>(std::find(order.begin(), order.end(), ev.left) - order.begin());
    w.append({static_cast<int>(p) + 1, ev.letter.sign});
    std::swap(order[p], order[p + 1]);
  }
  return w;
}

// Line-oriented dump: "t axis i j s1".
inline std::string format_events(const CrossingList& list) {
  std::ostringstream os;
  os << std::setprecision(10);
  for (const auto& ev : list.events)
    os << ev.time << ' ' << ev.axis << ' ' << ev.i << ' ' << ev.j << ' ' << to_string(ev.letter) << '\n';
  return os.str();
}

struct FoldViolation {
  std::vector<int> robots;  // sorted pair or triplet
  int axis = 0;
  double time = 0.0;
  BraidWord word;
};

// Folds the events of one axis into slot `table_axis` of the table through the
// checked pair/triplet updates. Violated slots are reported once and then left
// alone; everything else keeps updating.
inline std::vector<FoldViolation> fold_crossings(const CrossingList& list, BraidTable& table, int table_axis) {
  std::vector<FoldViolation> found;
  const int n = table.robots();
  std::vector<int> order = list.initial_order;
  if (static_cast<int>(order.size()) != n) throw InputError("fold_crossings: crossing list does not cover the team");
  std::vector<int> rank(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(p)])] = p;

  for (const auto& ev : list.events) {
    const int a = ev.left;
    const int b = ev.i == a ? ev.j : ev.i;
    auto& ps = table.pair(table_axis, a, b);
    if (!ps.violated) {
      auto upd = update_check_2braid(ps, {1, ev.letter.sign});
      ps = upd.state;
      if (!upd.valid) found.push_back({{ev.i, ev.j}, table_axis, ev.time, ps.word()});
    }
    const int ra = rank[static_cast<std::size_t>(a)];
    for (int c = 0; c < n; ++c) {
      if (c == a || c == b) continue;
      auto& ts = table.triplet(table_axis, a, b, c);
      if (ts.violated()) continue;
      const int index = rank[static_cast<std::size_t>(c)] < ra ? 2 : 1;
      auto upd = update_check_3braid(ts, {index, ev.letter.sign});
      ts = upd.state;
      if (!upd.valid) {
        int x = a, y = b, z = c;
        BraidTable::sort3(x, y, z);
        found.push_back({{x, y, z}, table_axis, ev.time, ts.reduced_word()});
      }
    }
    std::swap(rank[static_cast<std::size_t>(a)], rank[static_cast<std::size_t>(b)]);
  }
  return found;
}

}  // namespace braidplan
