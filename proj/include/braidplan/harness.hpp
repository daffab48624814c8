#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "braidplan/braid.hpp"
#include "braidplan/error.hpp"
#include "braidplan/geometry.hpp"
#include "braidplan/planner.hpp"
#include "braidplan/workspace.hpp"

namespace braidplan {

struct Scenario {
  WorkspaceConfig config;
  std::vector<Point2> bases;
  std::vector<Point2> initial_positions;
  std::vector<std::vector<Point2>> target_sets;
  std::uint64_t seed = 1;
  int random_target_sets = 0;  // extra sets drawn from `seed` after the explicit ones
  double gamma_bar = std::numbers::pi / 2 + 1e-3;
  int m = 2;
  PlanLimits limits;

  int robots() const { return static_cast<int>(initial_positions.size()); }

  void validate() const;
  std::vector<std::vector<Point2>> all_target_sets() const;

  friend bool operator==(const Scenario& a, const Scenario& b) {
    return a.config.region == b.config.region && a.config.height == b.config.height &&
           a.config.cell_size == b.config.cell_size && a.config.d_safe == b.config.d_safe &&
           a.config.speed == b.config.speed && a.bases == b.bases && a.initial_positions == b.initial_positions &&
           a.target_sets == b.target_sets && a.seed == b.seed && a.random_target_sets == b.random_target_sets &&
           a.gamma_bar == b.gamma_bar && a.m == b.m && a.limits.bias == b.limits.bias &&
           a.limits.max_expansions == b.limits.max_expansions &&
           a.limits.winding_heuristic == b.limits.winding_heuristic &&
           a.limits.triplet_heuristic == b.limits.triplet_heuristic;
  }
};

// Uniform rejection sampling of n points in the workspace, pairwise >= d_safe.
inline std::vector<Point2> random_targets(std::mt19937_64& rng, const WorkspaceConfig& cfg, int n,
                                          int max_attempts = 100000) {
  std::uniform_real_distribution<double> ux(cfg.region.xmin, cfg.region.xmax);
  std::uniform_real_distribution<double> uy(cfg.region.ymin, cfg.region.ymax);
  std::vector<Point2> pts;
  int attempts = 0;
  while (static_cast<int>(pts.size()) < n) {
    if (++attempts > max_attempts)
      throw ConfigError("random_targets: could not place " + std::to_string(n) + " robots " +
                        std::to_string(cfg.d_safe) + " apart");
    const double x = ux(rng);
    const Point2 p{x, uy(rng)};
    bool ok = true;
    for (const auto& q : pts) ok = ok && distance(p, q) >= cfg.d_safe;
    if (ok) pts.push_back(p);
  }
  return pts;
}

inline void Scenario::validate() const {
  const int n = robots();
  if (n < 1) throw ConfigError("scenario has no robots");
  config.validate(n);
  if (!bases.empty() && static_cast<int>(bases.size()) != n) throw ConfigError("bases: expected " + std::to_string(n) + " points");
  if (!(gamma_bar > 0.0) || gamma_bar > std::numbers::pi) throw ConfigError("gamma_bar must lie in (0, pi]");
  if (m < 1 || !(m > std::numbers::pi / gamma_bar)) throw ConfigError("m must exceed pi / gamma_bar");
  if (random_target_sets < 0) throw ConfigError("random_target_sets must be non-negative");
  if (!(limits.bias > 0.0)) throw ConfigError("bias must be positive");
  auto check_set = [&](const std::vector<Point2>& pts, const std::string& what) {
    if (static_cast<int>(pts.size()) != n) throw ConfigError(what + ": expected " + std::to_string(n) + " points");
    for (std::size_t a = 0; a < pts.size(); ++a) {
      if (!std::isfinite(pts[a].x) || !std::isfinite(pts[a].y)) throw ConfigError(what + ": non-finite point");
      if (!config.region.contains(pts[a])) throw ConfigError(what + ": point outside the workspace");
      for (std::size_t b = a + 1; b < pts.size(); ++b)
        if (distance(pts[a], pts[b]) < config.d_safe)
          throw ConfigError(what + ": robots " + std::to_string(a) + " and " + std::to_string(b) + " closer than d_safe");
    }
  };
  check_set(initial_positions, "initial_positions");
  for (std::size_t k = 0; k < target_sets.size(); ++k) check_set(target_sets[k], "target_sets[" + std::to_string(k) + "]");
}

inline std::vector<std::vector<Point2>> Scenario::all_target_sets() const {
  auto sets = target_sets;
  if (random_target_sets > 0) {
    std::mt19937_64 rng(seed);
    for (int k = 0; k < random_target_sets; ++k) sets.push_back(random_targets(rng, config, robots()));
  }
  return sets;
}

// n random robots (bases = initial positions) and `sets` random target sets.
inline Scenario random_scenario(int n, int sets, std::uint64_t seed, const WorkspaceConfig& cfg = {}) {
  Scenario s;
  s.config = cfg;
  s.seed = seed;
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  s.initial_positions = random_targets(rng, cfg, n);
  s.bases = s.initial_positions;
  s.random_target_sets = sets;
  return s;
}

struct SimulationResult {
  std::vector<double> times;
  std::vector<std::vector<Point2>> positions;  // positions[k][robot]
  double min_distance = std::numeric_limits<double>::infinity();
  double min_distance_time = 0.0;
};

namespace detail {

inline std::vector<double> breakpoints(std::span<const Trajectory> trajs) {
  std::vector<double> ts;
  for (const auto& tr : trajs)
    for (const auto& w : tr.waypoints) ts.push_back(w.time);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

}  // namespace detail

// Kinematic execution sampled every dt; waypoint times are always sampled.
inline SimulationResult simulate(std::span<const Trajectory> trajs, double dt) {
  if (!(dt > 0.0)) throw InputError("simulate: dt must be positive");
  SimulationResult out;
  auto grid = detail::breakpoints(trajs);
  if (grid.empty()) return out;
  const double horizon = grid.back();
  const auto steps = static_cast<std::size_t>(std::floor(horizon / dt));
  for (std::size_t k = 1; k <= steps; ++k) grid.push_back(static_cast<double>(k) * dt);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (double t : grid) {
    std::vector<Point2> now;
    for (const auto& tr : trajs) now.push_back(tr.position_at(t));
    for (std::size_t a = 0; a < now.size(); ++a)
      for (std::size_t b = a + 1; b < now.size(); ++b) {
        const double d = distance(now[a], now[b]);
        if (d < out.min_distance) {
          out.min_distance = d;
          out.min_distance_time = t;
        }
      }
    out.times.push_back(t);
    out.positions.push_back(std::move(now));
  }
  return out;
}

// Exact minimum pairwise distance: relative motion is linear between
// consecutive breakpoints, so each segment is a quadratic minimization.
inline double min_pairwise_distance_exact(std::span<const Trajectory> trajs) {
  const auto grid = detail::breakpoints(trajs);
  double best = std::numeric_limits<double>::infinity();
  if (grid.empty()) return best;
  for (std::size_t a = 0; a < trajs.size(); ++a)
    for (std::size_t b = a + 1; b < trajs.size(); ++b) {
      best = std::min(best, distance(trajs[a].position_at(grid[0]), trajs[b].position_at(grid[0])));
      for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const Point2 r0 = trajs[a].position_at(grid[k]) - trajs[b].position_at(grid[k]);
        const Point2 r1 = trajs[a].position_at(grid[k + 1]) - trajs[b].position_at(grid[k + 1]);
        const Point2 v = r1 - r0;
        const double vv = dot(v, v);
        double s = vv > 0.0 ? std::clamp(-dot(r0, v) / vv, 0.0, 1.0) : 0.0;
        best = std::min({best, norm(r0 + s * v), norm(r1)});
      }
    }
  return best;
}

struct ViolationRecord {
  std::vector<int> robots;
  double axis_angle = 0.0;
  double time = 0.0;
  std::string word;
};

struct EntanglementReport {
  std::vector<ViolationRecord> violations;
  std::vector<std::string> notes;  // tie-break perturbations applied
  BraidTable final_braids;          // one slot per angle of A(m)

  bool clean() const { return violations.empty(); }
};

// Independent check of the non-entanglement conditions: every pair and
// triplet braid on every angle of A(m), at every prefix. `initial` carries
// braids from earlier episodes (one slot per angle of A(m)).
inline EntanglementReport verify(std::span<const Trajectory> trajs, const Scenario& scenario,
                                 const BraidTable* initial = nullptr) {
  const int n = static_cast<int>(trajs.size());
  const auto angles = projection_axes(scenario.m);
  EntanglementReport rep;
  rep.final_braids = initial ? *initial : BraidTable(n, static_cast<int>(angles.size()));
  if (rep.final_braids.robots() != n || rep.final_braids.axes() != static_cast<int>(angles.size()))
    throw InputError("verify: initial braid table does not match the team and A(m)");
  for (int a = 0; a < static_cast<int>(angles.size()); ++a) {
    const auto& axis = angles[static_cast<std::size_t>(a)];
    const auto list = extract_crossings(trajs, axis, a, scenario.config.height);
    if (list.tie_breaks > 0)
      rep.notes.push_back("angle " + std::to_string(axis.angle()) + ": " + std::to_string(list.tie_breaks) +
                          " projected tie(s) resolved by robot index");
    for (auto& v : fold_crossings(list, rep.final_braids, a))
      rep.violations.push_back({v.robots, axis.angle(), v.time, to_string(v.word)});
  }
  return rep;
}

struct SetMetrics {
  bool success = false;
  std::string failure;  // empty on success
  double plan_time_s = 0.0;
  std::vector<double> path_lengths;
  std::size_t actions = 0;
  SearchStats search;
  double min_distance = std::numeric_limits<double>::infinity();
  double min_distance_exact = std::numeric_limits<double>::infinity();
  std::size_t violations = 0;
  bool braid_agreement = true;  // planner prediction == folded geometry
};

struct RunMetrics {
  std::vector<SetMetrics> sets;
  double success_rate = 0.0;
  double mean_plan_time_s = 0.0;
  double mean_distance = 0.0;  // per robot, successful sets only

  std::size_t successes() const {
    return static_cast<std::size_t>(std::count_if(sets.begin(), sets.end(), [](const auto& s) { return s.success; }));
  }
};

struct RunTrace {
  std::vector<std::vector<Trajectory>> executed;  // successful episodes, in order
  std::vector<std::vector<PermutationState>> plans;  // their permutation paths
  BraidTable planner_braids;
  BraidTable verifier_braids;
};

namespace detail {

// Verifier slot whose angle matches a grid axis, or -1.
inline int matching_angle(const std::vector<ProjectionAxis>& angles, const ProjectionAxis& axis) {
  for (std::size_t a = 0; a < angles.size(); ++a)
    if (std::abs(angles[a].angle() - axis.angle()) < 1e-12) return static_cast<int>(a);
  return -1;
}

inline bool same_axis_braids(const BraidTable& grid, int grid_axis, const BraidTable& other, int other_axis) {
  const int n = grid.robots();
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if (!(grid.pair(grid_axis, i, j) == other.pair(other_axis, i, j))) return false;
  for (int k = 2; k < n; ++k)
    for (int j = 1; j < k; ++j)
      for (int i = 0; i < j; ++i)
        if (!grid.triplet(grid_axis, i, j, k).equivalent(other.triplet(other_axis, i, j, k))) return false;
  return true;
}

}  // namespace detail

// Plan -> map -> simulate -> verify -> carry over, for every target set in
// order. A failed set leaves robots and braids where they were.
inline RunMetrics run_task_sequence(const Scenario& scenario, RunTrace* trace = nullptr) {
  scenario.validate();
  const int n = scenario.robots();
  const auto& cfg = scenario.config;
  const double dt = cfg.cell_size / (10.0 * cfg.speed);
  const auto angles = projection_axes(scenario.m);

  std::vector<Point2> positions = scenario.initial_positions;
  BraidTable planner_braids(n, 2);
  BraidTable verifier_braids(n, static_cast<int>(angles.size()));
  RunMetrics metrics;
  double distance_sum = 0.0;

  for (const auto& targets : scenario.all_target_sets()) {
    SetMetrics set;
    const auto start_perm = ranks_from_positions(positions, cfg.axes);
    const auto target_perm = ranks_from_positions(targets, cfg.axes);
    const auto t0 = std::chrono::steady_clock::now();
    auto result = plan(start_perm, target_perm, planner_braids, scenario.limits, cfg.axes);
    set.plan_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    set.search = result.stats;
    if (!result.found()) {
      set.failure = "no path";
      metrics.sets.push_back(std::move(set));
      continue;
    }
    set.actions = result.actions.size();
    const auto trajs = map_path(result.path, cfg, positions, targets);
    const auto sim = simulate(trajs, dt);
    set.min_distance = sim.min_distance;
    set.min_distance_exact = min_pairwise_distance_exact(trajs);
    const auto report = verify(trajs, scenario, &verifier_braids);
    set.violations = report.violations.size();
    for (const auto& tr : trajs) set.path_lengths.push_back(tr.length());

    BraidTable carried;
    try {
      carried = carry_over_braids(trajs, planner_braids, cfg);
    } catch (const EntanglementAlarm& e) {
      set.failure = e.what();
    }
    if (set.failure.empty()) {
      set.braid_agreement = carried.equivalent(result.final_braids);
      for (int l = 0; l < 2; ++l) {
        const int a = detail::matching_angle(angles, cfg.axes.axis(l));
        if (a >= 0) set.braid_agreement = set.braid_agreement && detail::same_axis_braids(carried, l, report.final_braids, a);
      }
    }

    if (!report.clean())
      set.failure = "entanglement: " + std::to_string(report.violations.size()) + " violation(s)";
    else if (sim.min_distance < cfg.d_safe || set.min_distance_exact < cfg.d_safe)
      set.failure = "clearance";
    set.success = set.failure.empty();
    if (set.success) {
      positions = targets;
      planner_braids = carried;
      verifier_braids = report.final_braids;
      double total = 0.0;
      for (double l : set.path_lengths) total += l;
      distance_sum += total / n;
      if (trace) {
        trace->executed.push_back(trajs);
        trace->plans.push_back(result.path);
      }
    }
    metrics.sets.push_back(std::move(set));
  }

  const auto total = metrics.sets.size();
  const auto ok = metrics.successes();
  metrics.success_rate = total ? static_cast<double>(ok) / static_cast<double>(total) : 0.0;
  double time_sum = 0.0;
  for (const auto& s : metrics.sets) time_sum += s.plan_time_s;
  metrics.mean_plan_time_s = total ? time_sum / static_cast<double>(total) : 0.0;
  metrics.mean_distance = ok ? distance_sum / static_cast<double>(ok) : 0.0;
  if (trace) {
    trace->planner_braids = planner_braids;
    trace->verifier_braids = verifier_braids;
  }
  return metrics;
}

}  // namespace braidplan
