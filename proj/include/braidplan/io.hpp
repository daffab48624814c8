#pragma once

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "braidplan/braid.hpp"
#include "braidplan/error.hpp"
#include "braidplan/geometry.hpp"
#include "braidplan/harness.hpp"
#include "braidplan/planner.hpp"
#include "braidplan/workspace.hpp"

namespace braidplan::io {

using nlohmann::json;

// Everything `plan` writes: motion, grid path, resulting braids, statistics.
struct PlanFile {
  int n = 0;
  std::array<double, 2> axes{0.0, std::numbers::pi / 2};
  double height = 3.0;
  std::vector<Point2> bases;
  std::vector<Point2> start;
  std::vector<Point2> targets;
  std::vector<Trajectory> trajectories;
  std::vector<PermutationState> permutation_path;
  BraidTable braids;
  SearchStats stats;
  double plan_time = 0.0;

  friend bool operator==(const PlanFile& a, const PlanFile& b) {
    auto same_stats = [](const SearchStats& x, const SearchStats& y) {
      return x.expanded == y.expanded && x.generated == y.generated && x.rejected_by_braid == y.rejected_by_braid &&
             x.peak_open == y.peak_open && x.root_bound == y.root_bound;
    };
    auto same_trajs = [](const std::vector<Trajectory>& x, const std::vector<Trajectory>& y) {
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].robot_id != y[i].robot_id || x[i].waypoints.size() != y[i].waypoints.size()) return false;
        for (std::size_t k = 0; k < x[i].waypoints.size(); ++k)
          if (!(x[i].waypoints[k].position == y[i].waypoints[k].position) ||
              x[i].waypoints[k].time != y[i].waypoints[k].time)
            return false;
      }
      return true;
    };
    return a.n == b.n && a.axes == b.axes && a.height == b.height && a.bases == b.bases && a.start == b.start &&
           a.targets == b.targets && same_trajs(a.trajectories, b.trajectories) &&
           a.permutation_path == b.permutation_path && a.braids == b.braids && same_stats(a.stats, b.stats) &&
           a.plan_time == b.plan_time;
  }
};

namespace detail {

inline std::string where(const std::string& ctx, const std::string& key) { return ctx.empty() ? key : ctx + "." + key; }

inline const json& require(const json& obj, const std::string& key, const std::string& ctx) {
  if (!obj.is_object()) throw InputError((ctx.empty() ? std::string("document") : ctx) + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError("missing key '" + where(ctx, key) + "'");
  return *it;
}

inline double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw InputError("key '" + key + "': expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw InputError("key '" + key + "': not finite");
  return d;
}

inline std::int64_t integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw InputError("key '" + key + "': expected an integer");
  return v.get<std::int64_t>();
}

inline double number_or(const json& obj, const std::string& key, double fallback, const std::string& ctx = "") {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, where(ctx, key));
}

inline Point2 point(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2) throw InputError("key '" + key + "': expected [x, y]");
  return {number(v[0], key), number(v[1], key)};
}

inline std::vector<Point2> points(const json& v, const std::string& key) {
  if (!v.is_array()) throw InputError("key '" + key + "': expected a list of [x, y]");
  std::vector<Point2> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(point(v[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

inline json to_json(const std::vector<Point2>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back({p.x, p.y});
  return a;
}

inline json trajectories_json(const std::vector<Trajectory>& trajs) {
  json a = json::array();
  for (const auto& tr : trajs) {
    json w = json::array();
    for (const auto& wp : tr.waypoints) w.push_back({wp.position.x, wp.position.y, wp.time});
    a.push_back(std::move(w));
  }
  return a;
}

inline std::vector<Trajectory> trajectories_from(const json& v, const std::string& key) {
  if (!v.is_array()) throw InputError("key '" + key + "': expected a list of waypoint lists");
  std::vector<Trajectory> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string k = key + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].empty()) throw InputError("key '" + k + "': expected a non-empty list of [x, y, t]");
    Trajectory tr{static_cast<int>(i), {}};
    for (std::size_t w = 0; w < v[i].size(); ++w) {
      const auto& wp = v[i][w];
      const std::string kw = k + "[" + std::to_string(w) + "]";
      if (!wp.is_array() || wp.size() != 3) throw InputError("key '" + kw + "': expected [x, y, t]");
      tr.waypoints.push_back({{number(wp[0], kw), number(wp[1], kw)}, number(wp[2], kw)});
    }
    try {
      tr.validate();
    } catch (const Error& e) {
      throw InputError("key '" + k + "': " + e.what());
    }
    out.push_back(std::move(tr));
  }
  return out;
}

}  // namespace detail

// ---- scenario ----

inline Scenario scenario_from_json(const json& doc) {
  using namespace detail;
  Scenario s;
  const auto& ws = require(doc, "workspace", "");
  s.config.region = {number(require(ws, "xmin", "workspace"), "workspace.xmin"),
                     number(require(ws, "xmax", "workspace"), "workspace.xmax"),
                     number(require(ws, "ymin", "workspace"), "workspace.ymin"),
                     number(require(ws, "ymax", "workspace"), "workspace.ymax")};
  s.config.height = number_or(ws, "height", s.config.height, "workspace");
  s.config.cell_size = number_or(doc, "cell_size", s.config.cell_size);
  s.config.d_safe = number_or(doc, "d_safe", s.config.d_safe);
  s.config.speed = number_or(doc, "speed", s.config.speed);
  s.initial_positions = points(require(doc, "initial_positions", ""), "initial_positions");
  if (auto it = doc.find("bases"); it != doc.end()) s.bases = points(*it, "bases");
  if (auto it = doc.find("target_sets"); it != doc.end()) {
    if (!it->is_array()) throw InputError("key 'target_sets': expected a list of point lists");
    for (std::size_t k = 0; k < it->size(); ++k)
      s.target_sets.push_back(points((*it)[k], "target_sets[" + std::to_string(k) + "]"));
  }
  if (auto it = doc.find("seed"); it != doc.end()) {
    const auto v = integer(*it, "seed");
    if (v < 0) throw InputError("key 'seed': must be non-negative");
    s.seed = static_cast<std::uint64_t>(v);
  }
  if (auto it = doc.find("random_target_sets"); it != doc.end())
    s.random_target_sets = static_cast<int>(integer(*it, "random_target_sets"));
  s.gamma_bar = number_or(doc, "gamma_bar", s.gamma_bar);
  if (auto it = doc.find("m"); it != doc.end()) s.m = static_cast<int>(integer(*it, "m"));
  s.limits.bias = number_or(doc, "bias", s.limits.bias);
  if (auto it = doc.find("max_expansions"); it != doc.end()) {
    const auto v = integer(*it, "max_expansions");
    if (v < 0) throw InputError("key 'max_expansions': must be non-negative");
    s.limits.max_expansions = static_cast<std::size_t>(v);
  }
  if (auto it = doc.find("heuristic"); it != doc.end()) {
    if (!it->is_string()) throw InputError("key 'heuristic': expected a string");
    const auto h = it->get<std::string>();
    if (h == "manhattan") {
      s.limits.winding_heuristic = false;
    } else if (h == "winding") {
      s.limits.triplet_heuristic = false;
    } else if (h != "triplet") {
      throw InputError("key 'heuristic': expected manhattan, winding or triplet");
    }
  }
  if (s.bases.empty()) s.bases = s.initial_positions;

  // structural checks, reported against the file's keys
  const auto n = s.initial_positions.size();
  if (n == 0) throw InputError("key 'initial_positions': no robots");
  if (s.bases.size() != n) throw InputError("key 'bases': expected " + std::to_string(n) + " points");
  for (std::size_t k = 0; k < s.target_sets.size(); ++k)
    if (s.target_sets[k].size() != n)
      throw InputError("key 'target_sets[" + std::to_string(k) + "]': expected " + std::to_string(n) + " points");
  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw InputError(std::string("invalid scenario: ") + e.what());
  }
  return s;
}

inline std::string heuristic_name(const PlanLimits& limits) {
  if (!limits.winding_heuristic) return "manhattan";
  return limits.triplet_heuristic ? "triplet" : "winding";
}

inline json scenario_to_json(const Scenario& s) {
  json doc;
  const auto& r = s.config.region;
  doc["workspace"] = {{"xmin", r.xmin}, {"xmax", r.xmax}, {"ymin", r.ymin}, {"ymax", r.ymax}, {"height", s.config.height}};
  doc["cell_size"] = s.config.cell_size;
  doc["d_safe"] = s.config.d_safe;
  doc["speed"] = s.config.speed;
  doc["bases"] = detail::to_json(s.bases);
  doc["initial_positions"] = detail::to_json(s.initial_positions);
  json sets = json::array();
  for (const auto& t : s.target_sets) sets.push_back(detail::to_json(t));
  doc["target_sets"] = std::move(sets);
  doc["seed"] = s.seed;
  doc["random_target_sets"] = s.random_target_sets;
  doc["gamma_bar"] = s.gamma_bar;
  doc["m"] = s.m;
  doc["bias"] = s.limits.bias;
  doc["max_expansions"] = s.limits.max_expansions;
  doc["heuristic"] = heuristic_name(s.limits);
  return doc;
}

// ---- braid tables ----

inline json braids_to_json(const BraidTable& t) {
  json pairs = json::array(), trips = json::array();
  const int n = t.robots();
  for (int axis = 0; axis < t.axes(); ++axis) {
    for (int j = 1; j < n; ++j)
      for (int i = 0; i < j; ++i) {
        const auto& p = t.pair(axis, i, j);
        pairs.push_back({{"axis", axis}, {"robots", {i, j}}, {"word", to_string(p.word())}});
      }
    for (int k = 2; k < n; ++k)
      for (int j = 1; j < k; ++j)
        for (int i = 0; i < j; ++i)
          trips.push_back(
              {{"axis", axis}, {"robots", {i, j, k}}, {"word", to_string(t.triplet(axis, i, j, k).reduced_word())}});
  }
  return {{"robots", n}, {"axes", t.axes()}, {"pairs", pairs}, {"triplets", trips}};
}

inline BraidTable braids_from_json(const json& v, const std::string& key) {
  using namespace detail;
  const int n = static_cast<int>(integer(require(v, "robots", key), key + ".robots"));
  const int axes = static_cast<int>(integer(require(v, "axes", key), key + ".axes"));
  if (n < 1 || axes < 1) throw InputError("key '" + key + "': robots and axes must be positive");
  BraidTable t(n, axes);
  auto entries = [&](const char* name, std::size_t arity, auto&& assign) {
    const auto& list = require(v, name, key);
    if (!list.is_array()) throw InputError("key '" + key + "." + name + "': expected a list");
    for (std::size_t e = 0; e < list.size(); ++e) {
      const std::string k = key + "." + name + "[" + std::to_string(e) + "]";
      const int axis = static_cast<int>(integer(require(list[e], "axis", k), k + ".axis"));
      const auto& robots = require(list[e], "robots", k);
      if (!robots.is_array() || robots.size() != arity) throw InputError("key '" + k + ".robots': wrong arity");
      std::vector<int> ids;
      for (const auto& r : robots) ids.push_back(static_cast<int>(integer(r, k + ".robots")));
      for (std::size_t a = 0; a < ids.size(); ++a)
        if (ids[a] < 0 || ids[a] >= n || (a > 0 && ids[a] <= ids[a - 1]))
          throw InputError("key '" + k + ".robots': ids must be increasing and below " + std::to_string(n));
      if (axis < 0 || axis >= axes) throw InputError("key '" + k + ".axis': out of range");
      const auto& w = require(list[e], "word", k);
      if (!w.is_string()) throw InputError("key '" + k + ".word': expected a string");
      try {
        assign(axis, ids, parse_word(w.get<std::string>(), static_cast<int>(arity)));
      } catch (const InputError& err) {
        throw InputError("key '" + k + ".word': " + err.what());
      }
    }
  };
  entries("pairs", 2, [&](int axis, const std::vector<int>& ids, const BraidWord& word) {
    t.pair(axis, ids[0], ids[1]) = Braid2State::from_word(word);
  });
  entries("triplets", 3, [&](int axis, const std::vector<int>& ids, const BraidWord& word) {
    t.triplet(axis, ids[0], ids[1], ids[2]) = Braid3State::from_word(word);
  });
  return t;
}

// ---- plan files ----

inline json plan_to_json(const PlanFile& p) {
  json doc;
  doc["n"] = p.n;
  doc["axes"] = {p.axes[0], p.axes[1]};
  doc["height"] = p.height;
  doc["bases"] = detail::to_json(p.bases);
  doc["start"] = detail::to_json(p.start);
  doc["targets"] = detail::to_json(p.targets);
  doc["trajectories"] = detail::trajectories_json(p.trajectories);
  json path = json::array();
  for (const auto& s : p.permutation_path) path.push_back({{"pi1", s.pi1}, {"pi2", s.pi2}});
  doc["permutation_path"] = std::move(path);
  doc["braids"] = braids_to_json(p.braids);
  doc["stats"] = {{"expanded", p.stats.expanded},
                  {"generated", p.stats.generated},
                  {"rejected_by_braid", p.stats.rejected_by_braid},
                  {"peak_open", p.stats.peak_open},
                  {"root_bound", p.stats.root_bound}};
  doc["plan_time"] = p.plan_time;
  return doc;
}

inline PlanFile plan_from_json(const json& doc) {
  using namespace detail;
  PlanFile p;
  p.n = static_cast<int>(integer(require(doc, "n", ""), "n"));
  const auto& axes = require(doc, "axes", "");
  if (!axes.is_array() || axes.size() != 2) throw InputError("key 'axes': expected two angles");
  p.axes = {number(axes[0], "axes"), number(axes[1], "axes")};
  p.height = number(require(doc, "height", ""), "height");
  p.bases = points(require(doc, "bases", ""), "bases");
  p.start = points(require(doc, "start", ""), "start");
  p.targets = points(require(doc, "targets", ""), "targets");
  p.trajectories = trajectories_from(require(doc, "trajectories", ""), "trajectories");
  const auto& path = require(doc, "permutation_path", "");
  if (!path.is_array()) throw InputError("key 'permutation_path': expected a list");
  for (std::size_t k = 0; k < path.size(); ++k) {
    const std::string key = "permutation_path[" + std::to_string(k) + "]";
    PermutationState s;
    for (auto [name, vec] : {std::pair{"pi1", &s.pi1}, std::pair{"pi2", &s.pi2}}) {
      const auto& v = require(path[k], name, key);
      if (!v.is_array()) throw InputError("key '" + key + "." + name + "': expected a list");
      for (const auto& r : v) vec->push_back(static_cast<int>(integer(r, key + "." + name)));
    }
    if (!s.valid() || s.size() != p.n) throw InputError("key '" + key + "': not a permutation pair of size n");
    p.permutation_path.push_back(std::move(s));
  }
  p.braids = braids_from_json(require(doc, "braids", ""), "braids");
  const auto& st = require(doc, "stats", "");
  auto count = [&](const char* k) {
    const auto v = integer(require(st, k, "stats"), std::string("stats.") + k);
    if (v < 0) throw InputError(std::string("key 'stats.") + k + "': must be non-negative");
    return static_cast<std::size_t>(v);
  };
  p.stats.expanded = count("expanded");
  p.stats.generated = count("generated");
  p.stats.rejected_by_braid = count("rejected_by_braid");
  p.stats.peak_open = count("peak_open");
  p.stats.root_bound = number_or(st, "root_bound", 0.0, "stats");
  p.plan_time = number(require(doc, "plan_time", ""), "plan_time");
  if (static_cast<int>(p.trajectories.size()) != p.n) throw InputError("key 'trajectories': expected n entries");
  if (p.braids.robots() != p.n) throw InputError("key 'braids': robot count differs from n");
  return p;
}

// Trajectories from any document holding a "trajectories" key (plan files
// included).
inline std::vector<Trajectory> trajectories_from_json(const json& doc) {
  return detail::trajectories_from(detail::require(doc, "trajectories", ""), "trajectories");
}

inline json trajectories_to_json(const std::vector<Trajectory>& trajs) {
  return {{"trajectories", detail::trajectories_json(trajs)}};
}

// ---- run reports ----

inline json metrics_to_json(const RunMetrics& m) {
  json sets = json::array();
  for (const auto& s : m.sets) {
    auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    sets.push_back({{"success", s.success},
                    {"failure", s.failure},
                    {"plan_time", s.plan_time_s},
                    {"path_lengths", s.path_lengths},
                    {"actions", s.actions},
                    {"expanded", s.search.expanded},
                    {"rejected", s.search.rejected_by_braid},
                    {"min_distance", finite_or_null(s.min_distance)},
                    {"violations", s.violations},
                    {"braid_agreement", s.braid_agreement}});
  }
  return {{"sets", sets},
          {"success_rate", m.success_rate},
          {"mean_plan_time", m.mean_plan_time_s},
          {"mean_distance", m.mean_distance}};
}

// ---- single-shot planning ----

// Plans from the scenario's initial positions (identity braids) to `targets`
// and maps the result to trajectories. Returns false when no path was found;
// `out` then still carries the search statistics.
inline bool plan_to_targets(const Scenario& s, const std::vector<Point2>& targets, PlanFile& out) {
  const auto& cfg = s.config;
  const int n = s.robots();
  out = PlanFile{};
  out.n = n;
  out.axes = {cfg.axes.axis(0).angle(), cfg.axes.axis(1).angle()};
  out.height = cfg.height;
  out.bases = s.bases;
  out.start = s.initial_positions;
  out.targets = targets;
  const auto t0 = std::chrono::steady_clock::now();
  auto result = plan(ranks_from_positions(s.initial_positions, cfg.axes), ranks_from_positions(targets, cfg.axes),
                     BraidTable(n, 2), s.limits, cfg.axes);
  out.plan_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.stats = result.stats;
  out.braids = result.final_braids;
  if (!result.found()) return false;
  out.permutation_path = result.path;
  out.trajectories = map_path(result.path, cfg, s.initial_positions, targets);
  return true;
}

// ---- files ----

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw InputError("write failed: " + path);
}

}  // namespace braidplan::io
