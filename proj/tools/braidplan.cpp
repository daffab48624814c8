// braidplan: plan, run, verify and plot tethered-robot motions.

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "braidplan/harness.hpp"
#include "braidplan/io.hpp"
#include "braidplan/svg.hpp"

namespace bp = braidplan;
using bp::io::json;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNoPath = 2;
constexpr int kViolation = 3;

bp::Scenario load_scenario(const std::string& path, std::optional<std::uint64_t> seed_override) {
  auto s = bp::io::scenario_from_json(bp::io::read_json(path));
  if (seed_override) s.seed = *seed_override;
  return s;
}

int cmd_plan(const std::string& scenario_path, std::size_t set_index, const std::string& out_path,
             std::optional<std::uint64_t> seed_override) {
  const auto s = load_scenario(scenario_path, seed_override);
  const auto sets = s.all_target_sets();
  if (set_index >= sets.size())
    throw bp::InputError("--set-index " + std::to_string(set_index) + " out of range (" + std::to_string(sets.size()) +
                         " target sets)");
  bp::io::PlanFile plan;
  if (!bp::io::plan_to_targets(s, sets[set_index], plan)) {
    std::cerr << "no path found after " << plan.stats.expanded << " expansions\n";
    return kNoPath;
  }
  bp::io::write_json(out_path, bp::io::plan_to_json(plan));
  std::cout << "planned " << plan.permutation_path.size() - 1 << " swaps in " << plan.plan_time << " s ("
            << plan.stats.expanded << " expansions)\n";
  return kOk;
}

int cmd_run(const std::string& scenario_path, const std::string& out_path, int replicas, int jobs,
            std::optional<std::uint64_t> seed_override) {
  const auto base = load_scenario(scenario_path, seed_override);
  if (replicas < 1) throw bp::InputError("--replicas must be at least 1");
  std::vector<bp::RunMetrics> results(static_cast<std::size_t>(replicas));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r; (r = next++) < replicas;) {
      auto s = base;
      s.seed = base.seed + static_cast<std::uint64_t>(r);
      results[static_cast<std::size_t>(r)] = bp::run_task_sequence(s);
    }
  };
  std::vector<std::thread> pool;
  for (int k = 0; k < std::clamp(jobs, 1, replicas); ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  json report;
  if (replicas == 1) {
    report = bp::io::metrics_to_json(results.front());
  } else {
    report["replicas"] = json::array();
    for (int r = 0; r < replicas; ++r) {
      auto m = bp::io::metrics_to_json(results[static_cast<std::size_t>(r)]);
      m["seed"] = base.seed + static_cast<std::uint64_t>(r);
      report["replicas"].push_back(std::move(m));
    }
  }
  bp::io::write_json(out_path, report);
  for (const auto& m : results)
    std::cout << "sets " << m.sets.size() << "  success rate " << m.success_rate << "  mean plan time "
              << m.mean_plan_time_s << " s\n";
  return kOk;
}

int cmd_verify(const std::string& traj_path, const std::string& scenario_path, bool events) {
  const auto s = load_scenario(scenario_path, std::nullopt);
  const auto trajs = bp::io::trajectories_from_json(bp::io::read_json(traj_path));
  if (static_cast<int>(trajs.size()) != s.robots())
    throw bp::InputError("trajectory file has " + std::to_string(trajs.size()) + " robots, scenario has " +
                         std::to_string(s.robots()));
  const auto report = bp::verify(trajs, s);
  if (events) {
    const auto angles = bp::projection_axes(s.m);
    for (int a = 0; a < static_cast<int>(angles.size()); ++a)
      std::cout << bp::format_events(bp::extract_crossings(trajs, angles[static_cast<std::size_t>(a)], a, s.config.height));
  }
  for (const auto& note : report.notes) std::cout << "note: " << note << '\n';
  if (report.clean()) {
    std::cout << "clean\n";
    return kOk;
  }
  for (const auto& v : report.violations) {
    std::cout << "violation: robots (";
    for (std::size_t k = 0; k < v.robots.size(); ++k) std::cout << (k ? "," : "") << v.robots[k];
    std::cout << ") angle " << v.axis_angle << " t=" << v.time << " word " << v.word << '\n';
  }
  return kViolation;
}

int cmd_plot(const std::string& input_path, const std::string& out_path, bool paths, std::optional<int> braid_axis) {
  if (paths == braid_axis.has_value()) throw bp::InputError("choose exactly one of --paths and --braid");
  const auto doc = bp::io::read_json(input_path);
  const auto trajs = bp::io::trajectories_from_json(doc);
  std::vector<bp::Point2> bases, targets;
  double height = 3.0;
  std::array<double, 2> axes{0.0, std::numbers::pi / 2};
  if (doc.contains("n")) {
    const auto plan = bp::io::plan_from_json(doc);
    bases = plan.bases;
    targets = plan.targets;
    height = plan.height;
    axes = plan.axes;
  }
  std::string svg;
  if (paths) {
    svg = bp::svg::render_paths({trajs, bases, targets});
  } else {
    if (*braid_axis < 0 || *braid_axis > 1) throw bp::InputError("--braid axis must be 0 or 1");
    const bp::ProjectionAxis axis(axes[static_cast<std::size_t>(*braid_axis)]);
    svg = bp::svg::render_braid(bp::extract_crossings(trajs, axis, *braid_axis, height));
  }
  std::ofstream out(out_path);
  if (!(out << svg)) throw bp::InputError("cannot write " + out_path);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Braid-constrained path planning for tethered robots"};
  app.require_subcommand(1);

  std::string scenario, out, input;
  std::size_t set_index = 0;
  int jobs = 1, replicas = 1;
  std::optional<std::uint64_t> seed_override;
  bool events = false, paths = false;
  std::optional<int> braid_axis;

  auto* plan = app.add_subcommand("plan", "plan one target set from the initial positions");
  plan->add_option("--scenario", scenario, "scenario JSON")->required();
  plan->add_option("--set-index", set_index, "target set to plan for")->default_val(0);
  plan->add_option("--out", out, "plan file to write")->required();
  plan->add_option("--seed-override", seed_override, "replace the scenario seed");

  auto* run = app.add_subcommand("run", "run the whole target-set sequence");
  run->add_option("--scenario", scenario, "scenario JSON")->required();
  run->add_option("--out", out, "report JSON to write")->required();
  run->add_option("--replicas", replicas, "independent replicas with seeds seed, seed+1, ...")->default_val(1);
  run->add_option("--jobs", jobs, "replicas run in parallel")->default_val(1);
  run->add_option("--seed-override", seed_override, "replace the scenario seed");

  auto* verify = app.add_subcommand("verify", "check executed trajectories for entanglement");
  verify->add_option("--trajectories,--input", input, "trajectory or plan JSON")->required();
  verify->add_option("--scenario", scenario, "scenario JSON")->required();
  verify->add_flag("--events", events, "print every crossing event");

  auto* plot = app.add_subcommand("plot", "render paths or a braid diagram as SVG");
  plot->add_option("--input,--trajectories", input, "plan or trajectory JSON")->required();
  plot->add_option("--out", out, "SVG to write")->required();
  plot->add_flag("--paths", paths, "top view of the paths");
  plot->add_option("--braid", braid_axis, "braid diagram on grid axis 0 or 1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*plan) return cmd_plan(scenario, set_index, out, seed_override);
    if (*run) return cmd_run(scenario, out, replicas, jobs, seed_override);
    if (*verify) return cmd_verify(input, scenario, events);
    if (*plot) return cmd_plot(input, out, paths, braid_axis);
  } catch (const bp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
