#include <gtest/gtest.h>

#include <random>

#include "braidplan/harness.hpp"

using namespace braidplan;

namespace {

Trajectory path(int id, std::vector<std::pair<Point2, double>> pts) {
  Trajectory t{id, {}};
  for (auto [p, time] : pts) t.waypoints.push_back({p, time});
  return t;
}

Scenario small_scenario(int n, int sets, std::uint64_t seed) {
  WorkspaceConfig cfg;
  cfg.region = {-8, 8, -8, 8};
  return random_scenario(n, sets, seed, cfg);
}

}  // namespace

TEST(Simulate, SamplesAndMinimum) {
  // head-on pass with 1 m lateral offset
  const std::vector<Trajectory> team{path(0, {{{-2, 0}, 0.0}, {{2, 0}, 4.0}}), path(1, {{{2, 1}, 0.0}, {{-2, 1}, 4.0}})};
  const auto sim = simulate(team, 0.3);
  EXPECT_DOUBLE_EQ(sim.times.front(), 0.0);
  EXPECT_DOUBLE_EQ(sim.times.back(), 4.0);
  for (std::size_t k = 1; k < sim.times.size(); ++k) EXPECT_LE(sim.times[k] - sim.times[k - 1], 0.3 + 1e-12);
  EXPECT_NEAR(sim.min_distance, std::hypot(0.2, 1.0), 1e-12);  // nearest sample t = 2.1
  EXPECT_GE(sim.min_distance, 1.0);
  EXPECT_DOUBLE_EQ(min_pairwise_distance_exact(team), 1.0);
  EXPECT_THROW(simulate(team, 0.0), InputError);
}

TEST(Simulate, ExactMinimumBoundsSampledOne) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> c(-4, 4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Trajectory> team;
    for (int i = 0; i < 3; ++i)
      team.push_back(path(i, {{{c(rng), c(rng)}, 0.0}, {{c(rng), c(rng)}, 1.0}, {{c(rng), c(rng)}, 2.5}}));
    const double exact = min_pairwise_distance_exact(team);
    const auto fine = simulate(team, 1e-4);
    EXPECT_LE(exact, fine.min_distance + 1e-12);
    EXPECT_NEAR(exact, fine.min_distance, 1e-3);
  }
}

TEST(Verify, CleanSingleCrossing) {
  Scenario s = small_scenario(2, 0, 1);
  const std::vector<Trajectory> team{path(0, {{{1, 0}, 0.0}, {{1, 2}, 1.0}}), path(1, {{{0, 2}, 0.0}, {{0, 0}, 1.0}})};
  const auto rep = verify(team, s);
  EXPECT_TRUE(rep.clean());
  EXPECT_EQ(rep.final_braids.axes(), s.m + 1);
  EXPECT_EQ(rep.final_braids.pair(0, 0, 1).exponent_sum, 1);
}

TEST(Verify, ForbiddenTripletIsReported) {
  // On the angle-0 plane (u = y, depth = x): s1, then S2, then s1 again.
  Scenario s = small_scenario(3, 0, 1);
  const std::vector<Trajectory> team{
      path(0, {{{1, 0}, 0.0}, {{1, 1.5}, 1.0}, {{1, 1.5}, 2.0}, {{1, 2.5}, 3.0}, {{1, 2.5}, 5.0}}),
      path(1, {{{0, 1}, 0.0}, {{0, 1}, 3.0}, {{3, 1}, 4.0}, {{3, 2.2}, 5.0}}),
      path(2, {{{0, 2}, 0.0}, {{0, 2}, 1.0}, {{2, 2}, 2.0}, {{2, 2}, 5.0}})};
  const auto list = extract_crossings(team, ProjectionAxis(0.0), 0, s.config.height);
  ASSERT_EQ(list.events.size(), 3u);
  EXPECT_EQ(list.events[0].letter, (ElementaryBraid{1, 1}));
  EXPECT_EQ(list.events[1].letter, (ElementaryBraid{2, -1}));
  EXPECT_EQ(list.events[2].letter, (ElementaryBraid{1, 1}));
  const auto rep = verify(team, s);
  ASSERT_FALSE(rep.clean());
  bool found = false;
  for (const auto& v : rep.violations)
    if (v.axis_angle == 0.0 && v.robots == std::vector<int>{0, 1, 2}) {
      found = true;
      EXPECT_DOUBLE_EQ(v.time, list.events[2].time);
      EXPECT_EQ(v.word, "s1 S2 s1");
    }
  EXPECT_TRUE(found);
}

TEST(Verify, CarriedBraidsCount) {
  // two separate single crossings of the same sign accumulate to a violation
  Scenario s = small_scenario(2, 0, 1);
  const std::vector<Trajectory> once{path(0, {{{1, 0}, 0.0}, {{1, 2}, 1.0}}), path(1, {{{0, 2}, 0.0}, {{0, 0}, 1.0}})};
  const auto first = verify(once, s);
  ASSERT_TRUE(first.clean());
  const std::vector<Trajectory> back{path(0, {{{1, 2}, 0.0}, {{0, 2}, 1.0}, {{0, 0}, 2.0}}),
                                     path(1, {{{0, 0}, 0.0}, {{1, 0}, 1.0}, {{1, 2}, 2.0}})};
  EXPECT_TRUE(verify(back, s).clean());
  EXPECT_FALSE(verify(back, s, &first.final_braids).clean());
  const BraidTable wrong(2, 2);
  EXPECT_THROW(verify(back, s, &wrong), InputError);
}

TEST(Targets, DeterministicAndSeparated) {
  WorkspaceConfig cfg;
  std::mt19937_64 a(42), b(42);
  const auto p = random_targets(a, cfg, 10), q = random_targets(b, cfg, 10);
  EXPECT_EQ(p, q);
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_TRUE(cfg.region.contains(p[i]));
    for (std::size_t j = i + 1; j < p.size(); ++j) EXPECT_GE(distance(p[i], p[j]), cfg.d_safe);
  }
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    EXPECT_NO_THROW(random_targets(rng, cfg, 10));
  }
  cfg.region = {0, 1, 0, 1};
  std::mt19937_64 rng(1);
  EXPECT_THROW(random_targets(rng, cfg, 10, 1000), ConfigError);
}

TEST(ScenarioTest, Validation) {
  auto s = small_scenario(4, 2, 3);
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.all_target_sets().size(), 2u);
  EXPECT_EQ(s.all_target_sets(), small_scenario(4, 2, 3).all_target_sets());
  auto bad = s;
  bad.m = 1;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = s;
  bad.target_sets.push_back({{0, 0}, {0, 0.5}, {3, 3}, {5, 5}});
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = s;
  bad.bases.pop_back();
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = s;
  bad.initial_positions[0] = {100, 0};
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Run, SixRobotsSucceedSoundly) {
  const auto s = small_scenario(6, 8, 7);
  RunTrace trace;
  const auto m = run_task_sequence(s, &trace);
  ASSERT_EQ(m.sets.size(), 8u);
  EXPECT_DOUBLE_EQ(m.success_rate, 1.0);
  for (const auto& set : m.sets) {
    EXPECT_TRUE(set.success) << set.failure;
    EXPECT_EQ(set.violations, 0u);
    EXPECT_TRUE(set.braid_agreement);
    EXPECT_GE(set.min_distance, s.config.d_safe);
    EXPECT_GE(set.min_distance_exact, s.config.d_safe);
    EXPECT_LE(set.min_distance_exact, set.min_distance);
    EXPECT_EQ(set.path_lengths.size(), 6u);
  }
  EXPECT_GT(m.mean_distance, 0.0);
  ASSERT_EQ(trace.executed.size(), 8u);

  // replaying every episode through the verifier reproduces both tables
  BraidTable grid(6, 2);
  BraidTable all(6, s.m + 1);
  for (const auto& team : trace.executed) {
    grid = carry_over_braids(team, grid, s.config);
    auto rep = verify(team, s, &all);
    ASSERT_TRUE(rep.clean());
    all = rep.final_braids;
  }
  EXPECT_TRUE(grid.equivalent(trace.planner_braids));
  EXPECT_TRUE(all.equivalent(trace.verifier_braids));
}

TEST(Run, FailedSetsKeepState) {
  auto s = small_scenario(5, 3, 11);
  s.limits.max_expansions = 1;
  const auto m = run_task_sequence(s);
  ASSERT_EQ(m.sets.size(), 3u);
  for (const auto& set : m.sets) {
    EXPECT_FALSE(set.success);
    EXPECT_EQ(set.failure, "no path");
  }
  EXPECT_EQ(m.success_rate, 0.0);
  EXPECT_EQ(m.mean_distance, 0.0);
}

TEST(Run, Deterministic) {
  const auto s = small_scenario(5, 4, 13);
  const auto a = run_task_sequence(s), b = run_task_sequence(s);
  ASSERT_EQ(a.sets.size(), b.sets.size());
  for (std::size_t k = 0; k < a.sets.size(); ++k) {
    EXPECT_EQ(a.sets[k].actions, b.sets[k].actions);
    EXPECT_EQ(a.sets[k].path_lengths, b.sets[k].path_lengths);
    EXPECT_EQ(a.sets[k].search.expanded, b.sets[k].search.expanded);
  }
}

TEST(Run, TargetsEqualInitialStayPut) {
  auto s = small_scenario(4, 0, 21);
  s.target_sets.push_back(s.initial_positions);
  RunTrace trace;
  const auto m = run_task_sequence(s, &trace);
  ASSERT_EQ(m.sets.size(), 1u);
  EXPECT_TRUE(m.sets[0].success) << m.sets[0].failure;
  EXPECT_EQ(m.sets[0].actions, 0u);
  for (double len : m.sets[0].path_lengths) EXPECT_EQ(len, 0.0);
  EXPECT_EQ(m.mean_distance, 0.0);
  EXPECT_TRUE(trace.planner_braids.equivalent(BraidTable(4, 2)));
}
