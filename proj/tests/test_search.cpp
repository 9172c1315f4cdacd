#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "test_util.hpp"

using namespace hubloc;

namespace {

SearchConfig unpruned() {
  SearchConfig c;
  c.enable_pruning = false;
  return c;
}

void expect_same(const Solution& a, const Solution& b) {
  ASSERT_EQ(a.status, b.status);
  if (a.status != SolveStatus::optimal) return;
  EXPECT_EQ(hub_list(a.hub_set), hub_list(b.hub_set));
  EXPECT_LE(testutil::rel_diff(a.objective, b.objective), 1e-9);
}

// Brute-force deterministic optimum with the full x LP, lexicographic ties.
std::optional<std::pair<double, HubMask>> brute_deterministic(const Instance& inst, const Matrix& w,
                                                              const std::vector<double>& f) {
  std::optional<std::pair<double, HubMask>> best;
  const std::size_t n = inst.size();
  for (HubMask m = 1; m < (HubMask{1} << n); ++m) {
    const HubSet h = mask_to_hubset(m, n);
    const auto flow = oracle::full_x_allocation(inst, h, w, {&w});
    if (!flow) continue;
    const double v = *flow + setup_cost(h, f);
    if (!best || v < best->first - 1e-9 * (1 + std::abs(v)) ||
        (std::abs(v - best->first) <= 1e-9 * (1 + std::abs(v)) && mask_lex_less(m, best->second)))
      best = {v, m};
  }
  return best;
}

}  // namespace

TEST(Enumerate, ThreeNodesLexOrder) {
  const auto masks = enumerate_hub_masks(3, {1, 1, 1}, 0.0, false);
  std::vector<std::string> got;
  for (HubMask m : masks) got.push_back(hub_list(mask_to_hubset(m, 3)));
  EXPECT_EQ(got, (std::vector<std::string>{"1", "1,2", "1,2,3", "1,3", "2", "2,3", "3"}));
}

TEST(Enumerate, CapacityPigeonhole) {
  const auto masks = enumerate_hub_masks(3, {1, 1, 1}, 2.5, true);
  ASSERT_EQ(masks.size(), 1u);
  EXPECT_EQ(masks[0], 0b111u);
}

TEST(Enumerate, UnprunedCountsEverySubset) {
  for (std::size_t n = 1; n <= 10; ++n)
    EXPECT_EQ(enumerate_hub_masks(n, std::vector<double>(n, 1.0), 1e9, false).size(), (std::size_t{1} << n) - 1);
  EXPECT_EQ(enumerate_hub_sets(testutil::testcase1(), unpruned()).size(), 31u);
}

TEST(Enumerate, SizeCap) {
  SearchConfig cfg;
  cfg.max_nodes_exhaustive = 4;
  EXPECT_THROW(enumerate_hub_sets(testutil::testcase1(), cfg), InputError);
  cfg.max_nodes_exhaustive = 0;
  EXPECT_THROW(enumerate_hub_sets(testutil::testcase1(), cfg), InputError);
}

TEST(MaskOrder, MatchesHubSetLexOrder) {
  for (HubMask a = 1; a < 64; ++a)
    for (HubMask b = 1; b < 64; ++b)
      EXPECT_EQ(mask_lex_less(a, b), lex_less(mask_to_hubset(a, 6), mask_to_hubset(b, 6))) << a << " " << b;
}

TEST(Deterministic, DegenerateGeometry) {
  Instance inst = testutil::testcase1();
  inst.distances = Matrix(5, 0.0);
  for (auto& f : inst.setup_scenarios) f[3] = 0.0;
  inst.capacities[3] = 1e9;
  const auto s = solve_deterministic(inst, expected_demand(inst), mean_setup(inst));
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_EQ(hub_list(s.hub_set), "4");
  EXPECT_EQ(s.objective, 0.0);
}

TEST(Deterministic, ObjectiveIsFlowPlusSetup) {
  const Instance inst = testutil::with_alpha(testutil::testcase1(), 0.3);
  const auto s = solve_deterministic(inst, expected_demand(inst), mean_setup(inst));
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_LE(testutil::rel_diff(s.objective, s.flow_cost + s.setup_cost), 1e-12);
  EXPECT_DOUBLE_EQ(s.setup_cost, setup_cost(s.hub_set, mean_setup(inst)));
}

TEST(Deterministic, InfeasibleWhenNothingFits) {
  Instance inst = testutil::testcase1();
  for (double& g : inst.capacities) g = 1.0;
  EXPECT_EQ(solve_deterministic(inst, expected_demand(inst), mean_setup(inst)).status, SolveStatus::infeasible);
}

TEST(Deterministic, MatchesBruteForceOnPackagedData) {
  for (double alpha : {0.3, 0.5, 0.7, 1.0}) {
    const Instance inst = testutil::with_alpha(testutil::testcase1(), alpha);
    const Matrix w = expected_demand(inst);
    const auto s = solve_deterministic(inst, w, mean_setup(inst));
    const auto b = brute_deterministic(inst, w, mean_setup(inst));
    ASSERT_TRUE(b);
    EXPECT_EQ(hubset_to_mask(s.hub_set), b->second);
    EXPECT_LE(testutil::rel_diff(s.objective, b->first), 1e-9);
  }
}

TEST(Scenario, OutOfRange) { EXPECT_THROW(solve_scenario(testutil::testcase1(), 4), InputError); }

TEST(Scenario, CollapsesToDeterministic) {
  Instance inst = testutil::testcase1();
  inst.demand_scenarios.resize(1);
  inst.demand_scenarios[0].probability = 1.0;
  inst.setup_scenarios.resize(1);
  expect_same(solve_scenario(inst, 0), solve_deterministic(inst, inst.demand_scenarios[0].demand, inst.setup_scenarios[0]));
}

TEST(Scenario, MatchesBruteForceOnPackagedData) {
  const Instance inst = testutil::with_alpha(testutil::testcase1(), 0.7);
  for (std::size_t t = 0; t < inst.setup_scenarios.size(); ++t) {
    const auto s = solve_scenario(inst, t);
    const auto z = oracle::brute_scenario_optimum(inst, t);
    ASSERT_TRUE(z);
    EXPECT_LE(testutil::rel_diff(s.objective, *z), 1e-9);
  }
}

TEST(Minimax, SingleSetupScenarioHasZeroRegret) {
  Instance inst = testutil::testcase1();
  inst.setup_scenarios.resize(1);
  const auto rep = solve_minimax_regret(inst);
  const auto s = solve_scenario(inst, 0);
  ASSERT_EQ(rep.solution.status, SolveStatus::optimal);
  EXPECT_EQ(hub_list(rep.solution.hub_set), hub_list(s.hub_set));
  EXPECT_LE(std::abs(rep.max_regret), 1e-6 * (1.0 + std::abs(rep.scenario_optima[0])));
}

TEST(Minimax, ReportInvariants) {
  const auto rep = solve_minimax_regret(testutil::testcase1());
  ASSERT_EQ(rep.solution.status, SolveStatus::optimal);
  ASSERT_EQ(rep.regrets.size(), 4u);
  double mx = -1e300;
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_GE(rep.regrets[t], -1e-6 * (1.0 + std::abs(rep.scenario_optima[t])));
    mx = std::max(mx, rep.regrets[t]);
    EXPECT_DOUBLE_EQ(rep.chosen_setup_costs[t], setup_cost(rep.solution.hub_set, testutil::testcase1().setup_scenarios[t]));
  }
  EXPECT_EQ(rep.max_regret, mx);
  EXPECT_EQ(*rep.solution.max_regret, mx);
  EXPECT_EQ(rep.solution.objective, mx);
}

TEST(Minimax, InfeasibleScenarioDiagnostic) {
  Instance inst = testutil::testcase1();
  for (double& g : inst.capacities) g = 1000.0;
  const auto rep = solve_minimax_regret(inst);
  EXPECT_EQ(rep.solution.status, SolveStatus::infeasible);
  EXPECT_NE(rep.diagnostic.find("binding demand scenario"), std::string::npos);
}

TEST(SearchConcurrency, ThreadCountDoesNotChangeResults) {
  const Instance& inst = testutil::casestudy();
  SearchConfig one, four;
  one.threads = 1;
  four.threads = 4;
  expect_same(solve_deterministic(inst, expected_demand(inst), mean_setup(inst), one),
              solve_deterministic(inst, expected_demand(inst), mean_setup(inst), four));
  const auto a = solve_minimax_regret(inst, one), b = solve_minimax_regret(inst, four);
  expect_same(a.solution, b.solution);
  EXPECT_EQ(a.regrets, b.regrets);
}

TEST(SearchProperty, PrunedEqualsUnprunedOn100Instances) {
  std::mt19937_64 rng(404);
  oracle::RandomSpec spec;
  spec.max_nodes = 6;
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = oracle::random_instance(rng, spec);
    const Matrix w = expected_demand(inst);
    const auto f = mean_setup(inst);
    expect_same(solve_deterministic(inst, w, f), solve_deterministic(inst, w, f, unpruned()));
    for (std::size_t t = 0; t < inst.setup_scenarios.size(); ++t)
      expect_same(solve_scenario(inst, t), solve_scenario(inst, t, unpruned()));
    const auto a = solve_minimax_regret(inst), b = solve_minimax_regret(inst, unpruned());
    expect_same(a.solution, b.solution);
  }
}

TEST(SearchProperty, DecompositionMatchesLinearizedModelOn100Instances) {
  std::mt19937_64 rng(505);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = oracle::random_instance(rng);
    const std::size_t n = inst.size();
    const auto rep = solve_minimax_regret(inst);

    std::vector<double> z;
    bool feasible = true;
    for (std::size_t t = 0; t < inst.setup_scenarios.size(); ++t) {
      const auto zs = oracle::brute_scenario_optimum(inst, t);
      if (!zs) feasible = false;
      else z.push_back(*zs);
    }
    ASSERT_EQ(feasible, rep.solution.status == SolveStatus::optimal) << "trial " << trial;
    if (!feasible) continue;
    for (std::size_t t = 0; t < z.size(); ++t) EXPECT_LE(testutil::rel_diff(rep.scenario_optima[t], z[t]), 1e-7);

    std::optional<double> best;
    for (HubMask m = 1; m < (HubMask{1} << n); ++m) {
      const HubSet h = mask_to_hubset(m, n);
      const auto direct = oracle::linearized_regret(inst, h, z);
      if (!direct) continue;
      // every evaluated design: regret is nonnegative
      EXPECT_GE(*direct, -1e-6 * (1.0 + *std::max_element(z.begin(), z.end())));
      // decomposed regret of this design
      const auto flow = solve_allocation_multi(inst, h);
      ASSERT_EQ(flow.status, SolveStatus::optimal);
      double worst = -1e300;
      for (std::size_t t = 0; t < z.size(); ++t)
        worst = std::max(worst, flow.flow_cost + setup_cost(h, inst.setup_scenarios[t]) - z[t]);
      EXPECT_LE(std::abs(worst - *direct), 1e-6 * (1.0 + std::abs(*std::max_element(z.begin(), z.end()))));
      if (!best || *direct < *best) best = *direct;
    }
    ASSERT_TRUE(best);
    EXPECT_LE(std::abs(rep.max_regret - *best), 1e-6 * (1.0 + std::abs(*std::max_element(z.begin(), z.end()))));
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(SearchProperty, Deterministic) {
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance inst = oracle::random_instance(rng);
    const auto a = solve_minimax_regret(inst), b = solve_minimax_regret(inst);
    EXPECT_EQ(a.solution, b.solution);
    EXPECT_EQ(a.regrets, b.regrets);
  }
}
