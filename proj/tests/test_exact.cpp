#include <cmath>

#include "doctest.h"
#include "fcnf/dssp.hpp"
#include "fcnf/exact.hpp"
#include "fcnf/instance.hpp"
#include "fcnf/min_cost_flow.hpp"
#include "oracles.hpp"

namespace {

fcnf::FCNFInstance parallel_pair() {
  fcnf::FCNFInstance instance;
  instance.node_count = 2;
  instance.arcs = {{0, 1}, {0, 1}};
  instance.requirement = {10.0, -10.0};
  instance.variable_cost = {1.0, 5.0};
  instance.fixed_cost = {100.0, 10.0};
  instance.capacity = {10.0, 10.0};
  return instance;
}

}  // namespace

TEST_CASE("two-arc instance: the cheap-fixed arc wins") {
  const auto result = fcnf::solve_exact(parallel_pair());
  CHECK(result.objective == 60.0);
  CHECK(result.open_arcs == std::vector<int>{1});
  CHECK(result.proven_optimal);
  CHECK(result.flow.flow == std::vector<double>{0.0, 10.0});
}

TEST_CASE("single arc: optimum is c*S + f") {
  fcnf::FCNFInstance instance;
  instance.node_count = 2;
  instance.arcs = {{0, 1}};
  instance.requirement = {7.0, -7.0};
  instance.variable_cost = {3.0};
  instance.fixed_cost = {50.0};
  instance.capacity = {7.0};
  const auto result = fcnf::solve_exact(instance);
  CHECK(result.objective == 3.0 * 7.0 + 50.0);
  CHECK(result.open_arcs == std::vector<int>{0});
}

TEST_CASE("matches flow enumeration on random tiny instances") {
  for (std::uint64_t seed = 101; seed <= 120; ++seed) {
    const auto instance = oracle::tiny_instance(seed);
    CAPTURE(seed);
    const auto exact = fcnf::solve_exact(instance);
    const auto reference = oracle::brute_force_fcnf(instance);
    REQUIRE(reference.has_value());
    CHECK(exact.objective == reference->objective);
    CHECK(exact.proven_optimal);
    CHECK(exact.subsets_examined >= 1);
    CHECK(fcnf::check_feasibility(instance, exact.flow).empty());
    CHECK(fcnf::true_objective(instance, exact.flow) == exact.objective);

    for (const int a : exact.open_arcs) CHECK(exact.flow.open(a));
    CHECK(static_cast<int>(exact.open_arcs.size()) == exact.flow.open_count());
  }
}

TEST_CASE("slope scaling never beats the oracle on a psi grid") {
  const auto instance = oracle::tiny_instance(7);
  const auto exact = fcnf::solve_exact(instance);
  for (int step = 1; step <= 40; ++step) {
    const double psi = 0.05 * step;
    CAPTURE(psi);
    CHECK(fcnf::run_dssp(instance, psi).best_objective >= exact.objective);
  }
}

TEST_CASE("opening more arcs never raises the restricted variable-cost optimum") {
  const auto instance = oracle::tiny_instance(13);
  const int m = instance.arc_count();
  const std::vector<char> all_open(static_cast<size_t>(m), 1);
  const double full = fcnf::solve_min_cost_flow_restricted(instance, instance.variable_cost, all_open).objective;

  for (int drop = 0; drop < m; ++drop) {
    std::vector<char> open = all_open;
    open[static_cast<size_t>(drop)] = 0;
    try {
      const double restricted =
          fcnf::solve_min_cost_flow_restricted(instance, instance.variable_cost, open).objective;
      CHECK(restricted >= full - 1e-9);
    } catch (const fcnf::InfeasibleNetworkError&) {
      // Dropping a load-bearing arc can starve the demand; that is fine here.
    }
  }
}

TEST_CASE("arc limit and budget behavior") {
  fcnf::FCNFInstance wide;
  wide.node_count = 2;
  wide.requirement = {5.0, -5.0};
  for (int a = 0; a < 21; ++a) {
    wide.arcs.push_back({0, 1});
    wide.variable_cost.push_back(1.0);
    wide.fixed_cost.push_back(1.0);
    wide.capacity.push_back(5.0);
  }
  CHECK_THROWS_AS(fcnf::solve_exact(wide), std::invalid_argument);

  const auto instance = oracle::tiny_instance(3);
  fcnf::ExactLimits tight;
  tight.max_subsets = 1;
  const auto truncated = fcnf::solve_exact(instance, tight);
  CHECK_FALSE(truncated.proven_optimal);
  const auto reference = oracle::brute_force_fcnf(instance);
  REQUIRE(reference.has_value());
  CHECK(truncated.objective >= reference->objective);  // still a feasible solution
  CHECK(fcnf::check_feasibility(instance, truncated.flow).empty());
}

TEST_CASE("zero total supply closes every arc") {
  fcnf::FCNFInstance instance;
  instance.node_count = 2;
  instance.arcs = {{0, 1}};
  instance.requirement = {0.0, 0.0};
  instance.variable_cost = {1.0};
  instance.fixed_cost = {10.0};
  instance.capacity = {5.0};
  const auto result = fcnf::solve_exact(instance);
  CHECK(result.objective == 0.0);
  CHECK(result.open_arcs.empty());
  CHECK(result.proven_optimal);
}

TEST_CASE("infeasible instances propagate the solver certificate") {
  fcnf::FCNFInstance instance;
  instance.node_count = 2;
  instance.arcs = {{1, 0}};
  instance.requirement = {5.0, -5.0};
  instance.variable_cost = {1.0};
  instance.fixed_cost = {10.0};
  instance.capacity = {5.0};
  CHECK_THROWS_AS(fcnf::solve_exact(instance), fcnf::InfeasibleNetworkError);
}
