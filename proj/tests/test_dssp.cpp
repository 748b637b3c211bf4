#include <algorithm>

#include "doctest.h"
#include "fcnf/dssp.hpp"
#include "fcnf/instance.hpp"
#include "oracles.hpp"

namespace {

// Two parallel arcs where slope scaling immediately settles on the cheap
// fixed-cost arc: A (c=1, f=100), B (c=5, f=10), demand 10, caps 10.
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

// A third arc C (c=5.1, f=4, cap 5) added to the pair traps psi = 1 at the
// split solution worth 64.5 while all-on-B (60, the true optimum) is found
// for psi between 2/9 and 1/2.
fcnf::FCNFInstance parallel_trap() {
  fcnf::FCNFInstance instance = parallel_pair();
  instance.variable_cost[0] = 3.0;
  instance.arcs.push_back({0, 1});
  instance.variable_cost.push_back(5.1);
  instance.fixed_cost.push_back(4.0);
  instance.capacity.push_back(5.0);
  return instance;
}

}  // namespace

TEST_CASE("pseudo-flow starts at min(capacity, total supply)") {
  auto instance = parallel_pair();
  instance.capacity = {1000.0, 4.0};
  const auto pseudo = fcnf::initialize_pseudo_flow(instance);
  CHECK(pseudo == std::vector<double>{10.0, 4.0});

  instance.requirement = {0.0, 0.0};
  CHECK_THROWS_AS(fcnf::initialize_pseudo_flow(instance), fcnf::ValidationError);
}

TEST_CASE("pseudo-flow keeps its previous value where flow vanishes") {
  fcnf::FlowSolution current;
  current.flow = {7.0};
  CHECK(fcnf::update_pseudo_flow({10.0}, current) == std::vector<double>{7.0});

  current.flow = {0.0};
  CHECK(fcnf::update_pseudo_flow({10.0}, current) == std::vector<double>{10.0});

  current.flow = {0.0, 3.0};
  CHECK(fcnf::update_pseudo_flow({10.0, 10.0}, current) == std::vector<double>{10.0, 3.0});
}

TEST_CASE("scaled costs fold the fixed charge into the slope") {
  fcnf::FCNFInstance instance;
  instance.node_count = 2;
  instance.arcs = {{0, 1}};
  instance.requirement = {10.0, -10.0};
  instance.variable_cost = {2.0};
  instance.fixed_cost = {100.0};
  instance.capacity = {10.0};

  CHECK(fcnf::scaled_costs(instance, {10.0}, 1.0) == fcnf::LinearArcCosts{12.0});
  CHECK(fcnf::scaled_costs(instance, {10.0}, 0.5) == fcnf::LinearArcCosts{7.0});

  instance.variable_cost = {0.0};
  instance.fixed_cost = {60000.0};
  CHECK(fcnf::scaled_costs(instance, {1500.0}, 1.25) == fcnf::LinearArcCosts{50.0});

  CHECK_THROWS_AS(fcnf::scaled_costs(instance, {1500.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fcnf::scaled_costs(instance, {1500.0}, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(fcnf::scaled_costs(instance, {0.0}, 1.0), std::invalid_argument);
}

TEST_CASE("slope scaling settles on the cheap-fixed arc in two iterations") {
  const auto instance = parallel_pair();
  const auto result = fcnf::run_dssp(instance, 1.0);

  CHECK(result.best_objective == 60.0);
  CHECK(result.iterations == 2);
  CHECK(result.converged);
  REQUIRE(result.trajectory.size() == 2);
  CHECK(result.trajectory[0].objective == 60.0);
  CHECK(result.trajectory[1].objective == 60.0);
  CHECK(result.trajectory[0].arcs_open == 1);
  CHECK(result.best_flow.flow == std::vector<double>{0.0, 10.0});
  CHECK(fcnf::check_feasibility(instance, result.best_flow).empty());
}

TEST_CASE("an iteration budget of one returns the first iterate") {
  const auto instance = parallel_pair();
  fcnf::DsspLimits limits;
  limits.max_iterations = 1;
  const auto result = fcnf::run_dssp(instance, 1.0, limits);
  CHECK(result.iterations == 1);
  CHECK_FALSE(result.converged);
  CHECK(result.trajectory.size() == 1);
  CHECK(result.best_objective == result.trajectory[0].objective);
}

TEST_CASE("psi steers the trap instance between 64.5 and the optimum 60") {
  const auto instance = parallel_trap();

  const auto trapped = fcnf::run_dssp(instance, 1.0);
  CHECK(trapped.best_objective == 64.5);

  for (const double psi : {0.25, 0.3, 0.45}) {
    CAPTURE(psi);
    CHECK(fcnf::run_dssp(instance, psi).best_objective == 60.0);
  }

  const auto reference = oracle::brute_force_fcnf(instance);
  REQUIRE(reference.has_value());
  CHECK(reference->objective == 60.0);
}

TEST_CASE("best objective is the running minimum of the trajectory") {
  for (std::uint64_t seed = 50; seed < 58; ++seed) {
    const auto instance = oracle::tiny_instance(seed);
    CAPTURE(seed);
    for (const double psi : {0.25, 1.0, 1.75}) {
      const auto result = fcnf::run_dssp(instance, psi);
      REQUIRE_FALSE(result.trajectory.empty());
      double minimum = result.trajectory[0].objective;
      for (const auto& point : result.trajectory) minimum = std::min(minimum, point.objective);
      CHECK(result.best_objective == minimum);
      CHECK(fcnf::check_feasibility(instance, result.best_flow).empty());
    }
  }
}

TEST_CASE("psi = 1 trajectory matches the recoded naive procedure") {
  for (std::uint64_t seed = 60; seed < 66; ++seed) {
    const auto instance = oracle::tiny_instance(seed);
    CAPTURE(seed);
    const auto result = fcnf::run_dssp(instance, 1.0);
    const auto reference = oracle::naive_dssp_objectives(instance, 1.0, 200);
    REQUIRE(result.trajectory.size() == reference.size());
    for (size_t k = 0; k < reference.size(); ++k) {
      CHECK(result.trajectory[k].objective == reference[k]);
    }
  }
}

TEST_CASE("evaluator memoizes on a 1e-6 psi grid and clamps the domain") {
  const auto instance = parallel_trap();
  fcnf::PsiEvaluator evaluator(instance);

  CHECK(evaluator.evaluate(1.0) == 64.5);
  CHECK(evaluator.evaluate(1.0) == 64.5);
  CHECK(evaluator.unique_evaluations() == 1);

  CHECK(evaluator.evaluate(1.0 + 4e-8) == 64.5);
  CHECK(evaluator.unique_evaluations() == 1);

  CHECK(evaluator.evaluate(0.25) == 60.0);
  CHECK(evaluator.unique_evaluations() == 2);

  // Out-of-domain values clamp to the working range.
  CHECK(evaluator.evaluate(5.0) == evaluator.evaluate(2.0));
  CHECK(evaluator.evaluate(1e-9) == evaluator.evaluate(0.01));
  CHECK(fcnf::PsiEvaluator::memo_key(5.0) == fcnf::PsiEvaluator::memo_key(2.0));

  const auto& cached = evaluator.result(0.25);
  CHECK(cached.best_objective == 60.0);
  CHECK(&cached == &evaluator.result(0.25 + 1e-9));
}
