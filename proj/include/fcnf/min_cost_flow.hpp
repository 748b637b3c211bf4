#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fcnf/instance.hpp"

namespace fcnf {

// Per-arc linear cost coefficients for the flow subproblem. Must be finite and
// non-negative (slope-scaled coefficients always are: c >= 0, f >= 0, x~ > 0).
using LinearArcCosts = std::vector<double>;

// Thrown when demand cannot be met; carries the unmet demand nodes as a
// certificate.
class InfeasibleNetworkError : public std::runtime_error {
 public:
  InfeasibleNetworkError(std::string message, std::vector<int> deficit_nodes)
      : std::runtime_error(std::move(message)), deficit_nodes(std::move(deficit_nodes)) {}

  std::vector<int> deficit_nodes;
};

struct McfResult {
  FlowSolution solution;
  double objective = 0.0;      // sum of cost[e] * flow[e] over original arcs
  int augmentations = 0;       // shortest-path rounds (cold solve)
  int cycles_canceled = 0;     // warm start only
  bool used_fallback = false;  // warm start fell back to a cold solve
  std::vector<double> potentials;  // final node potentials, for debugging
};

// Minimum-cost feasible flow for linear per-arc costs, via successive shortest
// augmenting paths with node potentials over a super-source/super-sink
// transformation. Deterministic: ties are broken by lowest node id and lowest
// arc index. With integer requirements and capacities the returned flow is
// integral.
McfResult solve_min_cost_flow(const FCNFInstance& instance, const LinearArcCosts& costs);

// Same problem with closed arcs removed: arcs with open[e] == false carry no
// flow. Used by the exact solver to price an open-arc subset.
McfResult solve_min_cost_flow_restricted(const FCNFInstance& instance, const LinearArcCosts& costs,
                                         const std::vector<char>& open);

// Re-optimizes a feasible flow after a cost change by canceling negative
// residual cycles. Matches the cold-solve objective; falls back to a cold
// solve if the previous flow is unusable or cancellation stalls.
McfResult warm_start_solve(const FCNFInstance& instance, const LinearArcCosts& costs,
                           const FlowSolution& previous, int max_cycles = 10000);

struct OptimalityCheck {
  bool optimal = false;
  // Most negative reduced cost over residual arcs under independently
  // recomputed potentials; >= -tolerance iff optimal.
  double worst_reduced_cost = 0.0;
};

// Independent certificate: runs Bellman-Ford on the residual network of
// `solution` and checks complementary slackness. Does not reuse any state
// from the solvers above.
OptimalityCheck verify_optimality(const FCNFInstance& instance, const LinearArcCosts& costs,
                                  const FlowSolution& solution, double tolerance = 1e-7);

}  // namespace fcnf
