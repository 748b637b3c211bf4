#include "fcnf/exact.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fcnf/min_cost_flow.hpp"

namespace fcnf {

namespace {

// Gosper's hack: smallest bit pattern above v with the same popcount.
unsigned int next_same_popcount(unsigned int v) {
  const unsigned int low = v & (~v + 1u);
  const unsigned int ripple = v + low;
  return (((v ^ ripple) >> 2) / low) | ripple;
}

}  // namespace

ExactResult solve_exact(const FCNFInstance& instance, const ExactLimits& limits) {
  const int m = instance.arc_count();
  if (m > limits.max_arcs) {
    throw std::invalid_argument("solve_exact: " + std::to_string(m) + " arcs exceeds the limit of " +
                                std::to_string(limits.max_arcs));
  }

  ExactResult result;
  result.flow.flow.assign(static_cast<size_t>(m), 0.0);

  // Nothing has to ship, so keeping every arc closed is optimal.
  if (instance.total_supply() <= 0.0) {
    result.proven_optimal = true;
    return result;
  }

  // Full-network solve up front: propagates the infeasibility certificate when
  // the instance has no solution at all, and seeds the incumbent so pruning
  // starts working on the first enumeration level.
  {
    const McfResult full = solve_min_cost_flow(instance, instance.variable_cost);
    result.flow = full.solution;
    result.objective = true_objective(instance, full.solution);
  }

  // Sorting by fixed cost makes prefix_fixed[k] the cheapest possible fixed
  // charge of any k-arc subset: once that reaches the incumbent, level k and
  // everything above it are hopeless.
  std::vector<int> order(static_cast<size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return instance.fixed_cost[static_cast<size_t>(a)] <
                                       instance.fixed_cost[static_cast<size_t>(b)]; });
  std::vector<double> prefix_fixed(static_cast<size_t>(m) + 1, 0.0);
  for (int i = 0; i < m; ++i) {
    prefix_fixed[static_cast<size_t>(i) + 1] =
        prefix_fixed[static_cast<size_t>(i)] + instance.fixed_cost[static_cast<size_t>(order[i])];
  }

  bool exhausted = false;
  std::vector<char> open(static_cast<size_t>(m), 0);
  const unsigned int all = 1u << m;

  for (int k = 1; k <= m && !exhausted; ++k) {
    if (prefix_fixed[static_cast<size_t>(k)] >= result.objective) break;

    for (unsigned int mask = (1u << k) - 1u; mask < all;) {
      if (result.subsets_examined >= limits.max_subsets) {
        exhausted = true;
        break;
      }
      ++result.subsets_examined;

      double fixed_sum = 0.0;
      for (unsigned int bits = mask; bits != 0; bits &= bits - 1u) {
        const int a = std::countr_zero(bits);
        fixed_sum += instance.fixed_cost[static_cast<size_t>(a)];
      }
      if (fixed_sum < result.objective) {
        for (int a = 0; a < m; ++a) open[static_cast<size_t>(a)] = (mask >> a) & 1u ? 1 : 0;
        try {
          const McfResult priced = solve_min_cost_flow_restricted(instance, instance.variable_cost, open);
          const double candidate = fixed_sum + priced.objective;
          if (candidate < result.objective) {
            result.flow = priced.solution;
            // Arcs opened but left unused carry no flow, so charge fixed cost
            // on the support only; the support subset itself sits at a lower
            // cardinality already enumerated, which keeps the minimum exact.
            result.objective = true_objective(instance, priced.solution);
          }
        } catch (const InfeasibleNetworkError&) {
          // Subset cannot route the supply; skip it.
        }
      }

      if (mask == all - 1u) break;  // full-cardinality level has a single subset
      mask = next_same_popcount(mask);
    }
  }

  for (int a = 0; a < m; ++a) {
    if (result.flow.open(a)) result.open_arcs.push_back(a);
  }
  result.proven_optimal = !exhausted;
  return result;
}

}  // namespace fcnf
