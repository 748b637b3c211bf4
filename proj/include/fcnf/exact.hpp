#pragma once

#include <vector>

#include "fcnf/instance.hpp"

namespace fcnf {

struct ExactLimits {
  // Subset enumeration is exponential in the arc count; refuse anything
  // larger outright rather than running forever.
  int max_arcs = 20;
  // Budget on subsets visited before giving up on the optimality proof.
  long long max_subsets = 2'000'000;
};

struct ExactResult {
  double objective = 0.0;
  FlowSolution flow;
  std::vector<int> open_arcs;  // support of the returned flow
  bool proven_optimal = false;
  long long subsets_examined = 0;
};

// Ground-truth solver for small instances: enumerates open-arc subsets by
// increasing cardinality, prices each feasible subset with a restricted
// min-cost-flow solve, and prunes by accumulated fixed cost against the
// incumbent. Exact when the enumeration completes within budget; otherwise
// returns the best found with proven_optimal = false. Throws
// std::invalid_argument when the instance exceeds max_arcs.
ExactResult solve_exact(const FCNFInstance& instance, const ExactLimits& limits = {});

}  // namespace fcnf
