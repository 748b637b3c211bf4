#pragma once

#include <cstdint>
#include <vector>

#include "fcnf/instance.hpp"

namespace fcnf {

// Hard-instance profile: roughly 20/20/60 supply/demand/transshipment nodes,
// cheap variable costs against fixed costs three orders of magnitude larger,
// and supplies of 1000-2000 units per supply node.
struct GeneratorParams {
  int node_count = 25;
  std::uint64_t seed = 1;
  double supply_probability = 0.2;
  double demand_probability = 0.2;
  double transship_probability = 0.6;
  double variable_cost_min = 0.0;
  double variable_cost_max = 20.0;
  double fixed_cost_min = 20000.0;
  double fixed_cost_max = 60000.0;
  long long supply_min = 1000;
  long long supply_max = 2000;

  // Throws std::invalid_argument when probabilities do not sum to 1 within
  // 1e-9, a range is degenerate or negative, or node_count < 2.
  void validate() const;
};

// One seeded connected instance. The undirected edge count is drawn uniformly
// from [n-1, n(n-1)/2]; a random spanning tree guarantees connectivity and the
// remaining edges are sampled without replacement. Every undirected edge
// becomes two antiparallel arcs with independent costs. Node roles are drawn
// i.i.d. and minimally repaired so at least one supply and one demand node
// exist. Integer supplies are split integrally across demand nodes (remainder
// to the last one), so requirements balance exactly and flows stay integral.
// Capacities are the artificial big-M (total supply).
FCNFInstance generate_instance(const GeneratorParams& params);

struct SuiteEntry {
  GeneratorParams params;
  FCNFInstance instance;
};

// Deterministic suite: the instance at (level j, index i) is generated with a
// seed derived from (seed, j, i). Each instance's feasibility is verified by
// one min-cost-flow solve before it is returned.
std::vector<SuiteEntry> generate_suite(const std::vector<int>& node_levels, int count_per_level,
                                       std::uint64_t seed);

}  // namespace fcnf
