#include "fcnf/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>

#include "fcnf/min_cost_flow.hpp"
#include "fcnf/rng.hpp"

namespace fcnf {

namespace {

enum class Role { supply, demand, transship };

// Converts one node to `target`, chosen uniformly among `from` roles; falls
// back to `fallback` roles when none exist (possible only at tiny n).
void repair_role(std::vector<Role>& roles, Role target, Role from, Role fallback,
                 std::mt19937_64& rng) {
  if (std::count(roles.begin(), roles.end(), target) > 0) return;
  std::vector<int> candidates;
  for (int v = 0; v < static_cast<int>(roles.size()); ++v)
    if (roles[static_cast<size_t>(v)] == from) candidates.push_back(v);
  if (candidates.empty()) {
    for (int v = 0; v < static_cast<int>(roles.size()); ++v)
      if (roles[static_cast<size_t>(v)] == fallback) candidates.push_back(v);
  }
  if (candidates.empty()) throw std::logic_error("role repair found no convertible node");
  const auto pick = static_cast<size_t>(uniform_int(rng, 0, static_cast<long long>(candidates.size()) - 1));
  roles[static_cast<size_t>(candidates[pick])] = target;
}

}  // namespace

void GeneratorParams::validate() const {
  if (node_count < 2) throw std::invalid_argument("need at least 2 nodes");
  const double total = supply_probability + demand_probability + transship_probability;
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("role probabilities must sum to 1");
  if (supply_probability < 0 || demand_probability < 0 || transship_probability < 0)
    throw std::invalid_argument("role probabilities must be non-negative");
  if (variable_cost_min < 0 || !(variable_cost_min < variable_cost_max))
    throw std::invalid_argument("variable cost range must be non-negative and non-degenerate");
  if (fixed_cost_min < 0 || !(fixed_cost_min < fixed_cost_max))
    throw std::invalid_argument("fixed cost range must be non-negative and non-degenerate");
  if (supply_min < 1 || supply_min > supply_max)
    throw std::invalid_argument("supply range must satisfy 1 <= min <= max");
}

FCNFInstance generate_instance(const GeneratorParams& params) {
  params.validate();
  std::mt19937_64 rng = make_rng(params.seed);
  const int n = params.node_count;
  const long long max_edges = static_cast<long long>(n) * (n - 1) / 2;

  // Draw order is pinned for reproducibility: edge count, spanning tree,
  // extra edges, roles, supplies, demand split, then per-arc costs.
  const long long edge_count = uniform_int(rng, n - 1, max_edges);

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int v = n - 1; v > 0; --v)
    std::swap(order[static_cast<size_t>(v)],
              order[static_cast<size_t>(uniform_int(rng, 0, v))]);

  std::set<std::pair<int, int>> edges;
  auto canonical = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
  for (int idx = 1; idx < n; ++idx) {
    const int attach = order[static_cast<size_t>(uniform_int(rng, 0, idx - 1))];
    edges.insert(canonical(order[static_cast<size_t>(idx)], attach));
  }

  std::vector<std::pair<int, int>> remaining;
  remaining.reserve(static_cast<size_t>(max_edges) - edges.size());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (!edges.count({a, b})) remaining.emplace_back(a, b);
  for (size_t v = remaining.size(); v > 1; --v)
    std::swap(remaining[v - 1],
              remaining[static_cast<size_t>(uniform_int(rng, 0, static_cast<long long>(v) - 1))]);
  for (long long e = 0; e < edge_count - (n - 1); ++e)
    edges.insert(remaining[static_cast<size_t>(e)]);

  std::vector<Role> roles(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) {
    const double u = uniform_real(rng, 0.0, 1.0);
    roles[static_cast<size_t>(v)] = u < params.supply_probability ? Role::supply
                                    : u < params.supply_probability + params.demand_probability
                                        ? Role::demand
                                        : Role::transship;
  }
  repair_role(roles, Role::supply, Role::transship, Role::demand, rng);
  repair_role(roles, Role::demand, Role::transship, Role::supply, rng);

  FCNFInstance instance;
  instance.node_count = n;
  instance.requirement.assign(static_cast<size_t>(n), 0.0);

  long long total_supply = 0;
  for (int v = 0; v < n; ++v) {
    if (roles[static_cast<size_t>(v)] != Role::supply) continue;
    const long long supply = uniform_int(rng, params.supply_min, params.supply_max);
    instance.requirement[static_cast<size_t>(v)] = static_cast<double>(supply);
    total_supply += supply;
  }

  std::vector<int> demand_nodes;
  for (int v = 0; v < n; ++v)
    if (roles[static_cast<size_t>(v)] == Role::demand) demand_nodes.push_back(v);
  std::vector<double> weights(demand_nodes.size());
  double weight_sum = 0.0;
  for (size_t d = 0; d < demand_nodes.size(); ++d) {
    weights[d] = uniform_real(rng, 0.0, 1.0);
    weight_sum += weights[d];
  }
  long long assigned = 0;
  for (size_t d = 0; d + 1 < demand_nodes.size(); ++d) {
    const long long share =
        weight_sum > 0.0
            ? static_cast<long long>(std::floor(static_cast<double>(total_supply) * weights[d] / weight_sum))
            : total_supply / static_cast<long long>(demand_nodes.size());
    instance.requirement[static_cast<size_t>(demand_nodes[d])] = -static_cast<double>(share);
    assigned += share;
  }
  instance.requirement[static_cast<size_t>(demand_nodes.back())] =
      -static_cast<double>(total_supply - assigned);

  for (const auto& [a, b] : edges) {
    instance.arcs.push_back({a, b});
    instance.arcs.push_back({b, a});
  }
  for (size_t e = 0; e < instance.arcs.size(); ++e) {
    instance.variable_cost.push_back(uniform_real(rng, params.variable_cost_min, params.variable_cost_max));
    instance.fixed_cost.push_back(uniform_real(rng, params.fixed_cost_min, params.fixed_cost_max));
  }
  instance.capacity.assign(instance.arcs.size(), 0.0);
  apply_uncapacitated_big_m(instance);

  instance.validate();
  return instance;
}

std::vector<SuiteEntry> generate_suite(const std::vector<int>& node_levels, int count_per_level,
                                       std::uint64_t seed) {
  if (count_per_level < 1) throw std::invalid_argument("count per level must be >= 1");
  std::vector<SuiteEntry> suite;
  suite.reserve(node_levels.size() * static_cast<size_t>(count_per_level));
  for (size_t level = 0; level < node_levels.size(); ++level) {
    for (int index = 0; index < count_per_level; ++index) {
      GeneratorParams params;
      params.node_count = node_levels[level];
      params.seed = derive_seed(seed, level, static_cast<std::uint64_t>(index));
      FCNFInstance instance = generate_instance(params);
      solve_min_cost_flow(instance, instance.variable_cost);  // feasibility proof
      suite.push_back({params, std::move(instance)});
    }
  }
  return suite;
}

}  // namespace fcnf
