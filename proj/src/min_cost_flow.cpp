#include "fcnf/min_cost_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <utility>

namespace fcnf {
namespace {

constexpr double kResidualTolerance = 1e-9;
constexpr double kDeficitTolerance = 1e-6;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_costs(const FCNFInstance& instance, const LinearArcCosts& costs) {
  if (static_cast<int>(costs.size()) != instance.arc_count())
    throw std::invalid_argument("cost vector arity does not match arc count");
  for (double c : costs) {
    if (!std::isfinite(c) || c < 0.0)
      throw std::invalid_argument("arc costs must be finite and non-negative");
  }
}

// Expanded network: the instance's arcs first (original indices preserved),
// then one arc per supply node from the super source s and one per demand
// node into the super sink t.
struct Expanded {
  int total_nodes = 0;
  int source = 0;
  int sink = 0;
  std::vector<int> tail, head;
  std::vector<double> cap, cost;
  // Residual arc ids per node: forward residual of arc a is 2a, backward is
  // 2a+1. Lists are ascending in arc id, which fixes the tie-break order.
  std::vector<std::vector<int>> adjacency;
};

Expanded build_expanded(const FCNFInstance& instance, const LinearArcCosts& costs,
                        const std::vector<char>* open) {
  Expanded net;
  const int n = instance.node_count;
  net.total_nodes = n + 2;
  net.source = n;
  net.sink = n + 1;

  const int m = instance.arc_count();
  for (int a = 0; a < m; ++a) {
    net.tail.push_back(instance.arcs[static_cast<size_t>(a)].tail);
    net.head.push_back(instance.arcs[static_cast<size_t>(a)].head);
    const bool usable = open == nullptr || (*open)[static_cast<size_t>(a)];
    net.cap.push_back(usable ? instance.capacity[static_cast<size_t>(a)] : 0.0);
    net.cost.push_back(costs[static_cast<size_t>(a)]);
  }
  for (int i = 0; i < n; ++i) {
    const double r = instance.requirement[static_cast<size_t>(i)];
    if (r > 0.0) {
      net.tail.push_back(net.source);
      net.head.push_back(i);
      net.cap.push_back(r);
      net.cost.push_back(0.0);
    } else if (r < 0.0) {
      net.tail.push_back(i);
      net.head.push_back(net.sink);
      net.cap.push_back(-r);
      net.cost.push_back(0.0);
    }
  }

  net.adjacency.assign(static_cast<size_t>(net.total_nodes), {});
  for (int a = 0; a < static_cast<int>(net.tail.size()); ++a) {
    net.adjacency[static_cast<size_t>(net.tail[static_cast<size_t>(a)])].push_back(2 * a);
    net.adjacency[static_cast<size_t>(net.head[static_cast<size_t>(a)])].push_back(2 * a + 1);
  }
  return net;
}

McfResult solve_expanded(const FCNFInstance& instance, const LinearArcCosts& costs,
                         const std::vector<char>* open) {
  const Expanded net = build_expanded(instance, costs, open);
  const int nodes = net.total_nodes;
  const int arcs = static_cast<int>(net.tail.size());

  std::vector<double> flow(static_cast<size_t>(arcs), 0.0);
  std::vector<double> pi(static_cast<size_t>(nodes), 0.0);
  std::vector<double> dist(static_cast<size_t>(nodes), kInf);
  std::vector<int> parent(static_cast<size_t>(nodes), -1);

  auto residual = [&](int rid) {
    const int a = rid >> 1;
    return (rid & 1) == 0 ? net.cap[static_cast<size_t>(a)] - flow[static_cast<size_t>(a)]
                          : flow[static_cast<size_t>(a)];
  };
  auto residual_head = [&](int rid) {
    const int a = rid >> 1;
    return (rid & 1) == 0 ? net.head[static_cast<size_t>(a)] : net.tail[static_cast<size_t>(a)];
  };
  auto residual_tail = [&](int rid) {
    const int a = rid >> 1;
    return (rid & 1) == 0 ? net.tail[static_cast<size_t>(a)] : net.head[static_cast<size_t>(a)];
  };

  const double total_supply = instance.total_supply();
  double shipped = 0.0;
  int augmentations = 0;

  while (true) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), -1);
    dist[static_cast<size_t>(net.source)] = 0.0;

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
    queue.push({0.0, net.source});
    while (!queue.empty()) {
      const auto [du, u] = queue.top();
      queue.pop();
      if (du > dist[static_cast<size_t>(u)]) continue;
      for (int rid : net.adjacency[static_cast<size_t>(u)]) {
        if (residual(rid) <= kResidualTolerance) continue;
        const int a = rid >> 1;
        const int v = residual_head(rid);
        const double raw = (rid & 1) == 0 ? net.cost[static_cast<size_t>(a)]
                                          : -net.cost[static_cast<size_t>(a)];
        // Reduced costs are non-negative by invariant; clamp guards rounding.
        const double rc = std::max(0.0, raw + pi[static_cast<size_t>(u)] - pi[static_cast<size_t>(v)]);
        const double nd = du + rc;
        if (nd < dist[static_cast<size_t>(v)]) {
          dist[static_cast<size_t>(v)] = nd;
          parent[static_cast<size_t>(v)] = rid;
          queue.push({nd, v});
        }
      }
    }

    if (dist[static_cast<size_t>(net.sink)] == kInf) break;
    for (int v = 0; v < nodes; ++v) {
      if (dist[static_cast<size_t>(v)] < kInf) pi[static_cast<size_t>(v)] += dist[static_cast<size_t>(v)];
    }

    double bottleneck = kInf;
    for (int v = net.sink; v != net.source; v = residual_tail(parent[static_cast<size_t>(v)]))
      bottleneck = std::min(bottleneck, residual(parent[static_cast<size_t>(v)]));
    for (int v = net.sink; v != net.source; v = residual_tail(parent[static_cast<size_t>(v)])) {
      const int rid = parent[static_cast<size_t>(v)];
      const int a = rid >> 1;
      if ((rid & 1) == 0)
        flow[static_cast<size_t>(a)] += bottleneck;
      else
        flow[static_cast<size_t>(a)] -= bottleneck;
      flow[static_cast<size_t>(a)] =
          std::clamp(flow[static_cast<size_t>(a)], 0.0, net.cap[static_cast<size_t>(a)]);
    }
    shipped += bottleneck;
    ++augmentations;
  }

  if (shipped < total_supply - kDeficitTolerance) {
    std::vector<int> deficits;
    for (int a = instance.arc_count(); a < arcs; ++a) {
      if (net.head[static_cast<size_t>(a)] != net.sink) continue;
      if (flow[static_cast<size_t>(a)] < net.cap[static_cast<size_t>(a)] - kDeficitTolerance)
        deficits.push_back(net.tail[static_cast<size_t>(a)]);
    }
    std::ostringstream os;
    os << "network is infeasible: " << total_supply - shipped << " units of demand unmet across "
       << deficits.size() << " node(s)";
    throw InfeasibleNetworkError(os.str(), std::move(deficits));
  }

  McfResult result;
  result.solution.flow.assign(flow.begin(), flow.begin() + instance.arc_count());
  result.objective = 0.0;
  for (int a = 0; a < instance.arc_count(); ++a)
    result.objective += costs[static_cast<size_t>(a)] * result.solution.flow[static_cast<size_t>(a)];
  result.augmentations = augmentations;
  result.potentials.assign(pi.begin(), pi.begin() + instance.node_count);
  return result;
}

}  // namespace

McfResult solve_min_cost_flow(const FCNFInstance& instance, const LinearArcCosts& costs) {
  check_costs(instance, costs);
  return solve_expanded(instance, costs, nullptr);
}

McfResult solve_min_cost_flow_restricted(const FCNFInstance& instance, const LinearArcCosts& costs,
                                         const std::vector<char>& open) {
  check_costs(instance, costs);
  if (static_cast<int>(open.size()) != instance.arc_count())
    throw std::invalid_argument("open-arc mask arity does not match arc count");
  return solve_expanded(instance, costs, &open);
}

McfResult warm_start_solve(const FCNFInstance& instance, const LinearArcCosts& costs,
                           const FlowSolution& previous, int max_cycles) {
  check_costs(instance, costs);
  const int n = instance.node_count;
  const int m = instance.arc_count();

  if (static_cast<int>(previous.flow.size()) != m || !check_feasibility(instance, previous).empty()) {
    McfResult cold = solve_expanded(instance, costs, nullptr);
    cold.used_fallback = true;
    return cold;
  }

  std::vector<double> flow = previous.flow;
  auto residual = [&](int rid) {
    const int a = rid >> 1;
    return (rid & 1) == 0 ? instance.capacity[static_cast<size_t>(a)] - flow[static_cast<size_t>(a)]
                          : flow[static_cast<size_t>(a)];
  };
  auto residual_cost = [&](int rid) {
    const int a = rid >> 1;
    return (rid & 1) == 0 ? costs[static_cast<size_t>(a)] : -costs[static_cast<size_t>(a)];
  };
  auto residual_tail = [&](int rid) {
    const int a = rid >> 1;
    return (rid & 1) == 0 ? instance.arcs[static_cast<size_t>(a)].tail
                          : instance.arcs[static_cast<size_t>(a)].head;
  };
  auto residual_head = [&](int rid) {
    const int a = rid >> 1;
    return (rid & 1) == 0 ? instance.arcs[static_cast<size_t>(a)].head
                          : instance.arcs[static_cast<size_t>(a)].tail;
  };

  // Klein's algorithm: cancel negative residual cycles until none remain.
  // Node balances are already met, so only the original arcs participate.
  int cycles = 0;
  std::vector<double> dist(static_cast<size_t>(n));
  std::vector<int> parent(static_cast<size_t>(n));
  while (true) {
    std::fill(dist.begin(), dist.end(), 0.0);
    std::fill(parent.begin(), parent.end(), -1);
    int last_updated = -1;
    for (int round = 0; round <= n; ++round) {
      last_updated = -1;
      for (int a = 0; a < m; ++a) {
        for (int rid : {2 * a, 2 * a + 1}) {
          if (residual(rid) <= kResidualTolerance) continue;
          const int u = residual_tail(rid);
          const int v = residual_head(rid);
          const double nd = dist[static_cast<size_t>(u)] + residual_cost(rid);
          if (nd < dist[static_cast<size_t>(v)] - 1e-9) {
            dist[static_cast<size_t>(v)] = nd;
            parent[static_cast<size_t>(v)] = rid;
            last_updated = v;
          }
        }
      }
      if (last_updated == -1) break;
    }
    if (last_updated == -1) break;

    if (cycles >= max_cycles) {
      McfResult cold = solve_expanded(instance, costs, nullptr);
      cold.used_fallback = true;
      cold.cycles_canceled = cycles;
      return cold;
    }

    // Walk n parent steps to land on the cycle, then collect it.
    int x = last_updated;
    for (int step = 0; step < n; ++step) x = residual_tail(parent[static_cast<size_t>(x)]);
    std::vector<int> cycle;
    int v = x;
    do {
      const int rid = parent[static_cast<size_t>(v)];
      cycle.push_back(rid);
      v = residual_tail(rid);
    } while (v != x);

    double bottleneck = kInf;
    for (int rid : cycle) bottleneck = std::min(bottleneck, residual(rid));
    for (int rid : cycle) {
      const int a = rid >> 1;
      if ((rid & 1) == 0)
        flow[static_cast<size_t>(a)] += bottleneck;
      else
        flow[static_cast<size_t>(a)] -= bottleneck;
      flow[static_cast<size_t>(a)] = std::clamp(flow[static_cast<size_t>(a)], 0.0,
                                                instance.capacity[static_cast<size_t>(a)]);
    }
    ++cycles;
  }

  McfResult result;
  result.solution.flow = std::move(flow);
  result.objective = 0.0;
  for (int a = 0; a < m; ++a)
    result.objective += costs[static_cast<size_t>(a)] * result.solution.flow[static_cast<size_t>(a)];
  result.cycles_canceled = cycles;
  return result;
}

OptimalityCheck verify_optimality(const FCNFInstance& instance, const LinearArcCosts& costs,
                                  const FlowSolution& solution, double tolerance) {
  check_costs(instance, costs);
  if (static_cast<int>(solution.flow.size()) != instance.arc_count())
    throw std::invalid_argument("flow arity does not match arc count");

  const int n = instance.node_count;
  const int m = instance.arc_count();
  // Bellman-Ford from a virtual source (all distances zero): if the distances
  // settle, they are potentials certifying no negative residual cycle.
  std::vector<double> dist(static_cast<size_t>(n), 0.0);
  for (int round = 0; round <= n; ++round) {
    bool improved = false;
    for (int a = 0; a < m; ++a) {
      const int u = instance.arcs[static_cast<size_t>(a)].tail;
      const int v = instance.arcs[static_cast<size_t>(a)].head;
      const double x = solution.flow[static_cast<size_t>(a)];
      const double c = costs[static_cast<size_t>(a)];
      if (instance.capacity[static_cast<size_t>(a)] - x > kResidualTolerance) {
        const double nd = dist[static_cast<size_t>(u)] + c;
        if (nd < dist[static_cast<size_t>(v)]) {
          dist[static_cast<size_t>(v)] = nd;
          improved = true;
        }
      }
      if (x > kResidualTolerance) {
        const double nd = dist[static_cast<size_t>(v)] - c;
        if (nd < dist[static_cast<size_t>(u)]) {
          dist[static_cast<size_t>(u)] = nd;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }

  OptimalityCheck check;
  check.worst_reduced_cost = 0.0;
  for (int a = 0; a < m; ++a) {
    const int u = instance.arcs[static_cast<size_t>(a)].tail;
    const int v = instance.arcs[static_cast<size_t>(a)].head;
    const double x = solution.flow[static_cast<size_t>(a)];
    const double c = costs[static_cast<size_t>(a)];
    if (instance.capacity[static_cast<size_t>(a)] - x > kResidualTolerance)
      check.worst_reduced_cost =
          std::min(check.worst_reduced_cost, c + dist[static_cast<size_t>(u)] - dist[static_cast<size_t>(v)]);
    if (x > kResidualTolerance)
      check.worst_reduced_cost =
          std::min(check.worst_reduced_cost, -c + dist[static_cast<size_t>(v)] - dist[static_cast<size_t>(u)]);
  }
  check.optimal = check.worst_reduced_cost >= -tolerance;
  return check;
}

}  // namespace fcnf
