#include "fcnf/instance.hpp"

#include <cmath>
#include <sstream>

namespace fcnf {

double FCNFInstance::total_supply() const {
  double s = 0.0;
  for (double r : requirement) {
    if (r > 0.0) s += r;
  }
  return s;
}

void FCNFInstance::validate() const {
  const size_t m = arcs.size();
  if (node_count <= 0) throw ValidationError("instance has no nodes");
  if (requirement.size() != static_cast<size_t>(node_count))
    throw ValidationError("requirement array size does not match node count");
  if (variable_cost.size() != m || fixed_cost.size() != m || capacity.size() != m)
    throw ValidationError("arc attribute arrays do not match arc count");

  for (size_t e = 0; e < m; ++e) {
    const Arc& a = arcs[e];
    if (a.tail < 0 || a.tail >= node_count || a.head < 0 || a.head >= node_count) {
      std::ostringstream os;
      os << "arc " << e << " references node outside [0, " << node_count << ")";
      throw ValidationError(os.str());
    }
    if (a.tail == a.head) {
      std::ostringstream os;
      os << "arc " << e << " is a self-loop at node " << a.tail;
      throw ValidationError(os.str());
    }
    if (!(variable_cost[e] >= 0.0) || !std::isfinite(variable_cost[e]))
      throw ValidationError("variable cost must be finite and non-negative");
    if (!(fixed_cost[e] >= 0.0) || !std::isfinite(fixed_cost[e]))
      throw ValidationError("fixed cost must be finite and non-negative");
    if (!(capacity[e] > 0.0) || !std::isfinite(capacity[e]))
      throw ValidationError("capacity must be finite and positive");
  }

  double balance = 0.0;
  for (double r : requirement) {
    if (!std::isfinite(r)) throw ValidationError("requirement must be finite");
    balance += r;
  }
  if (std::abs(balance) > kBalanceTolerance) {
    std::ostringstream os;
    os << "requirements do not balance: sum = " << balance;
    throw ValidationError(os.str());
  }
}

void apply_uncapacitated_big_m(FCNFInstance& instance) {
  const double s = instance.total_supply();
  for (double& cap : instance.capacity) cap = s;
}

int FlowSolution::open_count() const {
  int count = 0;
  for (double x : flow) {
    if (x > kOpenTolerance) ++count;
  }
  return count;
}

std::string Violation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::node_conservation:
      os << "conservation violated at node " << index << " by " << magnitude;
      break;
    case Kind::capacity_exceeded:
      os << "capacity exceeded on arc " << index << " by " << magnitude;
      break;
    case Kind::negative_flow:
      os << "negative flow on arc " << index << " of magnitude " << magnitude;
      break;
  }
  return os.str();
}

double true_objective(const FCNFInstance& instance, const FlowSolution& sol) {
  if (sol.flow.size() != instance.arcs.size())
    throw std::invalid_argument("solution arc count does not match instance");
  double total = 0.0;
  for (size_t e = 0; e < sol.flow.size(); ++e) {
    total += instance.variable_cost[e] * sol.flow[e];
    if (sol.flow[e] > kOpenTolerance) total += instance.fixed_cost[e];
  }
  return total;
}

std::vector<Violation> check_feasibility(const FCNFInstance& instance, const FlowSolution& sol) {
  if (sol.flow.size() != instance.arcs.size())
    throw std::invalid_argument("solution arc count does not match instance");
  std::vector<Violation> violations;

  std::vector<double> net(static_cast<size_t>(instance.node_count), 0.0);
  for (size_t e = 0; e < sol.flow.size(); ++e) {
    const double x = sol.flow[e];
    if (x < 0.0) {
      violations.push_back({Violation::Kind::negative_flow, static_cast<int>(e), -x});
    }
    if (x > instance.capacity[e]) {
      violations.push_back(
          {Violation::Kind::capacity_exceeded, static_cast<int>(e), x - instance.capacity[e]});
    }
    net[static_cast<size_t>(instance.arcs[e].tail)] += x;
    net[static_cast<size_t>(instance.arcs[e].head)] -= x;
  }
  for (int i = 0; i < instance.node_count; ++i) {
    const double gap = std::abs(net[static_cast<size_t>(i)] - instance.requirement[static_cast<size_t>(i)]);
    if (gap > kBalanceTolerance) {
      violations.push_back({Violation::Kind::node_conservation, i, gap});
    }
  }
  return violations;
}

NetworkCharacteristics characteristics(const FCNFInstance& instance) {
  const int n = instance.node_count;
  if (n < 2) throw UndefinedCharacteristicError("density undefined for fewer than 2 nodes");

  int supply_nodes = 0;
  int demand_nodes = 0;
  double total_supply = 0.0;
  for (double r : instance.requirement) {
    if (r > 0.0) {
      ++supply_nodes;
      total_supply += r;
    } else if (r < 0.0) {
      ++demand_nodes;
    }
  }
  if (supply_nodes == 0) throw UndefinedCharacteristicError("instance has no supply node");

  double sum_fixed = 0.0;
  double sum_variable = 0.0;
  for (size_t e = 0; e < instance.arcs.size(); ++e) {
    sum_fixed += instance.fixed_cost[e];
    sum_variable += instance.variable_cost[e];
  }
  if (sum_variable == 0.0)
    throw UndefinedCharacteristicError("variable costs sum to zero; cost ratio undefined");

  NetworkCharacteristics c;
  const double undirected_pairs = static_cast<double>(n) * (n - 1) / 2.0;
  c.density = static_cast<double>(instance.arc_count()) / (2.0 * undirected_pairs);
  c.supply_fraction = static_cast<double>(supply_nodes) / n;
  c.demand_fraction = static_cast<double>(demand_nodes) / n;
  c.total_supply = total_supply;
  c.supply_node_count = supply_nodes;
  c.mean_supply = total_supply / supply_nodes;
  c.cost_ratio = sum_fixed / sum_variable;
  c.gamma = c.mean_supply / c.cost_ratio;
  return c;
}

}  // namespace fcnf
