#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fcnf {

// Flows at or below this threshold count as "arc closed"; above it the arc is
// open and its fixed cost is incurred. Far below any generated demand scale.
inline constexpr double kOpenTolerance = 1e-9;

// Absolute tolerance for requirement balance and node conservation.
inline constexpr double kBalanceTolerance = 1e-6;

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct Arc {
  int tail = 0;
  int head = 0;
};

// A single-commodity fixed charge network flow instance on a directed graph.
// Node i carries a requirement R_i (>0 supply, <0 demand, 0 transshipment);
// arc (i,j) carries a variable cost per flow unit, a fixed cost incurred when
// the arc carries any positive flow, and a capacity.
//
// Immutable by convention once validated; safe to share across workers.
struct FCNFInstance {
  int node_count = 0;
  std::vector<Arc> arcs;
  std::vector<double> requirement;
  std::vector<double> variable_cost;
  std::vector<double> fixed_cost;
  std::vector<double> capacity;

  int arc_count() const { return static_cast<int>(arcs.size()); }

  // Sum of positive requirements.
  double total_supply() const;

  // Throws ValidationError on: mismatched array sizes, out-of-range node ids,
  // self-loops, negative or non-finite costs, non-positive capacities, or
  // requirements that do not balance to zero within kBalanceTolerance.
  void validate() const;
};

// Replaces every capacity with the total supply S, the artificial big-M that
// makes an uncapacitated arc expressible as a box constraint.
void apply_uncapacitated_big_m(FCNFInstance& instance);

// Per-arc flow values. Open/closed indicators are derived, not stored:
// an arc is open iff its flow exceeds kOpenTolerance.
struct FlowSolution {
  std::vector<double> flow;

  bool open(int arc) const { return flow[static_cast<size_t>(arc)] > kOpenTolerance; }
  int open_count() const;
};

struct Violation {
  enum class Kind { node_conservation, capacity_exceeded, negative_flow };
  Kind kind;
  int index;         // node id or arc index depending on kind
  double magnitude;  // absolute size of the violation, in flow units

  std::string describe() const;
};

// Objective of the original problem: sum of c_ij * x_ij plus the fixed cost of
// every open arc. Throws std::invalid_argument on dimension mismatch.
double true_objective(const FCNFInstance& instance, const FlowSolution& sol);

// Empty iff flow conservation holds at every node within kBalanceTolerance and
// every arc flow lies in [0, M_ij]. Violations name the node/arc and magnitude.
std::vector<Violation> check_feasibility(const FCNFInstance& instance, const FlowSolution& sol);

class UndefinedCharacteristicError : public std::runtime_error {
 public:
  explicit UndefinedCharacteristicError(const std::string& what) : std::runtime_error(what) {}
};

// The six instance descriptors plus the quantities they derive from.
//   density          d    = m / (2 * C(n,2)), m counting directed arcs
//   supply_fraction  rho_s, demand_fraction rho_d
//   mean_supply      theta = S / n_s
//   cost_ratio       phi   = sum(f) / sum(c)
//   gamma                  = theta / phi
struct NetworkCharacteristics {
  double density = 0.0;
  double supply_fraction = 0.0;
  double demand_fraction = 0.0;
  double mean_supply = 0.0;
  double cost_ratio = 0.0;
  double gamma = 0.0;
  double total_supply = 0.0;
  int supply_node_count = 0;
};

// Throws UndefinedCharacteristicError when there is no supply node or the
// variable costs sum to zero.
NetworkCharacteristics characteristics(const FCNFInstance& instance);

}  // namespace fcnf
