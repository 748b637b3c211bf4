#include "fcnf/dssp.hpp"

#include <chrono>
#include <utility>

namespace fcnf {

std::vector<double> initialize_pseudo_flow(const FCNFInstance& instance) {
  const double supply = instance.total_supply();
  if (supply <= 0.0) throw ValidationError("total supply must be positive to start slope scaling");
  std::vector<double> pseudo(instance.capacity.size());
  for (size_t e = 0; e < pseudo.size(); ++e) pseudo[e] = std::min(instance.capacity[e], supply);
  return pseudo;
}

std::vector<double> update_pseudo_flow(const std::vector<double>& previous,
                                       const FlowSolution& current) {
  if (previous.size() != current.flow.size())
    throw std::invalid_argument("pseudo-flow and flow arity mismatch");
  std::vector<double> next(previous.size());
  for (size_t e = 0; e < previous.size(); ++e)
    next[e] = current.flow[e] > kOpenTolerance ? current.flow[e] : previous[e];
  return next;
}

LinearArcCosts scaled_costs(const FCNFInstance& instance, const std::vector<double>& pseudo_flow,
                            double psi) {
  if (psi <= 0.0) throw std::invalid_argument("psi must be positive");
  if (static_cast<int>(pseudo_flow.size()) != instance.arc_count())
    throw std::invalid_argument("pseudo-flow arity does not match arc count");
  LinearArcCosts costs(pseudo_flow.size());
  for (size_t e = 0; e < pseudo_flow.size(); ++e) {
    if (pseudo_flow[e] <= 0.0)
      throw std::invalid_argument("pseudo-flow entries must stay strictly positive");
    costs[e] = instance.variable_cost[e] + psi * instance.fixed_cost[e] / pseudo_flow[e];
  }
  return costs;
}

DsspResult run_dssp(const FCNFInstance& instance, double psi, const DsspLimits& limits) {
  if (psi <= 0.0) throw std::invalid_argument("psi must be positive");
  if (limits.max_iterations < 1) throw std::invalid_argument("iteration budget must be >= 1");

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  std::vector<double> pseudo = initialize_pseudo_flow(instance);
  DsspResult result;
  for (int k = 1; k <= limits.max_iterations; ++k) {
    if (k > 1 && elapsed() >= limits.time_budget_seconds) break;

    const LinearArcCosts costs = scaled_costs(instance, pseudo, psi);
    const McfResult mcf = solve_min_cost_flow(instance, costs);
    const double objective = true_objective(instance, mcf.solution);
    result.trajectory.push_back({objective, mcf.solution.open_count()});
    result.iterations = k;
    if (objective < result.best_objective) {
      result.best_objective = objective;
      result.best_flow = mcf.solution;
    }

    std::vector<double> next = update_pseudo_flow(pseudo, mcf.solution);
    // The fixed-point test only compares two post-solve pseudo-flows; the
    // artificial starting vector never participates, so the loop always
    // prices at least two subproblems before declaring convergence.
    if (k >= 2) {
      bool fixed_point = true;
      for (size_t e = 0; e < next.size(); ++e) {
        if (std::abs(next[e] - pseudo[e]) > limits.fixed_point_tolerance) {
          fixed_point = false;
          break;
        }
      }
      if (fixed_point) {
        result.converged = true;
        break;
      }
    }
    pseudo = std::move(next);
  }
  return result;
}

const DsspResult& PsiEvaluator::result(double psi) {
  const long long key = memo_key(psi);
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    DsspResult computed = run_dssp(instance_, static_cast<double>(key) / 1e6, limits_);
    it = cache_.emplace(key, std::move(computed)).first;
  }
  return it->second;
}

long long PsiEvaluator::unique_evaluations() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return static_cast<long long>(cache_.size());
}

}  // namespace fcnf
