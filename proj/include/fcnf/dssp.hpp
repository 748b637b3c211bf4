#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <vector>

#include "fcnf/instance.hpp"
#include "fcnf/min_cost_flow.hpp"

namespace fcnf {

// Search domain for the slope-scaling parameter. Zero is excluded so fixed
// costs always stay in play; values above 2 never helped in practice.
inline constexpr double kPsiMin = 0.01;
inline constexpr double kPsiMax = 2.0;

inline double clamp_psi(double psi) { return std::clamp(psi, kPsiMin, kPsiMax); }

struct DsspLimits {
  // Caps the re-linearization loop so a non-fixed-point oscillation cannot
  // spin forever; the incumbent rule makes truncation safe.
  int max_iterations = 200;
  double time_budget_seconds = std::numeric_limits<double>::infinity();
  // Elementwise tolerance for the pseudo-flow fixed-point test. Integral
  // flows compare exactly; the tolerance keeps the contract valid for a
  // future real-valued subproblem solver.
  double fixed_point_tolerance = 1e-9;
};

struct TrajectoryPoint {
  double objective = 0.0;  // true objective of this iterate
  int arcs_open = 0;
};

struct DsspResult {
  double best_objective = std::numeric_limits<double>::infinity();
  FlowSolution best_flow;
  int iterations = 0;      // linear subproblems solved
  bool converged = false;  // stopped at a pseudo-flow fixed point, not a budget
  std::vector<TrajectoryPoint> trajectory;
};

// x~0_ij = min(M_ij, S): the optimistic largest-plausible-flow start, making
// the first scaled cost c + psi*f/S. Throws ValidationError when S <= 0.
std::vector<double> initialize_pseudo_flow(const FCNFInstance& instance);

// x~k_ij = x^k_ij where the new flow is positive, otherwise the previous
// pseudo-flow; stays strictly positive.
std::vector<double> update_pseudo_flow(const std::vector<double>& previous,
                                       const FlowSolution& current);

// c~_ij = c_ij + psi * f_ij / x~_ij. Throws std::invalid_argument on psi <= 0
// or a non-positive pseudo-flow entry.
LinearArcCosts scaled_costs(const FCNFInstance& instance, const std::vector<double>& pseudo_flow,
                            double psi);

// The slope-scaling loop: scaled_costs -> solve_min_cost_flow -> record true
// objective -> update_pseudo_flow, until the pseudo-flow reaches a fixed point
// or the budget runs out. Returns the minimum true objective seen, which is
// not necessarily the final iterate's.
DsspResult run_dssp(const FCNFInstance& instance, double psi, const DsspLimits& limits = {});

// Memoizing wrapper around run_dssp for a single instance: psi is clamped to
// [kPsiMin, kPsiMax] and rounded to a 1e-6 grid, and each grid cell is solved
// at most once. Safe to share across concurrent callers (coarse lock; cached
// results are stable references).
class PsiEvaluator {
 public:
  explicit PsiEvaluator(const FCNFInstance& instance, DsspLimits limits = {})
      : instance_(instance), limits_(limits) {}

  PsiEvaluator(const PsiEvaluator&) = delete;
  PsiEvaluator& operator=(const PsiEvaluator&) = delete;

  static long long memo_key(double psi) { return std::llround(clamp_psi(psi) * 1e6); }

  // Best DSSP objective for this psi (cached).
  double evaluate(double psi) { return result(psi).best_objective; }

  // Full cached result; computed on first use.
  const DsspResult& result(double psi);

  // Distinct grid cells actually solved so far.
  long long unique_evaluations() const;

  const FCNFInstance& instance() const { return instance_; }
  const DsspLimits& limits() const { return limits_; }

 private:
  const FCNFInstance& instance_;
  DsspLimits limits_;
  mutable std::mutex mutex_;
  std::map<long long, DsspResult> cache_;
};

}  // namespace fcnf
