#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fcnf/dssp.hpp"

namespace fcnf {

enum class Strategy { dssp, sa_boltzmann, sa_vfa, tabu_search, pso };
enum class SaVariant { boltzmann, vfa };
enum class TerminationReason { budget_iterations, budget_time, early_stop };

std::string strategy_name(Strategy s);                    // dssp, sab, savf, ts, pso
std::optional<Strategy> strategy_from_name(const std::string& name);
std::string termination_reason_name(TerminationReason r);

struct SaSettings {
  double initial_temperature = 0.25;  // T_0
  int dwell = 3;                      // candidates examined per temperature
};

struct TsSettings {
  double min_distance = 0.01;  // h_0: below this, two psi values are not distinct
  double max_distance = 0.2;   // h_k: furthest neighbor distance
  int band_count = 5;          // k concentric bands
  int tabu_capacity = 5;       // n: oldest entry evicted beyond this
  int retry_cap = 20;          // resamples per band before skipping it
};

struct PsoSettings {
  int particles = 10;
  double max_velocity = 1.0;
  double inertia_min = 0.4;   // w_min
  double inertia_max = 0.9;   // w_max
  double cognitive_coeff = 2.0;  // c_1, pull toward the particle's own best
  double social_coeff = 2.0;     // c_2, pull toward the swarm best
};

struct SearchConfig {
  int max_iterations = 200;             // i_max, outer iterations
  double time_budget_seconds = 60.0;    // t_max
  int early_stop_window = 10;           // outer iterations without improvement
  double psi_min = kPsiMin;
  double psi_max = kPsiMax;
  double initial_psi = 1.0;             // SA/TS anchor: the plain-DSSP point
  std::uint64_t rng_seed = 1;
  SaSettings sa;
  TsSettings ts;
  PsoSettings pso;
  DsspLimits dssp;                      // inner-loop budget per evaluation

  // Throws std::invalid_argument on any out-of-range field.
  void validate() const;
};

struct HistoryEntry {
  double psi = 0.0;
  double objective = 0.0;
  double elapsed_seconds = 0.0;
  std::string event;  // initial | accept | reject | candidate | move | particle
};

struct SearchResult {
  Strategy strategy = Strategy::dssp;
  double best_psi = 0.0;
  double best_objective = 0.0;
  FlowSolution best_flow;
  long long evaluations = 0;         // s: DSSP(psi) calls, equals history size
  long long unique_evaluations = 0;  // distinct memo cells actually solved
  int iterations = 0;                // outer iterations completed
  double wall_seconds = 0.0;
  TerminationReason reason = TerminationReason::budget_iterations;
  std::vector<HistoryEntry> history;
  std::vector<std::string> warnings;
};

// --- annealing kernels ---

// exp((1 - z_c/z_i) / T), capped at 1: the acceptance probability depends on
// the percent change, not the objective magnitudes. Throws on z_i <= 0 or
// T <= 0.
double sa_accept_probability(double z_candidate, double z_incumbent, double temperature);

// T_0 / ln(1 + i), i >= 1.
double boltzmann_temperature(double t0, int i);

// T_0 * exp(-i / e), with e Euler's number.
double vfa_temperature(double t0, int i);

// Deterministic neighbor kernels, exposed so the random draw can be pinned:
//   boltzmann: psi + v/2 * sqrt(T) when sqrt(T) < 2/3, else psi + v/3
//   vfa:       psi +/- T*((1 + 1/T)^|2u-1| - 1), + when u < 0.5
double boltzmann_step(double psi, double temperature, double normal_draw);
double vfa_step(double psi, double temperature, double uniform_draw);

double boltzmann_neighbor(double psi, double temperature, std::mt19937_64& rng, double psi_min,
                          double psi_max);
double vfa_neighbor(double psi, double temperature, std::mt19937_64& rng, double psi_min,
                    double psi_max);

// --- tabu kernels ---

// Band boundaries [h_0, h_1, ..., h_k] with h_j = h_k / 2^(k-j) for the
// interior points; band j is the distance interval [h_{j-1}, h_j]. Throws
// when the sequence is not strictly increasing.
std::vector<double> tabu_bands(double h0, double hk, int k);

// Samples a candidate at distance [inner, outer] from psi on a uniformly
// random side, reflecting at the psi bounds, and rejecting anything within
// min_distance of a tabu entry. Empty when retry_cap samples all conflict.
std::optional<double> sample_band_candidate(std::mt19937_64& rng, double psi, double inner,
                                            double outer, double psi_min, double psi_max,
                                            const std::deque<double>& tabu, double min_distance,
                                            int retry_cap);

// --- swarm kernels ---

// w_max - (i / i_max) * (w_max - w_min). Throws when i is outside [0, i_max].
double pso_inertia(double w_max, double w_min, int i, int i_max);

// w*v + c1*r1*(pbest - psi) + c2*r2*(gbest - psi), clamped to [-v_max, v_max].
double pso_velocity(double velocity, double psi, double pbest_psi, double gbest_psi,
                    double inertia, double c1, double c2, double r1, double r2, double v_max);

// --- drivers ---

SearchResult run_simulated_annealing(PsiEvaluator& evaluator, const SearchConfig& config,
                                     SaVariant variant);
SearchResult run_tabu_search(PsiEvaluator& evaluator, const SearchConfig& config);
SearchResult run_pso(PsiEvaluator& evaluator, const SearchConfig& config);

// Dispatch by strategy. Strategy::dssp is the baseline, not a search; asking
// for it here is an error (run it via run_dssp).
SearchResult run_search(PsiEvaluator& evaluator, Strategy strategy, const SearchConfig& config);

// JSON config file mirroring SearchConfig; absent keys keep defaults, unknown
// keys are rejected.
SearchConfig load_search_config(const std::string& path);
SearchConfig search_config_from_json_text(const std::string& text);
std::string search_config_to_json_text(const SearchConfig& config);

}  // namespace fcnf
