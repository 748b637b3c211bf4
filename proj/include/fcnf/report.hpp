#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fcnf/dssp.hpp"
#include "fcnf/instance.hpp"
#include "fcnf/search.hpp"

namespace fcnf {

// Percent improvement of a search over the plain slope-scaling baseline:
// 100 * (z_dssp - z_x) / z_dssp. Negative when the search did worse.
// Throws std::invalid_argument when z_dssp <= 0.
double compute_gap(double z_dssp, double z_x);

// Gap earned per evaluation: z_gap / s. Throws std::invalid_argument when
// s < 1 (every run performs at least one evaluation).
double solution_efficiency(double z_gap, long long s);

struct Correlation {
  double coefficient = 0.0;
  double p_value = 1.0;
};

// Pearson r with a two-sided p-value from the t distribution on n - 2
// degrees of freedom. Throws std::invalid_argument on mismatched lengths,
// fewer than 3 points, or a zero-variance series.
Correlation pearson_correlation(const std::vector<double>& x, const std::vector<double>& y);

// The six instance descriptors, in the fixed order used for CSV columns and
// correlation tables.
const std::vector<std::string>& characteristic_names();
std::vector<double> characteristic_values(const NetworkCharacteristics& c);

// One (instance, strategy) run against the shared baseline.
struct RunRecord {
  std::string instance_name;
  Strategy strategy = Strategy::sa_boltzmann;
  double z_dssp = 0.0;
  double z_strategy = 0.0;
  double z_gap = 0.0;
  long long evaluations = 0;  // s
  double efficiency = 0.0;    // r = z_gap / s
  double best_psi = 0.0;
  double seconds = 0.0;  // wall clock; reported only in the metadata block
  NetworkCharacteristics characteristics;
};

struct StrategySummary {
  Strategy strategy = Strategy::sa_boltzmann;
  long long runs = 0;
  double mean_gap = 0.0;
  double std_gap = 0.0;  // population standard deviation
  double min_gap = 0.0;
  double max_gap = 0.0;
  double fraction_positive = 0.0;  // share of runs with z_gap > 0
  // Keyed by characteristic name; a key is absent when the correlation is
  // undefined for this strategy's rows (fewer than 3 runs or zero variance).
  std::map<std::string, Correlation> gap_correlations;
};

struct RunFailure {
  std::string instance_name;
  std::string strategy;
  std::string reason;
};

struct GapReport {
  std::vector<RunRecord> rows;  // manifest order, then strategy order within an instance
  std::vector<StrategySummary> summaries;
  // Correlations over all strategies' rows pooled together.
  std::map<std::string, Correlation> pooled_correlations;
  std::vector<RunFailure> failures;
  double total_seconds = 0.0;  // metadata only
};

struct NamedInstance {
  std::string name;
  FCNFInstance instance;
};

struct ExperimentOptions {
  std::vector<Strategy> strategies = {Strategy::sa_boltzmann, Strategy::sa_vfa,
                                      Strategy::tabu_search, Strategy::pso};
  // config.dssp also budgets the psi = 1 baseline run.
  SearchConfig config;
  int workers = 1;
  // When set, per-run history CSVs, per-instance trajectory CSVs, results.csv,
  // and report.json are written here.
  std::filesystem::path output_dir;
};

// Runs the psi = 1 baseline and then each requested strategy on every
// instance. Instances are dispatched to a worker pool; the report itself is
// assembled in manifest order, so identical inputs and seeds give identical
// rows. Per-instance failures are recorded in the report, never dropped.
GapReport run_experiment(const std::vector<NamedInstance>& suite, const ExperimentOptions& options);

// Rebuilds summaries and pooled correlations from report.rows.
void aggregate_report(GapReport& report);

// Deterministic serializations: doubles are printed with the shortest
// round-trip decimal form, and no wall-clock values appear outside the
// report.json metadata block.
std::string results_csv_text(const GapReport& report);
std::vector<RunRecord> read_results_csv(const std::string& text);
std::string report_json_text(const GapReport& report);

void write_history_csv(const SearchResult& result, const std::filesystem::path& path);
void write_trajectory_csv(const DsspResult& result, const std::filesystem::path& path);

}  // namespace fcnf
