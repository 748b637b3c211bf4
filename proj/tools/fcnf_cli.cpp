#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fcnf/dssp.hpp"
#include "fcnf/exact.hpp"
#include "fcnf/generator.hpp"
#include "fcnf/io.hpp"
#include "fcnf/report.hpp"
#include "fcnf/search.hpp"

namespace {

int env_worker_count() {
  const char* raw = std::getenv("FCNF_WORKERS");
  if (raw == nullptr || *raw == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || v < 1) {
    std::cerr << "ignoring FCNF_WORKERS='" << raw << "': expected a positive integer\n";
    return 1;
  }
  return static_cast<int>(v);
}

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> tmax;
  std::optional<int> imax;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "search configuration JSON file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "RNG seed");
  cmd->add_option("--tmax", flags.tmax, "time budget in seconds per run");
  cmd->add_option("--imax", flags.imax, "iteration budget per run");
}

fcnf::SearchConfig build_config(const CommonFlags& flags) {
  fcnf::SearchConfig config;
  if (!flags.config_path.empty()) config = fcnf::load_search_config(flags.config_path);
  if (flags.seed) config.rng_seed = *flags.seed;
  if (flags.tmax) config.time_budget_seconds = *flags.tmax;
  if (flags.imax) config.max_iterations = *flags.imax;
  config.validate();
  return config;
}

nlohmann::json characteristics_json(const fcnf::NetworkCharacteristics& c) {
  nlohmann::json j;
  const std::vector<std::string>& names = fcnf::characteristic_names();
  const std::vector<double> values = fcnf::characteristic_values(c);
  for (size_t i = 0; i < names.size(); ++i) j[names[i]] = values[i];
  return j;
}

void print_summary(const fcnf::GapReport& report) {
  std::cout << "rows: " << report.rows.size() << "\n";
  for (const fcnf::StrategySummary& sum : report.summaries) {
    std::cout << fcnf::strategy_name(sum.strategy) << ": runs=" << sum.runs
              << " mean_gap=" << sum.mean_gap << " max_gap=" << sum.max_gap
              << " positive=" << sum.fraction_positive << "\n";
  }
  const auto density = report.pooled_correlations.find("density");
  if (density != report.pooled_correlations.end()) {
    std::cout << "pooled corr(z_gap, density): r=" << density->second.coefficient
              << " p=" << density->second.p_value << "\n";
  }
  for (const fcnf::RunFailure& f : report.failures) {
    std::cerr << "failure: " << f.instance_name << " [" << f.strategy << "]: " << f.reason << "\n";
  }
}

int run_generate(const std::vector<int>& levels, int count, std::uint64_t seed,
                 const std::filesystem::path& out_dir) {
  const std::vector<fcnf::SuiteEntry> suite = fcnf::generate_suite(levels, count, seed);
  std::filesystem::create_directories(out_dir);

  nlohmann::json manifest;
  manifest["version"] = 1;
  manifest["seed"] = seed;
  manifest["node_levels"] = levels;
  manifest["count_per_level"] = count;
  manifest["instances"] = nlohmann::json::array();

  size_t entry_index = 0;
  for (size_t level = 0; level < levels.size(); ++level) {
    for (int i = 0; i < count; ++i, ++entry_index) {
      const fcnf::SuiteEntry& entry = suite[entry_index];
      std::ostringstream name;
      name << "n" << levels[level] << "_" << std::setw(3) << std::setfill('0') << i;
      const std::string file = name.str() + ".json";
      fcnf::save_instance(entry.instance, (out_dir / file).string());
      manifest["instances"].push_back({{"name", name.str()},
                                       {"file", file},
                                       {"node_count", entry.params.node_count},
                                       {"seed", entry.params.seed},
                                       {"characteristics",
                                        characteristics_json(fcnf::characteristics(entry.instance))}});
    }
  }

  std::ofstream out(out_dir / "suite.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (out_dir / "suite.json").string());
  out << manifest.dump(2) << "\n";
  std::cout << "wrote " << suite.size() << " instances and suite.json to " << out_dir.string()
            << "\n";
  return 0;
}

int run_solve(const std::string& instance_path, const std::string& strategy_text, double psi,
              const CommonFlags& flags, const std::filesystem::path& out_dir) {
  const fcnf::FCNFInstance instance = fcnf::load_instance(instance_path);
  const fcnf::SearchConfig config = build_config(flags);
  const std::string stem = std::filesystem::path(instance_path).stem().string();

  const auto strategy = fcnf::strategy_from_name(strategy_text);
  if (!strategy) throw std::runtime_error("unknown strategy '" + strategy_text + "'");

  if (*strategy == fcnf::Strategy::dssp) {
    fcnf::DsspLimits limits = config.dssp;
    if (flags.imax) limits.max_iterations = *flags.imax;
    if (flags.tmax) limits.time_budget_seconds = *flags.tmax;

    const auto started = std::chrono::steady_clock::now();
    const fcnf::DsspResult result = fcnf::run_dssp(instance, psi, limits);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    std::cout << "strategy: dssp\n";
    std::cout << "z: " << result.best_objective << "\n";
    std::cout << "psi: " << psi << "\n";
    std::cout << "s: " << result.iterations << "\n";
    std::cout << "t: " << seconds << "\n";
    std::cout << "converged: " << (result.converged ? "yes" : "no") << "\n";
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      fcnf::write_trajectory_csv(result, out_dir / (stem + "_dssp_trajectory.csv"));
    }
    return 0;
  }

  fcnf::PsiEvaluator evaluator(instance, config.dssp);
  const fcnf::SearchResult result = fcnf::run_search(evaluator, *strategy, config);

  std::cout << "strategy: " << fcnf::strategy_name(*strategy) << "\n";
  std::cout << "z: " << result.best_objective << "\n";
  std::cout << "psi: " << result.best_psi << "\n";
  std::cout << "s: " << result.evaluations << "\n";
  std::cout << "t: " << result.wall_seconds << "\n";
  std::cout << "reason: " << fcnf::termination_reason_name(result.reason) << "\n";
  for (const std::string& warning : result.warnings) std::cerr << "warning: " << warning << "\n";
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    fcnf::write_history_csv(result,
                            out_dir / (stem + "_" + fcnf::strategy_name(*strategy) + "_history.csv"));
  }
  return 0;
}

int run_exact(const std::string& instance_path, int max_arcs, long long max_subsets) {
  const fcnf::FCNFInstance instance = fcnf::load_instance(instance_path);
  fcnf::ExactLimits limits;
  limits.max_arcs = max_arcs;
  limits.max_subsets = max_subsets;
  const fcnf::ExactResult result = fcnf::solve_exact(instance, limits);

  std::cout << "z: " << result.objective << "\n";
  std::cout << "open_arcs:";
  for (const int a : result.open_arcs) std::cout << " " << a;
  std::cout << "\n";
  std::cout << "proven_optimal: " << (result.proven_optimal ? "yes" : "no") << "\n";
  std::cout << "subsets_examined: " << result.subsets_examined << "\n";
  return 0;
}

std::vector<fcnf::NamedInstance> load_suite(const std::string& manifest_path) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open manifest " + manifest_path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("manifest " + manifest_path + ": " + e.what());
  }
  if (!doc.contains("instances") || !doc["instances"].is_array())
    throw std::runtime_error("manifest " + manifest_path + ": missing 'instances' array");

  const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
  std::vector<fcnf::NamedInstance> suite;
  for (const nlohmann::json& entry : doc["instances"]) {
    if (!entry.contains("name") || !entry.contains("file"))
      throw std::runtime_error("manifest " + manifest_path +
                               ": every instance needs 'name' and 'file'");
    fcnf::NamedInstance item;
    item.name = entry["name"].get<std::string>();
    item.instance = fcnf::load_instance((base / entry["file"].get<std::string>()).string());
    suite.push_back(std::move(item));
  }
  return suite;
}

int run_bench(const std::string& manifest_path, const std::string& strategy_text,
              const CommonFlags& flags, const std::filesystem::path& out_dir) {
  const std::vector<fcnf::NamedInstance> suite = load_suite(manifest_path);

  fcnf::ExperimentOptions options;
  options.config = build_config(flags);
  options.workers = env_worker_count();
  options.output_dir = out_dir;

  if (strategy_text == "all") {
    options.strategies = {fcnf::Strategy::sa_boltzmann, fcnf::Strategy::sa_vfa,
                          fcnf::Strategy::tabu_search, fcnf::Strategy::pso};
  } else {
    const auto strategy = fcnf::strategy_from_name(strategy_text);
    if (!strategy) throw std::runtime_error("unknown strategy '" + strategy_text + "'");
    if (*strategy == fcnf::Strategy::dssp) {
      std::cerr << "dssp is the baseline of every run; running baselines only, no comparison "
                   "rows\n";
      options.strategies.clear();
    } else {
      options.strategies = {*strategy};
    }
  }

  const fcnf::GapReport report = fcnf::run_experiment(suite, options);
  print_summary(report);
  if (!out_dir.empty()) {
    std::cout << "wrote results.csv and report.json to " << out_dir.string() << "\n";
  }
  return report.failures.empty() ? 0 : 1;
}

int run_report(const std::string& results_path, const std::filesystem::path& out_dir) {
  std::ifstream in(results_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + results_path);
  std::stringstream buffer;
  buffer << in.rdbuf();

  fcnf::GapReport report;
  report.rows = fcnf::read_results_csv(buffer.str());
  fcnf::aggregate_report(report);
  print_summary(report);

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir / "report.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (out_dir / "report.json").string());
    out << fcnf::report_json_text(report);
    std::cout << "wrote report.json to " << out_dir.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fixed-charge network flow heuristics: slope scaling with psi searches"};
  app.require_subcommand(1);

  // generate
  std::vector<int> gen_levels = {25};
  int gen_count = 10;
  std::uint64_t gen_seed = 1;
  std::filesystem::path gen_out;
  CLI::App* generate = app.add_subcommand("generate", "create a seeded instance suite");
  generate->add_option("--nodes", gen_levels, "node counts, one suite level each")
      ->capture_default_str();
  generate->add_option("--count", gen_count, "instances per level")->capture_default_str();
  generate->add_option("--seed", gen_seed, "suite seed")->capture_default_str();
  generate->add_option("--out", gen_out, "output directory")->required();

  // solve
  std::string solve_instance;
  std::string solve_strategy = "dssp";
  double solve_psi = 1.0;
  CommonFlags solve_flags;
  std::filesystem::path solve_out;
  CLI::App* solve = app.add_subcommand("solve", "run one strategy on one instance");
  solve->add_option("instance", solve_instance, "instance JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  solve->add_option("--strategy", solve_strategy, "dssp, sab, savf, ts, or pso")
      ->capture_default_str();
  solve->add_option("--psi", solve_psi, "slope-scaling weight for --strategy dssp")
      ->capture_default_str();
  add_common_flags(solve, solve_flags);
  solve->add_option("--out", solve_out, "directory for history/trajectory CSVs");

  // exact
  std::string exact_instance;
  int exact_max_arcs = 20;
  long long exact_max_subsets = 2'000'000;
  CLI::App* exact = app.add_subcommand("exact", "enumerate the true optimum of a small instance");
  exact->add_option("instance", exact_instance, "instance JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  exact->add_option("--max-arcs", exact_max_arcs, "refuse instances with more arcs")
      ->capture_default_str();
  exact->add_option("--max-subsets", exact_max_subsets, "subset enumeration budget")
      ->capture_default_str();

  // bench
  std::string bench_manifest;
  std::string bench_strategy = "all";
  CommonFlags bench_flags;
  std::filesystem::path bench_out;
  CLI::App* bench = app.add_subcommand("bench", "run the full experiment over a suite");
  bench->add_option("manifest", bench_manifest, "suite.json manifest")
      ->required()
      ->check(CLI::ExistingFile);
  bench->add_option("--strategy", bench_strategy, "dssp, sab, savf, ts, pso, or all")
      ->capture_default_str();
  add_common_flags(bench, bench_flags);
  bench->add_option("--out", bench_out, "directory for results.csv, report.json, and run CSVs");

  // report
  std::string report_results;
  std::filesystem::path report_out;
  CLI::App* report = app.add_subcommand("report", "re-aggregate a results.csv");
  report->add_option("results", report_results, "results.csv from a bench run")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "directory for the regenerated report.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return run_generate(gen_levels, gen_count, gen_seed, gen_out);
    if (solve->parsed())
      return run_solve(solve_instance, solve_strategy, solve_psi, solve_flags, solve_out);
    if (exact->parsed()) return run_exact(exact_instance, exact_max_arcs, exact_max_subsets);
    if (bench->parsed()) return run_bench(bench_manifest, bench_strategy, bench_flags, bench_out);
    if (report->parsed()) return run_report(report_results, report_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
