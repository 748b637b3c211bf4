#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "fcnf/report.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

fcnf::FCNFInstance parallel_pair() {
  fcnf::FCNFInstance instance;
  instance.node_count = 2;
  instance.arcs = {{0, 1}, {0, 1}};
  instance.requirement = {10.0, -10.0};
  instance.variable_cost = {1.0, 5.0};
  instance.fixed_cost = {100.0, 10.0};
  instance.capacity = {10.0, 10.0};
  return instance;
}

fcnf::FCNFInstance parallel_trap() {
  fcnf::FCNFInstance instance = parallel_pair();
  instance.variable_cost[0] = 3.0;
  instance.arcs.push_back({0, 1});
  instance.variable_cost.push_back(5.1);
  instance.fixed_cost.push_back(4.0);
  instance.capacity.push_back(5.0);
  return instance;
}

fcnf::FCNFInstance flat_instance() {
  fcnf::FCNFInstance instance;
  instance.node_count = 2;
  instance.arcs = {{0, 1}};
  instance.requirement = {7.0, -7.0};
  instance.variable_cost = {2.0};
  instance.fixed_cost = {5.0};
  instance.capacity = {7.0};
  return instance;
}

std::vector<fcnf::NamedInstance> small_suite() {
  return {{"trap", parallel_trap()}, {"pair", parallel_pair()}, {"flat", flat_instance()}};
}

fcnf::ExperimentOptions small_options() {
  fcnf::ExperimentOptions options;
  options.config.max_iterations = 30;
  options.config.early_stop_window = 30;
  options.config.time_budget_seconds = 1e9;  // keeps runs iteration-bounded
  options.config.rng_seed = 42;
  return options;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("fcnf_report_" + tag);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("gap is the percent improvement over the baseline") {
  CHECK(fcnf::compute_gap(100.0, 88.17) == doctest::Approx(11.83).epsilon(1e-12));
  CHECK(fcnf::compute_gap(50.0, 50.0) == 0.0);
  CHECK(fcnf::compute_gap(50.0, 62.1) == doctest::Approx(-24.2).epsilon(1e-12));
  CHECK_THROWS_AS(fcnf::compute_gap(0.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(fcnf::compute_gap(-5.0, 10.0), std::invalid_argument);
}

TEST_CASE("efficiency is gap earned per evaluation") {
  CHECK(fcnf::solution_efficiency(3.0, 200) == doctest::Approx(0.015).epsilon(1e-12));
  CHECK(fcnf::solution_efficiency(0.0, 57) == 0.0);
  CHECK(fcnf::solution_efficiency(11.83, 1) == 11.83);
  CHECK_THROWS_AS(fcnf::solution_efficiency(3.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(fcnf::solution_efficiency(3.0, -4), std::invalid_argument);
}

TEST_CASE("Pearson correlation matches hand-checked series") {
  SUBCASE("an exact linear relation") {
    const std::vector<double> x{1, 2, 3, 4, 5, 6};
    std::vector<double> y;
    for (double v : x) y.push_back(2.0 * v + 1.0);
    const auto c = fcnf::pearson_correlation(x, y);
    CHECK(c.coefficient == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.p_value < 1e-12);

    for (double& v : y) v = -v;
    const auto d = fcnf::pearson_correlation(x, y);
    CHECK(d.coefficient == doctest::Approx(-1.0).epsilon(1e-12));
  }

  SUBCASE("a noisy 20-point series with known r and p") {
    const std::vector<double> x{-0.254031, -3.949124, -2.117867, -2.594511, 2.120693,
                                0.341805,  -3.726448, 4.199603,  -3.638633, 4.631924,
                                -1.770571, 3.968163,  0.763627,  -1.911801, 2.070297,
                                2.22339,   -4.948634, -1.273178, -4.465506, -2.848555};
    const std::vector<double> y{-1.616269, -3.544894, -2.243354, -2.766187, 1.878656,
                                -1.571646, -4.516195, 2.117197,  -5.488221, 4.076766,
                                1.633487,  3.077018,  1.650132,  -2.666848, 3.418713,
                                1.69242,   -2.632176, -2.207029, -3.911276, -2.234803};
    const auto c = fcnf::pearson_correlation(x, y);
    CHECK(c.coefficient == doctest::Approx(0.8913689059694085).epsilon(1e-12));
    CHECK(c.p_value == doctest::Approx(1.3406941358886953e-07).epsilon(1e-6));
  }

  SUBCASE("weak relations keep a p-value in (0, 1]") {
    const auto c = fcnf::pearson_correlation({1, 2, 3, 4}, {1, -1, 2, -1});
    CHECK(std::abs(c.coefficient) < 1.0);
    CHECK(c.p_value > 0.0);
    CHECK(c.p_value <= 1.0);
  }

  SUBCASE("rejects unusable series") {
    CHECK_THROWS_AS(fcnf::pearson_correlation({1, 2}, {1, 2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(fcnf::pearson_correlation({1, 2}, {3, 4}), std::invalid_argument);
    CHECK_THROWS_AS(fcnf::pearson_correlation({1, 1, 1}, {1, 2, 3}), std::invalid_argument);
  }
}

TEST_CASE("characteristic order is fixed and the values map one-to-one") {
  const auto& names = fcnf::characteristic_names();
  CHECK(names == std::vector<std::string>{"density", "supply_fraction", "demand_fraction",
                                          "mean_supply", "cost_ratio", "gamma"});
  fcnf::NetworkCharacteristics c;
  c.density = 1.0;
  c.supply_fraction = 2.0;
  c.demand_fraction = 3.0;
  c.mean_supply = 4.0;
  c.cost_ratio = 5.0;
  c.gamma = 6.0;
  CHECK(fcnf::characteristic_values(c) == std::vector<double>{1, 2, 3, 4, 5, 6});
}

TEST_CASE("an experiment produces one row per instance and strategy") {
  const auto suite = small_suite();
  const auto options = small_options();
  const auto report = fcnf::run_experiment(suite, options);

  REQUIRE(report.rows.size() == 12);
  CHECK(report.failures.empty());
  CHECK(report.total_seconds > 0.0);

  const std::vector<std::string> expected_instances{"trap", "pair", "flat"};
  const std::vector<fcnf::Strategy> expected_strategies{
      fcnf::Strategy::sa_boltzmann, fcnf::Strategy::sa_vfa, fcnf::Strategy::tabu_search,
      fcnf::Strategy::pso};
  for (size_t i = 0; i < report.rows.size(); ++i) {
    const auto& row = report.rows[i];
    CHECK(row.instance_name == expected_instances[i / 4]);
    CHECK(row.strategy == expected_strategies[i % 4]);
  }

  const std::map<std::string, double> baselines{{"trap", 64.5}, {"pair", 60.0}, {"flat", 19.0}};
  for (const auto& row : report.rows) {
    CHECK(row.z_dssp == doctest::Approx(baselines.at(row.instance_name)).epsilon(1e-12));
    CHECK(row.z_gap ==
          doctest::Approx(fcnf::compute_gap(row.z_dssp, row.z_strategy)).epsilon(1e-9));
    CHECK(row.efficiency * static_cast<double>(row.evaluations) ==
          doctest::Approx(row.z_gap).epsilon(1e-9));
    CHECK(row.evaluations >= 1);
    // The annealers and tabu search start from the baseline's psi, so they
    // can never end up above it.
    if (row.strategy != fcnf::Strategy::pso) CHECK(row.z_gap >= -1e-12);
  }

  REQUIRE(report.summaries.size() == 4);
  for (size_t s = 0; s < report.summaries.size(); ++s) {
    const auto& summary = report.summaries[s];
    CHECK(summary.strategy == expected_strategies[s]);
    CHECK(summary.runs == 3);

    std::vector<double> gaps;
    for (const auto& row : report.rows)
      if (row.strategy == summary.strategy) gaps.push_back(row.z_gap);
    REQUIRE(gaps.size() == 3);
    const double mean = (gaps[0] + gaps[1] + gaps[2]) / 3.0;
    double variance = 0.0;
    for (double g : gaps) variance += (g - mean) * (g - mean);
    variance /= 3.0;
    long long positive = 0;
    for (double g : gaps) positive += g > 0.0 ? 1 : 0;

    CHECK(summary.mean_gap == doctest::Approx(mean).epsilon(1e-9));
    CHECK(summary.std_gap == doctest::Approx(std::sqrt(variance)).epsilon(1e-9));
    CHECK(summary.min_gap == doctest::Approx(*std::min_element(gaps.begin(), gaps.end())));
    CHECK(summary.max_gap == doctest::Approx(*std::max_element(gaps.begin(), gaps.end())));
    CHECK(summary.fraction_positive ==
          doctest::Approx(static_cast<double>(positive) / 3.0).epsilon(1e-12));
  }

  // Gaps vary across the three instances while density takes three distinct
  // values, so that correlation is defined; supply_fraction is 1/2 on every
  // instance and must be omitted.
  const auto& sab = report.summaries.front();
  CHECK(sab.gap_correlations.count("density") == 1);
  CHECK(sab.gap_correlations.count("supply_fraction") == 0);
  CHECK(report.pooled_correlations.count("density") == 1);
  const auto pooled = report.pooled_correlations.at("density");
  CHECK(pooled.coefficient >= -1.0);
  CHECK(pooled.coefficient <= 1.0);
  CHECK(pooled.p_value >= 0.0);
  CHECK(pooled.p_value <= 1.0);
}

TEST_CASE("rebuilding the aggregate from the same rows changes nothing") {
  const auto report = fcnf::run_experiment(small_suite(), small_options());
  fcnf::GapReport copy = report;
  fcnf::aggregate_report(copy);
  REQUIRE(copy.summaries.size() == report.summaries.size());
  for (size_t i = 0; i < copy.summaries.size(); ++i) {
    CHECK(copy.summaries[i].mean_gap == report.summaries[i].mean_gap);
    CHECK(copy.summaries[i].std_gap == report.summaries[i].std_gap);
    CHECK(copy.summaries[i].fraction_positive == report.summaries[i].fraction_positive);
  }
  CHECK(copy.pooled_correlations.size() == report.pooled_correlations.size());
}

TEST_CASE("a single-strategy experiment only reports that strategy") {
  auto options = small_options();
  options.strategies = {fcnf::Strategy::pso};
  const auto report = fcnf::run_experiment(small_suite(), options);
  CHECK(report.rows.size() == 3);
  for (const auto& row : report.rows) CHECK(row.strategy == fcnf::Strategy::pso);
  REQUIRE(report.summaries.size() == 1);
  CHECK(report.summaries.front().strategy == fcnf::Strategy::pso);
}

TEST_CASE("broken instances are logged as failures, never dropped silently") {
  fcnf::FCNFInstance zero;  // balanced but with no supply at all
  zero.node_count = 2;
  zero.arcs = {{0, 1}};
  zero.requirement = {0.0, 0.0};
  zero.variable_cost = {1.0};
  zero.fixed_cost = {1.0};
  zero.capacity = {5.0};

  // A free arc carries everything, so the baseline objective is 0; the costly
  // parallel arc keeps the cost-ratio characteristic itself well defined.
  fcnf::FCNFInstance freebie = flat_instance();
  freebie.variable_cost = {0.0};
  freebie.fixed_cost = {0.0};
  freebie.arcs.push_back({0, 1});
  freebie.variable_cost.push_back(5.0);
  freebie.fixed_cost.push_back(3.0);
  freebie.capacity.push_back(7.0);

  const std::vector<fcnf::NamedInstance> suite{{"zero", zero}, {"freebie", freebie}};
  const auto report = fcnf::run_experiment(suite, small_options());
  CHECK(report.rows.empty());
  CHECK(report.summaries.empty());
  REQUIRE(report.failures.size() == 2);
  CHECK(report.failures[0].instance_name == "zero");
  CHECK(report.failures[0].strategy == "all");
  CHECK(report.failures[1].instance_name == "freebie");
  CHECK(report.failures[1].strategy == "dssp");
  CHECK(!report.failures[1].reason.empty());
}

TEST_CASE("experiment inputs are vetted up front") {
  auto options = small_options();
  SUBCASE("the baseline cannot be listed as a strategy") {
    options.strategies.push_back(fcnf::Strategy::dssp);
    CHECK_THROWS_AS(fcnf::run_experiment(small_suite(), options), std::invalid_argument);
  }
  SUBCASE("instance names must be CSV-safe") {
    std::vector<fcnf::NamedInstance> suite{{"bad,name", flat_instance()}};
    CHECK_THROWS_AS(fcnf::run_experiment(suite, options), std::invalid_argument);
  }
  SUBCASE("instance names must be non-empty") {
    std::vector<fcnf::NamedInstance> suite{{"", flat_instance()}};
    CHECK_THROWS_AS(fcnf::run_experiment(suite, options), std::invalid_argument);
  }
  SUBCASE("the embedded search configuration is validated") {
    options.config.max_iterations = 0;
    CHECK_THROWS_AS(fcnf::run_experiment(small_suite(), options), std::invalid_argument);
  }
}

TEST_CASE("worker pools change the schedule, never the report") {
  auto serial = small_options();
  auto pooled = small_options();
  pooled.workers = 3;
  const auto a = fcnf::run_experiment(small_suite(), serial);
  const auto b = fcnf::run_experiment(small_suite(), pooled);
  CHECK(fcnf::results_csv_text(a) == fcnf::results_csv_text(b));
}

TEST_CASE("the results CSV round-trips every row exactly") {
  const auto report = fcnf::run_experiment(small_suite(), small_options());
  const std::string text = fcnf::results_csv_text(report);

  CHECK(text.substr(0, text.find('\n')) ==
        "instance,strategy,z_dssp,z_strategy,z_gap,s,r,best_psi,density,supply_fraction,"
        "demand_fraction,mean_supply,cost_ratio,gamma");

  const auto rows = fcnf::read_results_csv(text);
  REQUIRE(rows.size() == report.rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& in = report.rows[i];
    const auto& out = rows[i];
    CHECK(out.instance_name == in.instance_name);
    CHECK(out.strategy == in.strategy);
    CHECK(out.z_dssp == in.z_dssp);
    CHECK(out.z_strategy == in.z_strategy);
    CHECK(out.z_gap == in.z_gap);
    CHECK(out.evaluations == in.evaluations);
    CHECK(out.efficiency == in.efficiency);
    CHECK(out.best_psi == in.best_psi);
    CHECK(out.characteristics.density == in.characteristics.density);
    CHECK(out.characteristics.supply_fraction == in.characteristics.supply_fraction);
    CHECK(out.characteristics.demand_fraction == in.characteristics.demand_fraction);
    CHECK(out.characteristics.mean_supply == in.characteristics.mean_supply);
    CHECK(out.characteristics.cost_ratio == in.characteristics.cost_ratio);
    CHECK(out.characteristics.gamma == in.characteristics.gamma);
  }
}

TEST_CASE("the results CSV parser rejects malformed input") {
  CHECK_THROWS(fcnf::read_results_csv("bogus,header\n"));
  const std::string header =
      "instance,strategy,z_dssp,z_strategy,z_gap,s,r,best_psi,density,supply_fraction,"
      "demand_fraction,mean_supply,cost_ratio,gamma\n";
  CHECK_THROWS(fcnf::read_results_csv(header + "a,warp,1,1,0,1,0,1,1,1,1,1,1,1\n"));
  CHECK_THROWS(fcnf::read_results_csv(header + "a,dssp,1,1,0,1,0,1,1,1,1,1,1,1\n"));
  CHECK_THROWS(fcnf::read_results_csv(header + "a,sab,1,1,0,1\n"));
  CHECK_THROWS(fcnf::read_results_csv(header + "a,sab,1,abc,0,1,0,1,1,1,1,1,1,1\n"));
  CHECK(fcnf::read_results_csv(header).empty());
}

TEST_CASE("the JSON report isolates wall-clock data in its metadata block") {
  const auto report = fcnf::run_experiment(small_suite(), small_options());
  const auto doc = nlohmann::json::parse(fcnf::report_json_text(report));

  REQUIRE(doc.contains("rows"));
  REQUIRE(doc.contains("strategies"));
  REQUIRE(doc.contains("pooled_correlations"));
  REQUIRE(doc.contains("failures"));
  REQUIRE(doc.contains("metadata"));

  CHECK(doc["rows"].size() == 12);
  for (const auto& row : doc["rows"]) {
    CHECK(row.contains("z_gap"));
    CHECK(row.contains("characteristics"));
    CHECK(!row.contains("seconds"));
  }
  CHECK(doc["strategies"].contains("sab"));
  CHECK(doc["strategies"]["sab"]["runs"] == 3);
  CHECK(doc["failures"].empty());
  CHECK(doc["metadata"].contains("total_seconds"));
  CHECK(doc["metadata"]["run_seconds"].size() == 12);
}

TEST_CASE("identical seeds give byte-identical result files") {
  const fs::path dir_a = fresh_dir("a");
  const fs::path dir_b = fresh_dir("b");
  auto options = small_options();

  options.output_dir = dir_a;
  fcnf::run_experiment(small_suite(), options);
  options.output_dir = dir_b;
  fcnf::run_experiment(small_suite(), options);

  CHECK(read_text(dir_a / "results.csv") == read_text(dir_b / "results.csv"));

  auto doc_a = nlohmann::json::parse(read_text(dir_a / "report.json"));
  auto doc_b = nlohmann::json::parse(read_text(dir_b / "report.json"));
  doc_a.erase("metadata");
  doc_b.erase("metadata");
  CHECK(doc_a.dump() == doc_b.dump());

  // Every run leaves its artifacts behind.
  for (const char* name : {"results.csv", "report.json", "trap_sab_history.csv",
                           "trap_pso_history.csv", "flat_dssp_trajectory.csv"}) {
    CHECK(fs::exists(dir_a / name));
  }

  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("history and trajectory files carry the expected columns") {
  const fs::path dir = fresh_dir("files");
  fs::create_directories(dir);

  fcnf::SearchResult result;
  result.history.push_back({1.0, 64.5, 0.001234, "initial"});
  result.history.push_back({0.75, 60.0, 0.002, "accept"});
  fcnf::write_history_csv(result, dir / "history.csv");
  CHECK(read_text(dir / "history.csv") ==
        "psi,z,elapsed_ms,event\n1,64.5,1.234,initial\n0.75,60,2,accept\n");

  fcnf::DsspResult dssp;
  dssp.trajectory.push_back({64.5, 3});
  dssp.trajectory.push_back({60.0, 1});
  fcnf::write_trajectory_csv(dssp, dir / "trajectory.csv");
  CHECK(read_text(dir / "trajectory.csv") ==
        "iteration,true_objective,arcs_open\n1,64.5,3\n2,60,1\n");

  fs::remove_all(dir);
}
