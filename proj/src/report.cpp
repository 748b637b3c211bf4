#include "fcnf/report.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "json.hpp"

namespace fcnf {

namespace {

// Shortest decimal form that round-trips, so serialized numbers are a pure
// function of their values.
std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("failed to format a double");
  return std::string(buf, ptr);
}

double parse_double(const std::string& field, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw std::runtime_error("results CSV: bad " + what + " value '" + field + "'");
  return v;
}

long long parse_count(const std::string& field, const std::string& what) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw std::runtime_error("results CSV: bad " + what + " value '" + field + "'");
  return v;
}

const std::string kResultsHeader =
    "instance,strategy,z_dssp,z_strategy,z_gap,s,r,best_psi,density,supply_fraction,"
    "demand_fraction,mean_supply,cost_ratio,gamma";

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

double compute_gap(double z_dssp, double z_x) {
  if (!(z_dssp > 0.0))
    throw std::invalid_argument("compute_gap: baseline objective must be positive");
  return 100.0 * (z_dssp - z_x) / z_dssp;
}

double solution_efficiency(double z_gap, long long s) {
  if (s < 1) throw std::invalid_argument("solution_efficiency: evaluation count must be at least 1");
  return z_gap / static_cast<double>(s);
}

Correlation pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("pearson_correlation: series lengths differ");
  const size_t n = x.size();
  if (n < 3) throw std::invalid_argument("pearson_correlation: need at least 3 points");

  double mean_x = 0.0;
  double mean_y = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);

  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0))
    throw std::invalid_argument("pearson_correlation: zero-variance series");

  Correlation out;
  out.coefficient = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);

  const double dof = static_cast<double>(n) - 2.0;
  const double denom = 1.0 - out.coefficient * out.coefficient;
  if (denom <= 0.0) {
    out.p_value = 0.0;  // perfectly linear: the t statistic diverges
    return out;
  }
  const double t = std::abs(out.coefficient) * std::sqrt(dof / denom);
  const boost::math::students_t dist(dof);
  out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
  return out;
}

const std::vector<std::string>& characteristic_names() {
  static const std::vector<std::string> names = {"density",     "supply_fraction", "demand_fraction",
                                                 "mean_supply", "cost_ratio",      "gamma"};
  return names;
}

std::vector<double> characteristic_values(const NetworkCharacteristics& c) {
  return {c.density, c.supply_fraction, c.demand_fraction, c.mean_supply, c.cost_ratio, c.gamma};
}

namespace {

struct InstanceOutcome {
  std::vector<RunRecord> rows;
  std::vector<RunFailure> failures;
  DsspResult baseline;
  bool baseline_ok = false;
};

InstanceOutcome process_instance(const NamedInstance& item, const ExperimentOptions& options) {
  InstanceOutcome out;

  NetworkCharacteristics chars;
  try {
    chars = characteristics(item.instance);
  } catch (const std::exception& e) {
    out.failures.push_back({item.name, "all", e.what()});
    return out;
  }

  double z_dssp = 0.0;
  try {
    out.baseline = run_dssp(item.instance, 1.0, options.config.dssp);
    z_dssp = out.baseline.best_objective;
    if (!(z_dssp > 0.0))
      throw std::runtime_error("baseline objective is not positive; gaps are undefined");
    out.baseline_ok = true;
  } catch (const std::exception& e) {
    out.failures.push_back({item.name, "dssp", e.what()});
    return out;
  }

  for (const Strategy s : options.strategies) {
    try {
      PsiEvaluator evaluator(item.instance, options.config.dssp);
      const SearchResult result = run_search(evaluator, s, options.config);

      RunRecord row;
      row.instance_name = item.name;
      row.strategy = s;
      row.z_dssp = z_dssp;
      row.z_strategy = result.best_objective;
      row.z_gap = compute_gap(z_dssp, result.best_objective);
      row.evaluations = result.evaluations;
      row.efficiency = solution_efficiency(row.z_gap, result.evaluations);
      row.best_psi = result.best_psi;
      row.seconds = result.wall_seconds;
      row.characteristics = chars;
      out.rows.push_back(std::move(row));

      if (!options.output_dir.empty()) {
        write_history_csv(result, options.output_dir /
                                      (item.name + "_" + strategy_name(s) + "_history.csv"));
      }
    } catch (const std::exception& e) {
      out.failures.push_back({item.name, strategy_name(s), e.what()});
    }
  }

  if (!options.output_dir.empty()) {
    write_trajectory_csv(out.baseline, options.output_dir / (item.name + "_dssp_trajectory.csv"));
  }
  return out;
}

}  // namespace

GapReport run_experiment(const std::vector<NamedInstance>& suite, const ExperimentOptions& options) {
  options.config.validate();
  for (const Strategy s : options.strategies) {
    if (s == Strategy::dssp)
      throw std::invalid_argument(
          "run_experiment: dssp is the shared baseline, not a strategy to compare against it");
  }
  for (const NamedInstance& item : suite) {
    if (item.name.empty() || item.name.find_first_of(",\n\r") != std::string::npos)
      throw std::invalid_argument("run_experiment: instance name unusable in CSV: '" + item.name +
                                  "'");
  }
  if (!options.output_dir.empty()) std::filesystem::create_directories(options.output_dir);

  const auto started = std::chrono::steady_clock::now();

  std::vector<InstanceOutcome> outcomes(suite.size());
  std::atomic<size_t> next{0};
  const auto work = [&] {
    for (size_t i; (i = next.fetch_add(1)) < suite.size();) {
      outcomes[i] = process_instance(suite[i], options);
    }
  };

  const int workers = std::max(1, options.workers);
  if (workers == 1 || suite.size() <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    const int spawn = std::min<int>(workers, static_cast<int>(suite.size()));
    pool.reserve(static_cast<size_t>(spawn));
    for (int w = 0; w < spawn; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  // Deterministic fold in manifest order, whatever order the workers finished.
  GapReport report;
  for (InstanceOutcome& out : outcomes) {
    for (RunRecord& row : out.rows) report.rows.push_back(std::move(row));
    for (RunFailure& f : out.failures) report.failures.push_back(std::move(f));
  }
  aggregate_report(report);
  report.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  if (!options.output_dir.empty()) {
    write_text_file(options.output_dir / "results.csv", results_csv_text(report));
    write_text_file(options.output_dir / "report.json", report_json_text(report));
  }
  return report;
}

void aggregate_report(GapReport& report) {
  report.summaries.clear();
  report.pooled_correlations.clear();

  std::vector<Strategy> order;
  for (const RunRecord& row : report.rows) {
    if (std::find(order.begin(), order.end(), row.strategy) == order.end())
      order.push_back(row.strategy);
  }

  const auto correlate = [](const std::vector<const RunRecord*>& rows,
                            std::map<std::string, Correlation>& dest) {
    const std::vector<std::string>& names = characteristic_names();
    std::vector<double> gaps;
    gaps.reserve(rows.size());
    for (const RunRecord* row : rows) gaps.push_back(row->z_gap);
    for (size_t c = 0; c < names.size(); ++c) {
      std::vector<double> values;
      values.reserve(rows.size());
      for (const RunRecord* row : rows)
        values.push_back(characteristic_values(row->characteristics)[c]);
      try {
        dest[names[c]] = pearson_correlation(values, gaps);
      } catch (const std::invalid_argument&) {
        // Undefined for this slice (too few rows or a constant series); the
        // key is simply absent.
      }
    }
  };

  std::vector<const RunRecord*> pooled;
  pooled.reserve(report.rows.size());
  for (const RunRecord& row : report.rows) pooled.push_back(&row);

  for (const Strategy s : order) {
    std::vector<const RunRecord*> rows;
    for (const RunRecord& row : report.rows) {
      if (row.strategy == s) rows.push_back(&row);
    }

    StrategySummary sum;
    sum.strategy = s;
    sum.runs = static_cast<long long>(rows.size());
    sum.min_gap = rows.front()->z_gap;
    sum.max_gap = rows.front()->z_gap;
    double mean = 0.0;
    long long positive = 0;
    for (const RunRecord* row : rows) {
      mean += row->z_gap;
      sum.min_gap = std::min(sum.min_gap, row->z_gap);
      sum.max_gap = std::max(sum.max_gap, row->z_gap);
      if (row->z_gap > 0.0) ++positive;
    }
    mean /= static_cast<double>(rows.size());
    double variance = 0.0;
    for (const RunRecord* row : rows) {
      const double d = row->z_gap - mean;
      variance += d * d;
    }
    sum.mean_gap = mean;
    sum.std_gap = std::sqrt(variance / static_cast<double>(rows.size()));
    sum.fraction_positive = static_cast<double>(positive) / static_cast<double>(rows.size());
    correlate(rows, sum.gap_correlations);
    report.summaries.push_back(std::move(sum));
  }

  if (!pooled.empty()) correlate(pooled, report.pooled_correlations);
}

std::string results_csv_text(const GapReport& report) {
  std::string out = kResultsHeader + "\n";
  for (const RunRecord& row : report.rows) {
    out += row.instance_name;
    out += ',';
    out += strategy_name(row.strategy);
    out += ',';
    out += format_double(row.z_dssp);
    out += ',';
    out += format_double(row.z_strategy);
    out += ',';
    out += format_double(row.z_gap);
    out += ',';
    out += std::to_string(row.evaluations);
    out += ',';
    out += format_double(row.efficiency);
    out += ',';
    out += format_double(row.best_psi);
    for (const double v : characteristic_values(row.characteristics)) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<RunRecord> read_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader)
    throw std::runtime_error("results CSV: missing or unexpected header");

  std::vector<RunRecord> rows;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      const size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (fields.size() != 14)
      throw std::runtime_error("results CSV: line " + std::to_string(line_no) + " has " +
                               std::to_string(fields.size()) + " fields, expected 14");

    RunRecord row;
    row.instance_name = fields[0];
    const auto strategy = strategy_from_name(fields[1]);
    if (!strategy || *strategy == Strategy::dssp)
      throw std::runtime_error("results CSV: line " + std::to_string(line_no) +
                               " has unknown strategy '" + fields[1] + "'");
    row.strategy = *strategy;
    row.z_dssp = parse_double(fields[2], "z_dssp");
    row.z_strategy = parse_double(fields[3], "z_strategy");
    row.z_gap = parse_double(fields[4], "z_gap");
    row.evaluations = parse_count(fields[5], "s");
    row.efficiency = parse_double(fields[6], "r");
    row.best_psi = parse_double(fields[7], "best_psi");
    row.characteristics.density = parse_double(fields[8], "density");
    row.characteristics.supply_fraction = parse_double(fields[9], "supply_fraction");
    row.characteristics.demand_fraction = parse_double(fields[10], "demand_fraction");
    row.characteristics.mean_supply = parse_double(fields[11], "mean_supply");
    row.characteristics.cost_ratio = parse_double(fields[12], "cost_ratio");
    row.characteristics.gamma = parse_double(fields[13], "gamma");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string report_json_text(const GapReport& report) {
  nlohmann::json doc;

  doc["rows"] = nlohmann::json::array();
  for (const RunRecord& row : report.rows) {
    nlohmann::json j;
    j["instance"] = row.instance_name;
    j["strategy"] = strategy_name(row.strategy);
    j["z_dssp"] = row.z_dssp;
    j["z_strategy"] = row.z_strategy;
    j["z_gap"] = row.z_gap;
    j["s"] = row.evaluations;
    j["r"] = row.efficiency;
    j["best_psi"] = row.best_psi;
    nlohmann::json c;
    const std::vector<std::string>& names = characteristic_names();
    const std::vector<double> values = characteristic_values(row.characteristics);
    for (size_t i = 0; i < names.size(); ++i) c[names[i]] = values[i];
    j["characteristics"] = std::move(c);
    doc["rows"].push_back(std::move(j));
  }

  const auto correlation_json = [](const std::map<std::string, Correlation>& correlations) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, corr] : correlations) {
      j[name] = {{"coefficient", corr.coefficient}, {"p_value", corr.p_value}};
    }
    return j;
  };

  doc["strategies"] = nlohmann::json::object();
  for (const StrategySummary& sum : report.summaries) {
    nlohmann::json j;
    j["runs"] = sum.runs;
    j["mean_gap"] = sum.mean_gap;
    j["std_gap"] = sum.std_gap;
    j["min_gap"] = sum.min_gap;
    j["max_gap"] = sum.max_gap;
    j["fraction_positive"] = sum.fraction_positive;
    j["gap_correlations"] = correlation_json(sum.gap_correlations);
    doc["strategies"][strategy_name(sum.strategy)] = std::move(j);
  }

  doc["pooled_correlations"] = correlation_json(report.pooled_correlations);

  doc["failures"] = nlohmann::json::array();
  for (const RunFailure& f : report.failures) {
    doc["failures"].push_back(
        {{"instance", f.instance_name}, {"strategy", f.strategy}, {"reason", f.reason}});
  }

  // The only wall-clock numbers in the document live here, so everything
  // outside this block is reproducible byte for byte under a fixed seed.
  nlohmann::json timings = nlohmann::json::array();
  for (const RunRecord& row : report.rows) {
    timings.push_back({{"instance", row.instance_name},
                       {"strategy", strategy_name(row.strategy)},
                       {"seconds", row.seconds}});
  }
  doc["metadata"] = {{"total_seconds", report.total_seconds}, {"run_seconds", std::move(timings)}};

  return doc.dump(2) + "\n";
}

void write_history_csv(const SearchResult& result, const std::filesystem::path& path) {
  std::string out = "psi,z,elapsed_ms,event\n";
  for (const HistoryEntry& entry : result.history) {
    out += format_double(entry.psi);
    out += ',';
    out += format_double(entry.objective);
    out += ',';
    out += format_double(entry.elapsed_seconds * 1000.0);
    out += ',';
    out += entry.event;
    out += '\n';
  }
  write_text_file(path, out);
}

void write_trajectory_csv(const DsspResult& result, const std::filesystem::path& path) {
  std::string out = "iteration,true_objective,arcs_open\n";
  for (size_t i = 0; i < result.trajectory.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += format_double(result.trajectory[i].objective);
    out += ',';
    out += std::to_string(result.trajectory[i].arcs_open);
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace fcnf
