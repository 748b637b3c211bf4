#include "fcnf/search.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include "fcnf/rng.hpp"
#include "json.hpp"

namespace fcnf {

namespace {

constexpr double kEuler = 2.718281828459045235360287;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void finalize(SearchResult& result, PsiEvaluator& evaluator, const Stopwatch& watch) {
  result.evaluations = static_cast<long long>(result.history.size());
  result.unique_evaluations = evaluator.unique_evaluations();
  result.wall_seconds = watch.seconds();
  result.best_flow = evaluator.result(result.best_psi).best_flow;
}

}  // namespace

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::dssp: return "dssp";
    case Strategy::sa_boltzmann: return "sab";
    case Strategy::sa_vfa: return "savf";
    case Strategy::tabu_search: return "ts";
    case Strategy::pso: return "pso";
  }
  return "unknown";
}

std::optional<Strategy> strategy_from_name(const std::string& name) {
  if (name == "dssp") return Strategy::dssp;
  if (name == "sab") return Strategy::sa_boltzmann;
  if (name == "savf") return Strategy::sa_vfa;
  if (name == "ts") return Strategy::tabu_search;
  if (name == "pso") return Strategy::pso;
  return std::nullopt;
}

std::string termination_reason_name(TerminationReason r) {
  switch (r) {
    case TerminationReason::budget_iterations: return "budget_iterations";
    case TerminationReason::budget_time: return "budget_time";
    case TerminationReason::early_stop: return "early_stop";
  }
  return "unknown";
}

void SearchConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("i_max must be >= 1");
  if (!(time_budget_seconds > 0)) throw std::invalid_argument("t_max must be positive");
  if (early_stop_window < 1) throw std::invalid_argument("early_stop_window must be >= 1");
  if (!(psi_min > 0) || !(psi_min < psi_max))
    throw std::invalid_argument("psi bounds must satisfy 0 < psi_min < psi_max");
  if (initial_psi < psi_min || initial_psi > psi_max)
    throw std::invalid_argument("initial psi must lie within the psi bounds");
  if (!(sa.initial_temperature > 0)) throw std::invalid_argument("T_0 must be positive");
  if (sa.dwell < 1) throw std::invalid_argument("i_dwell must be >= 1");
  if (!(ts.min_distance > 0) || !(ts.min_distance < ts.max_distance))
    throw std::invalid_argument("tabu distances must satisfy 0 < h_0 < h_k");
  if (ts.band_count < 1) throw std::invalid_argument("band count k must be >= 1");
  if (ts.tabu_capacity < 1) throw std::invalid_argument("tabu capacity n must be >= 1");
  if (ts.retry_cap < 1) throw std::invalid_argument("retry cap must be >= 1");
  if (pso.particles < 1) throw std::invalid_argument("particle count must be >= 1");
  if (!(pso.max_velocity > 0)) throw std::invalid_argument("v_max must be positive");
  if (pso.inertia_min > pso.inertia_max) throw std::invalid_argument("w_min must be <= w_max");
  if (dssp.max_iterations < 1) throw std::invalid_argument("inner iteration budget must be >= 1");
}

double sa_accept_probability(double z_candidate, double z_incumbent, double temperature) {
  if (!(z_incumbent > 0)) throw std::invalid_argument("incumbent objective must be positive");
  if (!(temperature > 0)) throw std::invalid_argument("temperature must be positive");
  const double p = std::exp((1.0 - z_candidate / z_incumbent) / temperature);
  return std::min(1.0, p);
}

double boltzmann_temperature(double t0, int i) {
  if (!(t0 > 0)) throw std::invalid_argument("T_0 must be positive");
  if (i < 1) throw std::invalid_argument("Boltzmann schedule starts at i = 1");
  return t0 / std::log(1.0 + static_cast<double>(i));
}

double vfa_temperature(double t0, int i) {
  if (!(t0 > 0)) throw std::invalid_argument("T_0 must be positive");
  if (i < 0) throw std::invalid_argument("iteration index must be non-negative");
  return t0 * std::exp(-static_cast<double>(i) / kEuler);
}

double boltzmann_step(double psi, double temperature, double normal_draw) {
  const double root = std::sqrt(temperature);
  if (root < 2.0 / 3.0) return psi + 0.5 * normal_draw * root;
  return psi + normal_draw / 3.0;
}

double vfa_step(double psi, double temperature, double uniform_draw) {
  const double magnitude =
      temperature * (std::pow(1.0 + 1.0 / temperature, std::abs(2.0 * uniform_draw - 1.0)) - 1.0);
  return uniform_draw < 0.5 ? psi + magnitude : psi - magnitude;
}

double boltzmann_neighbor(double psi, double temperature, std::mt19937_64& rng, double psi_min,
                          double psi_max) {
  return std::clamp(boltzmann_step(psi, temperature, standard_normal(rng)), psi_min, psi_max);
}

double vfa_neighbor(double psi, double temperature, std::mt19937_64& rng, double psi_min,
                    double psi_max) {
  return std::clamp(vfa_step(psi, temperature, uniform_real(rng, 0.0, 1.0)), psi_min, psi_max);
}

std::vector<double> tabu_bands(double h0, double hk, int k) {
  if (!(h0 > 0) || !(h0 < hk)) throw std::invalid_argument("require 0 < h_0 < h_k");
  if (k < 1) throw std::invalid_argument("band count k must be >= 1");
  std::vector<double> bounds(static_cast<size_t>(k) + 1);
  bounds[0] = h0;
  bounds[static_cast<size_t>(k)] = hk;
  for (int j = 1; j < k; ++j)
    bounds[static_cast<size_t>(j)] = hk / std::pow(2.0, static_cast<double>(k - j));
  for (int j = 0; j < k; ++j) {
    if (!(bounds[static_cast<size_t>(j)] < bounds[static_cast<size_t>(j) + 1])) {
      std::ostringstream os;
      os << "band boundaries must increase strictly: h_" << j << "=" << bounds[static_cast<size_t>(j)]
         << " >= h_" << (j + 1) << "=" << bounds[static_cast<size_t>(j) + 1];
      throw std::invalid_argument(os.str());
    }
  }
  return bounds;
}

std::optional<double> sample_band_candidate(std::mt19937_64& rng, double psi, double inner,
                                            double outer, double psi_min, double psi_max,
                                            const std::deque<double>& tabu, double min_distance,
                                            int retry_cap) {
  for (int attempt = 0; attempt < retry_cap; ++attempt) {
    const double distance = uniform_real(rng, inner, outer);
    const bool positive = uniform_int(rng, 0, 1) == 1;
    double candidate = positive ? psi + distance : psi - distance;
    if (candidate > psi_max) candidate = psi_max - (candidate - psi_max);
    if (candidate < psi_min) candidate = psi_min + (psi_min - candidate);
    candidate = std::clamp(candidate, psi_min, psi_max);
    bool blocked = false;
    for (double entry : tabu) {
      if (std::abs(candidate - entry) <= min_distance) {
        blocked = true;
        break;
      }
    }
    if (!blocked) return candidate;
  }
  return std::nullopt;
}

double pso_inertia(double w_max, double w_min, int i, int i_max) {
  if (i_max < 1) throw std::invalid_argument("i_max must be >= 1");
  if (i < 0 || i > i_max) throw std::invalid_argument("iteration index must lie in [0, i_max]");
  return w_max - (static_cast<double>(i) / static_cast<double>(i_max)) * (w_max - w_min);
}

double pso_velocity(double velocity, double psi, double pbest_psi, double gbest_psi,
                    double inertia, double c1, double c2, double r1, double r2, double v_max) {
  const double raw =
      inertia * velocity + c1 * r1 * (pbest_psi - psi) + c2 * r2 * (gbest_psi - psi);
  return std::clamp(raw, -v_max, v_max);
}

SearchResult run_simulated_annealing(PsiEvaluator& evaluator, const SearchConfig& config,
                                     SaVariant variant) {
  config.validate();
  const Stopwatch watch;
  std::mt19937_64 rng = make_rng(config.rng_seed);

  SearchResult result;
  result.strategy = variant == SaVariant::boltzmann ? Strategy::sa_boltzmann : Strategy::sa_vfa;

  double psi_i = std::clamp(config.initial_psi, config.psi_min, config.psi_max);
  double z_i = evaluator.evaluate(psi_i);
  result.history.push_back({psi_i, z_i, watch.seconds(), "initial"});
  result.best_psi = psi_i;
  result.best_objective = z_i;

  int i = 0;
  int last_improvement = 0;
  bool out_of_time = false;
  result.reason = TerminationReason::budget_iterations;
  while (i < config.max_iterations && !out_of_time) {
    if (watch.seconds() >= config.time_budget_seconds) {
      result.reason = TerminationReason::budget_time;
      break;
    }
    ++i;
    const double temperature = variant == SaVariant::boltzmann
                                   ? boltzmann_temperature(config.sa.initial_temperature, i)
                                   : vfa_temperature(config.sa.initial_temperature, i);
    bool improved = false;
    for (int j = 0; j < config.sa.dwell; ++j) {
      if (watch.seconds() >= config.time_budget_seconds) {
        result.reason = TerminationReason::budget_time;
        out_of_time = true;
        break;
      }
      const double psi_c = variant == SaVariant::boltzmann
                               ? boltzmann_neighbor(psi_i, temperature, rng, config.psi_min,
                                                    config.psi_max)
                               : vfa_neighbor(psi_i, temperature, rng, config.psi_min,
                                              config.psi_max);
      const double z_c = evaluator.evaluate(psi_c);
      // Improving candidates are accepted outright; worse ones survive with
      // the percent-change probability. Acceptance ends the dwell loop.
      bool accepted = z_c <= z_i;
      if (!accepted) {
        const double u = uniform_real(rng, 0.0, 1.0);
        accepted = u < sa_accept_probability(z_c, z_i, temperature);
      }
      result.history.push_back({psi_c, z_c, watch.seconds(), accepted ? "accept" : "reject"});
      if (z_c < result.best_objective) {
        result.best_objective = z_c;
        result.best_psi = psi_c;
        improved = true;
      }
      if (accepted) {
        psi_i = psi_c;
        z_i = z_c;
        break;
      }
    }
    if (out_of_time) break;
    if (improved) last_improvement = i;
    if (i - last_improvement >= config.early_stop_window) {
      result.reason = TerminationReason::early_stop;
      break;
    }
  }
  result.iterations = i;
  finalize(result, evaluator, watch);
  return result;
}

SearchResult run_tabu_search(PsiEvaluator& evaluator, const SearchConfig& config) {
  config.validate();
  const Stopwatch watch;
  std::mt19937_64 rng = make_rng(config.rng_seed);
  const std::vector<double> bounds =
      tabu_bands(config.ts.min_distance, config.ts.max_distance, config.ts.band_count);

  SearchResult result;
  result.strategy = Strategy::tabu_search;

  double psi_i = std::clamp(config.initial_psi, config.psi_min, config.psi_max);
  double z_i = evaluator.evaluate(psi_i);
  result.history.push_back({psi_i, z_i, watch.seconds(), "initial"});
  result.best_psi = psi_i;
  result.best_objective = z_i;

  std::deque<double> tabu;
  int i = 0;
  int last_improvement = 0;
  bool out_of_time = false;
  result.reason = TerminationReason::budget_iterations;
  while (i < config.max_iterations) {
    if (watch.seconds() >= config.time_budget_seconds) {
      result.reason = TerminationReason::budget_time;
      break;
    }
    ++i;

    // One candidate per band, nearest band first; the tabu exclusion radius
    // is enforced at sampling time, so conflicting draws are never evaluated.
    int best_candidate = -1;
    for (int j = 1; j <= config.ts.band_count; ++j) {
      if (watch.seconds() >= config.time_budget_seconds) {
        result.reason = TerminationReason::budget_time;
        out_of_time = true;
        break;
      }
      const auto candidate = sample_band_candidate(
          rng, psi_i, bounds[static_cast<size_t>(j) - 1], bounds[static_cast<size_t>(j)],
          config.psi_min, config.psi_max, tabu, config.ts.min_distance, config.ts.retry_cap);
      if (!candidate) {
        std::ostringstream os;
        os << "iteration " << i << ": band " << j << " tabu-saturated after " << config.ts.retry_cap
           << " samples, skipped";
        result.warnings.push_back(os.str());
        continue;
      }
      const double z_c = evaluator.evaluate(*candidate);
      result.history.push_back({*candidate, z_c, watch.seconds(), "candidate"});
      if (best_candidate < 0 ||
          z_c < result.history[static_cast<size_t>(best_candidate)].objective)
        best_candidate = static_cast<int>(result.history.size() - 1);
    }

    if (best_candidate >= 0) {
      HistoryEntry& move = result.history[static_cast<size_t>(best_candidate)];
      move.event = "move";
      psi_i = move.psi;
      z_i = move.objective;
      if (z_i < result.best_objective) {
        result.best_objective = z_i;
        result.best_psi = psi_i;
        last_improvement = i;
      }
      tabu.push_back(psi_i);
      if (static_cast<int>(tabu.size()) > config.ts.tabu_capacity) tabu.pop_front();
    } else if (!out_of_time) {
      std::ostringstream os;
      os << "iteration " << i << ": every band tabu-saturated, no move made";
      result.warnings.push_back(os.str());
    }

    if (out_of_time) break;
    if (i - last_improvement >= config.early_stop_window) {
      result.reason = TerminationReason::early_stop;
      break;
    }
  }
  result.iterations = i;
  finalize(result, evaluator, watch);
  return result;
}

SearchResult run_pso(PsiEvaluator& evaluator, const SearchConfig& config) {
  config.validate();
  const Stopwatch watch;

  SearchResult result;
  result.strategy = Strategy::pso;

  const int n = config.pso.particles;
  // One stream per particle, so changing the particle count leaves the other
  // particles' draws untouched.
  std::vector<std::mt19937_64> streams;
  streams.reserve(static_cast<size_t>(n));
  for (int u = 0; u < n; ++u)
    streams.push_back(make_rng(derive_seed(config.rng_seed, static_cast<std::uint64_t>(u) + 1)));

  std::vector<double> position(static_cast<size_t>(n));
  std::vector<double> velocity(static_cast<size_t>(n));
  std::vector<double> pbest_psi(static_cast<size_t>(n));
  std::vector<double> pbest_z(static_cast<size_t>(n),
                              std::numeric_limits<double>::infinity());
  for (int u = 0; u < n; ++u) {
    position[static_cast<size_t>(u)] =
        std::clamp(uniform_real(streams[static_cast<size_t>(u)], 0.0, 2.0), config.psi_min,
                   config.psi_max);
    velocity[static_cast<size_t>(u)] = uniform_real(streams[static_cast<size_t>(u)],
                                                    -config.pso.max_velocity,
                                                    config.pso.max_velocity);
    pbest_psi[static_cast<size_t>(u)] = position[static_cast<size_t>(u)];
  }
  double gbest_z = std::numeric_limits<double>::infinity();
  double gbest_psi = position.empty() ? config.initial_psi : position[0];

  int i = 0;
  int since_improvement = 0;
  bool out_of_time = false;
  result.reason = TerminationReason::budget_iterations;
  while (i < config.max_iterations) {
    // The first generation always runs: the budget starts being enforced once
    // at least one evaluation exists to report.
    if (i > 0 && watch.seconds() >= config.time_budget_seconds) {
      result.reason = TerminationReason::budget_time;
      break;
    }

    bool improved = false;
    for (int u = 0; u < n; ++u) {
      if ((i > 0 || u > 0) && watch.seconds() >= config.time_budget_seconds) {
        result.reason = TerminationReason::budget_time;
        out_of_time = true;
        break;
      }
      const double psi_u = position[static_cast<size_t>(u)];
      const double z_u = evaluator.evaluate(psi_u);
      result.history.push_back({psi_u, z_u, watch.seconds(), "particle"});
      if (z_u <= pbest_z[static_cast<size_t>(u)]) {
        pbest_z[static_cast<size_t>(u)] = z_u;
        pbest_psi[static_cast<size_t>(u)] = psi_u;
        if (z_u <= gbest_z) {
          if (z_u < gbest_z) improved = true;
          gbest_z = z_u;
          gbest_psi = psi_u;
        }
      }
    }
    if (out_of_time) break;

    const double inertia =
        pso_inertia(config.pso.inertia_max, config.pso.inertia_min, i, config.max_iterations);
    for (int u = 0; u < n; ++u) {
      auto& stream = streams[static_cast<size_t>(u)];
      const double r1 = uniform_real(stream, 0.0, 1.0);
      const double r2 = uniform_real(stream, 0.0, 1.0);
      velocity[static_cast<size_t>(u)] = pso_velocity(
          velocity[static_cast<size_t>(u)], position[static_cast<size_t>(u)],
          pbest_psi[static_cast<size_t>(u)], gbest_psi, inertia, config.pso.cognitive_coeff,
          config.pso.social_coeff, r1, r2, config.pso.max_velocity);
      position[static_cast<size_t>(u)] =
          std::clamp(position[static_cast<size_t>(u)] + velocity[static_cast<size_t>(u)],
                     config.psi_min, config.psi_max);
    }

    ++i;
    since_improvement = improved ? 0 : since_improvement + 1;
    if (since_improvement >= config.early_stop_window) {
      result.reason = TerminationReason::early_stop;
      break;
    }
  }

  result.iterations = i;
  result.best_psi = gbest_psi;
  result.best_objective = gbest_z;
  finalize(result, evaluator, watch);
  return result;
}

SearchResult run_search(PsiEvaluator& evaluator, Strategy strategy, const SearchConfig& config) {
  switch (strategy) {
    case Strategy::sa_boltzmann:
      return run_simulated_annealing(evaluator, config, SaVariant::boltzmann);
    case Strategy::sa_vfa:
      return run_simulated_annealing(evaluator, config, SaVariant::vfa);
    case Strategy::tabu_search:
      return run_tabu_search(evaluator, config);
    case Strategy::pso:
      return run_pso(evaluator, config);
    case Strategy::dssp:
      break;
  }
  throw std::invalid_argument("dssp is the baseline, not a search strategy");
}

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const std::string& scope) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* key : known) {
      if (it.key() == key) {
        ok = true;
        break;
      }
    }
    if (!ok) throw std::invalid_argument("unknown config key: " + scope + it.key());
  }
}

}  // namespace

SearchConfig search_config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument(std::string("malformed config JSON: ") + err.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  reject_unknown_keys(j,
                      {"i_max", "t_max", "early_stop_window", "psi_min", "psi_max", "initial_psi",
                       "rng_seed", "sa", "ts", "pso", "dssp_max_iterations"},
                      "");

  SearchConfig config;
  if (j.contains("i_max")) config.max_iterations = j["i_max"].get<int>();
  if (j.contains("t_max")) config.time_budget_seconds = j["t_max"].get<double>();
  if (j.contains("early_stop_window")) config.early_stop_window = j["early_stop_window"].get<int>();
  if (j.contains("psi_min")) config.psi_min = j["psi_min"].get<double>();
  if (j.contains("psi_max")) config.psi_max = j["psi_max"].get<double>();
  if (j.contains("initial_psi")) config.initial_psi = j["initial_psi"].get<double>();
  if (j.contains("rng_seed")) config.rng_seed = j["rng_seed"].get<std::uint64_t>();
  if (j.contains("dssp_max_iterations"))
    config.dssp.max_iterations = j["dssp_max_iterations"].get<int>();
  if (j.contains("sa")) {
    const json& sa = j["sa"];
    reject_unknown_keys(sa, {"t_0", "i_dwell"}, "sa.");
    if (sa.contains("t_0")) config.sa.initial_temperature = sa["t_0"].get<double>();
    if (sa.contains("i_dwell")) config.sa.dwell = sa["i_dwell"].get<int>();
  }
  if (j.contains("ts")) {
    const json& ts = j["ts"];
    reject_unknown_keys(ts, {"h_0", "h_k", "k", "n", "retry_cap"}, "ts.");
    if (ts.contains("h_0")) config.ts.min_distance = ts["h_0"].get<double>();
    if (ts.contains("h_k")) config.ts.max_distance = ts["h_k"].get<double>();
    if (ts.contains("k")) config.ts.band_count = ts["k"].get<int>();
    if (ts.contains("n")) config.ts.tabu_capacity = ts["n"].get<int>();
    if (ts.contains("retry_cap")) config.ts.retry_cap = ts["retry_cap"].get<int>();
  }
  if (j.contains("pso")) {
    const json& pso = j["pso"];
    reject_unknown_keys(pso, {"n", "v_max", "w_min", "w_max", "c_1", "c_2"}, "pso.");
    if (pso.contains("n")) config.pso.particles = pso["n"].get<int>();
    if (pso.contains("v_max")) config.pso.max_velocity = pso["v_max"].get<double>();
    if (pso.contains("w_min")) config.pso.inertia_min = pso["w_min"].get<double>();
    if (pso.contains("w_max")) config.pso.inertia_max = pso["w_max"].get<double>();
    if (pso.contains("c_1")) config.pso.cognitive_coeff = pso["c_1"].get<double>();
    if (pso.contains("c_2")) config.pso.social_coeff = pso["c_2"].get<double>();
  }
  config.validate();
  return config;
}

std::string search_config_to_json_text(const SearchConfig& config) {
  json j{{"i_max", config.max_iterations},
         {"t_max", config.time_budget_seconds},
         {"early_stop_window", config.early_stop_window},
         {"psi_min", config.psi_min},
         {"psi_max", config.psi_max},
         {"initial_psi", config.initial_psi},
         {"rng_seed", config.rng_seed},
         {"dssp_max_iterations", config.dssp.max_iterations},
         {"sa", {{"t_0", config.sa.initial_temperature}, {"i_dwell", config.sa.dwell}}},
         {"ts",
          {{"h_0", config.ts.min_distance},
           {"h_k", config.ts.max_distance},
           {"k", config.ts.band_count},
           {"n", config.ts.tabu_capacity},
           {"retry_cap", config.ts.retry_cap}}},
         {"pso",
          {{"n", config.pso.particles},
           {"v_max", config.pso.max_velocity},
           {"w_min", config.pso.inertia_min},
           {"w_max", config.pso.inertia_max},
           {"c_1", config.pso.cognitive_coeff},
           {"c_2", config.pso.social_coeff}}}};
  return j.dump(2) + "\n";
}

SearchConfig load_search_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return search_config_from_json_text(buffer.str());
}

}  // namespace fcnf
