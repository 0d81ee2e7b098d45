#ifndef MEP_HARNESS_HPP
#define MEP_HARNESS_HPP

// Monte Carlo convergence experiments: replicate sweeps over (n, k), per-cell
// summaries, and their CSV/JSON serializations.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mep/converse.hpp"
#include "mep/distmodel.hpp"
#include "mep/error.hpp"
#include "mep/format.hpp"
#include "mep/meplot.hpp"
#include "mep/policy.hpp"
#include "mep/regime.hpp"
#include "mep/rng.hpp"
#include "mep/setgeom.hpp"
#include "mep/text.hpp"

namespace mep {

enum class Target { Hausdorff, Concomitant, SlopeFrechet, VFrechet, EndpointWeibull, ZWeibull, Gumbel };

inline std::string_view to_string(Target t) {
  switch (t) {
    case Target::Hausdorff: return "hausdorff";
    case Target::Concomitant: return "concomitant";
    case Target::SlopeFrechet: return "slope_frechet";
    case Target::VFrechet: return "v_frechet";
    case Target::EndpointWeibull: return "endpoint_weibull";
    case Target::ZWeibull: return "z_weibull";
    case Target::Gumbel: return "gumbel";
  }
  return "unknown";
}

inline std::optional<Target> parse_target(std::string_view s) {
  for (Target t : {Target::Hausdorff, Target::Concomitant, Target::SlopeFrechet, Target::VFrechet,
                   Target::EndpointWeibull, Target::ZWeibull, Target::Gumbel})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

struct ExperimentSpec {
  std::string name = "experiment";
  DistributionModel model = DistributionModel::exponential();
  std::vector<std::size_t> n_grid;
  ThresholdPolicy policy = ThresholdPolicy::power(0.45);
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  Regime regime = Regime::Gumbel;
  Target target = Target::Gumbel;
  std::optional<double> epsilon;  // defaults to max(0.05 |limit|, 0.02)
  std::optional<Window> window;   // defaults to Window::default_for(regime)
  std::optional<double> kappa;    // Weibull targets; defaults to the model's endpoint
  std::string auxiliary = "one";  // Gumbel target: "one", "f", or a positive number
};

/// Regime a target statistic belongs to; set targets follow spec.regime.
inline Regime target_regime(const ExperimentSpec& spec) {
  switch (spec.target) {
    case Target::SlopeFrechet:
    case Target::VFrechet: return Regime::Frechet;
    case Target::EndpointWeibull:
    case Target::ZWeibull: return Regime::Weibull;
    case Target::Gumbel: return Regime::Gumbel;
    default: return spec.regime;
  }
}

/// Theoretical limit of the target under the model's true shape.
inline double target_limit(const ExperimentSpec& spec) {
  const double xi = *spec.model.true_xi();
  switch (spec.target) {
    case Target::Hausdorff: return 0.0;
    case Target::Concomitant:
      switch (spec.regime) {
        case Regime::Frechet: return xi / (1.0 - xi);
        case Regime::Weibull: return -xi / (1.0 - xi);
        case Regime::Gumbel: return 1.0;
      }
      break;
    case Target::SlopeFrechet: return gamma_from_xi(Regime::Frechet, xi);
    case Target::VFrechet: return gamma_from_xi(Regime::Frechet, xi) + 1.0;
    case Target::EndpointWeibull: return gamma_from_xi(Regime::Weibull, xi);
    case Target::ZWeibull: return 1.0 - gamma_from_xi(Regime::Weibull, xi);
    case Target::Gumbel: return 1.0;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline double default_epsilon(double limit) { return std::max(0.05 * std::abs(limit), 0.02); }

inline void validate(const ExperimentSpec& spec) {
  if (spec.replicates < 1) throw ConfigError("key 'replicates': must be >= 1");
  if (spec.n_grid.empty()) throw ConfigError("key 'n_grid': must not be empty");
  for (std::size_t i = 0; i < spec.n_grid.size(); ++i) {
    if (spec.n_grid[i] < 3) throw ConfigError("key 'n_grid': sample sizes must be >= 3");
    if (i > 0 && spec.n_grid[i] <= spec.n_grid[i - 1]) throw ConfigError("key 'n_grid': must be strictly increasing");
  }
  if (spec.epsilon && !(*spec.epsilon > 0.0)) throw ConfigError("key 'epsilon': must be > 0");
  if (spec.window && !(spec.window->m > 0.0)) throw ConfigError("key 'window': must be > 0");
  const Regime model_regime = spec.model.regime();
  const Regime wanted = target_regime(spec);
  if (model_regime != wanted)
    throw ConfigError("key 'target': " + std::string(to_string(spec.target)) + " needs a " +
                      std::string(to_string(wanted)) + "-regime model, but " + spec.model.spec() + " is " +
                      std::string(to_string(model_regime)));
  if (spec.target == Target::Hausdorff || spec.target == Target::Concomitant) {
    const double xi = *spec.model.true_xi();
    if (spec.regime == Regime::Frechet && !(xi < 1.0)) throw ConfigError("key 'model': frechet limit set needs xi < 1");
  }
  if ((wanted == Regime::Frechet) && !spec.model.has_mean()) throw ConfigError("key 'model': mean does not exist");
  if (wanted == Regime::Weibull && !spec.kappa && !std::isfinite(spec.model.right_endpoint()))
    throw ConfigError("key 'kappa': model has no finite right endpoint");
  if (spec.target == Target::Gumbel && spec.auxiliary != "one" && spec.auxiliary != "f") {
    try {
      if (!(detail::parse_number(spec.auxiliary, "auxiliary") > 0.0)) throw ParseError("");
    } catch (const ParseError&) {
      throw ConfigError("key 'auxiliary': expected \"one\", \"f\" or a positive number");
    }
  }
}

// ---------------------------------------------------------------------------
// Config file: TOML-style "key = value" lines, '#' comments, values are
// numbers, quoted strings, or [number, ...] arrays.

inline ExperimentSpec parse_experiment_config(std::istream& is) {
  std::map<std::string, std::string, std::less<>> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (line[i] == '#' && !in_string) {
        line.erase(i);
        break;
      }
    }
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key(detail::trim(body.substr(0, eq)));
    if (raw.count(key)) throw ConfigError("key '" + key + "': given twice");
    raw[key] = std::string(detail::trim(body.substr(eq + 1)));
  }

  auto take = [&](std::string_view key) -> std::optional<std::string> {
    const auto it = raw.find(key);
    if (it == raw.end()) return std::nullopt;
    std::string v = it->second;
    raw.erase(it);
    return v;
  };
  auto require = [&](std::string_view key) {
    auto v = take(key);
    if (!v) throw ConfigError("key '" + std::string(key) + "': required");
    return *v;
  };
  auto as_string = [](std::string_view key, const std::string& v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    throw ConfigError("key '" + std::string(key) + "': expected a quoted string");
  };
  auto as_number = [](std::string_view key, const std::string& v) {
    try {
      return detail::parse_number(v, key);
    } catch (const ParseError&) {
      throw ConfigError("key '" + std::string(key) + "': expected a number, got '" + v + "'");
    }
  };
  auto as_count = [&](std::string_view key, const std::string& v) {
    const double d = as_number(key, v);
    if (!(d >= 0.0) || d != std::floor(d) || d > 9.0e15)
      throw ConfigError("key '" + std::string(key) + "': expected a nonnegative integer, got '" + v + "'");
    return static_cast<std::uint64_t>(d);
  };

  ExperimentSpec spec;
  try {
    spec.model = parse_model_spec(as_string("model", require("model")));
  } catch (const ParseError& e) {
    throw ConfigError(std::string("key 'model': ") + e.what());
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("key 'model': ") + e.what());
  }

  {
    const std::string v = require("n_grid");
    if (v.size() < 2 || v.front() != '[' || v.back() != ']') throw ConfigError("key 'n_grid': expected [n1, n2, ...]");
    std::string_view rest = std::string_view(v).substr(1, v.size() - 2);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = detail::trim(rest.substr(0, comma));
      if (!item.empty()) spec.n_grid.push_back(as_count("n_grid", std::string(item)));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
  }

  const std::string target = as_string("target", require("target"));
  const auto t = parse_target(target);
  if (!t) throw ConfigError("key 'target': unknown target '" + target + "'");
  spec.target = *t;

  spec.replicates = as_count("replicates", require("replicates"));
  spec.seed = as_count("seed", require("seed"));

  spec.regime = spec.model.regime();
  if (auto v = take("regime")) {
    const auto r = parse_regime(as_string("regime", *v));
    if (!r) throw ConfigError("key 'regime': expected frechet, weibull or gumbel");
    spec.regime = *r;
  }
  if (auto v = take("name")) spec.name = as_string("name", *v);
  if (auto v = take("policy")) {
    try {
      spec.policy = ThresholdPolicy::parse(as_string("policy", *v));
    } catch (const ParseError& e) {
      throw ConfigError(std::string("key 'policy': ") + e.what());
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("key 'policy': ") + e.what());
    }
  }
  if (auto v = take("epsilon")) spec.epsilon = as_number("epsilon", *v);
  if (auto v = take("window")) spec.window = Window{as_number("window", *v)};
  if (auto v = take("kappa")) spec.kappa = as_number("kappa", *v);
  if (auto v = take("auxiliary")) {
    if (!v->empty() && v->front() == '"') spec.auxiliary = as_string("auxiliary", *v);
    else spec.auxiliary = format_double(as_number("auxiliary", *v));
  }
  if (!raw.empty()) throw ConfigError("key '" + raw.begin()->first + "': unknown key");
  validate(spec);
  return spec;
}

inline ExperimentSpec parse_experiment_config(std::string_view text) {
  std::istringstream is{std::string(text)};
  return parse_experiment_config(is);
}

// ---------------------------------------------------------------------------

struct ReportRow {
  std::size_t n = 0;
  std::size_t k = 0;
  double mean = 0.0;
  double sd = 0.0;
  double exceedance = 0.0;
  std::size_t failures = 0;
  double q10 = 0.0, q50 = 0.0, q90 = 0.0;  // failures rank as +inf
};

struct ConvergenceReport {
  std::string name;
  std::string model;
  std::string target;
  std::string regime;
  std::string policy;
  double limit = 0.0;
  double true_xi = 0.0;
  double epsilon = 0.0;
  std::optional<double> window;
  std::optional<double> kappa;
  std::string auxiliary;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::vector<ReportRow> rows;
};

/// Worker count: MEPLOT_THREADS when set, else the hardware concurrency.
inline unsigned resolve_threads() {
  if (const char* env = std::getenv("MEPLOT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

inline double quantile_type7(const std::vector<double>& sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0 || sorted[lo] == sorted[hi]) return sorted[lo];
  if (std::isinf(sorted[hi])) return sorted[hi];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline ReportRow summarize(std::size_t n, std::size_t k, const std::vector<std::optional<double>>& values, double limit,
                           double eps) {
  ReportRow row;
  row.n = n;
  row.k = k;
  std::vector<double> ok, ranked;
  std::size_t exceed = 0;
  for (const auto& v : values) {
    if (!v) {
      ++row.failures;
      ++exceed;
      ranked.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    ok.push_back(*v);
    ranked.push_back(*v);
    if (std::abs(*v - limit) > eps) ++exceed;
  }
  row.exceedance = static_cast<double>(exceed) / static_cast<double>(values.size());
  if (!ok.empty()) {
    double sum = 0.0;
    for (double v : ok) sum += v;
    row.mean = sum / static_cast<double>(ok.size());
    double ss = 0.0;
    for (double v : ok) ss += (v - row.mean) * (v - row.mean);
    row.sd = ok.size() > 1 ? std::sqrt(ss / static_cast<double>(ok.size() - 1)) : 0.0;
  } else {
    row.mean = row.sd = std::numeric_limits<double>::quiet_NaN();
  }
  std::sort(ranked.begin(), ranked.end());
  row.q10 = quantile_type7(ranked, 0.1);
  row.q50 = quantile_type7(ranked, 0.5);
  row.q90 = quantile_type7(ranked, 0.9);
  return row;
}

}  // namespace detail

/// Runs every (n, k, replicate) cell of the experiment.
///
/// Replicate r at the i-th sample size draws from stream (seed, r, i). Results
/// are stored by replicate index and reduced in that order, so the report
/// does not depend on `threads`.
inline ConvergenceReport run_experiment(const ExperimentSpec& spec, unsigned threads = 0) {
  validate(spec);
  if (threads == 0) threads = resolve_threads();

  const double limit = target_limit(spec);
  const double eps = spec.epsilon.value_or(default_epsilon(limit));
  const Window window = spec.window.value_or(Window::default_for(spec.regime));
  const double kappa = spec.kappa.value_or(spec.model.right_endpoint());
  const double xi = *spec.model.true_xi();

  std::optional<LimitSet> limit_set_v;
  if (spec.target == Target::Hausdorff) limit_set_v = limit_set(spec.regime, xi);
  std::optional<AuxiliaryFunction> aux;
  if (spec.target == Target::Gumbel) {
    if (spec.auxiliary == "one") aux = AuxiliaryFunction::constant(1.0);
    else if (spec.auxiliary == "f") aux = auxiliary_from_f(spec.model);
    else aux = AuxiliaryFunction::constant(detail::parse_number(spec.auxiliary, "auxiliary"));
  }

  auto evaluate = [&](const SortedSample& s, std::size_t k) -> double {
    switch (spec.target) {
      case Target::Hausdorff: return hausdorff_windowed(scaled_set(s, k, spec.regime), *limit_set_v, window);
      case Target::Concomitant: return extract_min_x_concomitant(scaled_set(s, k, spec.regime)).y;
      case Target::SlopeFrechet: return slope_statistic_frechet(s, k);
      case Target::VFrechet: return v_statistic_frechet(s, k);
      case Target::EndpointWeibull: return endpoint_statistic_weibull(s, k, kappa);
      case Target::ZWeibull: return z_statistic_weibull(s, k, kappa);
      case Target::Gumbel: return gumbel_statistic(s, k, *aux, s.size());
    }
    return std::numeric_limits<double>::quiet_NaN();
  };

  ConvergenceReport rep;
  rep.name = spec.name;
  rep.model = spec.model.spec();
  rep.target = std::string(to_string(spec.target));
  rep.regime = std::string(to_string(target_regime(spec)));
  rep.policy = spec.policy.spec();
  rep.limit = limit;
  rep.true_xi = xi;
  rep.epsilon = eps;
  if (spec.target == Target::Hausdorff) rep.window = window.m;
  if (target_regime(spec) == Regime::Weibull) rep.kappa = kappa;
  if (spec.target == Target::Gumbel) rep.auxiliary = spec.auxiliary;
  rep.replicates = spec.replicates;
  rep.seed = spec.seed;

  for (std::size_t ni = 0; ni < spec.n_grid.size(); ++ni) {
    const std::size_t n = spec.n_grid[ni];
    const std::vector<std::size_t> ks = spec.policy.ks(n);
    // results[r][j]: replicate r at k = ks[j]
    std::vector<std::vector<std::optional<double>>> results(spec.replicates);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t r = next++; r < spec.replicates; r = next++) {
        const SortedSample s = sample(spec.model, n, StreamKey{spec.seed, r, ni});
        auto& out = results[r];
        out.reserve(ks.size());
        for (std::size_t k : ks) {
          try {
            out.emplace_back(evaluate(s, k));
          } catch (const Error&) {
            out.emplace_back(std::nullopt);
          }
        }
      }
    };
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, spec.replicates));
    if (workers <= 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    for (std::size_t j = 0; j < ks.size(); ++j) {
      std::vector<std::optional<double>> column;
      column.reserve(spec.replicates);
      for (const auto& r : results) column.push_back(r[j]);
      rep.rows.push_back(detail::summarize(n, ks[j], column, limit, eps));
    }
  }
  return rep;
}

/// (n, exceedance probability) per report row, in n order.
inline std::vector<std::pair<std::size_t, double>> exceedance_curve(const ConvergenceReport& rep) {
  std::vector<std::size_t> ns;
  for (const auto& r : rep.rows)
    if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
  if (ns.size() < 2) throw DomainError("exceedance curve needs a report over at least 2 sample sizes");
  std::vector<std::pair<std::size_t, double>> out;
  for (const auto& r : rep.rows) out.emplace_back(r.n, r.exceedance);
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

inline std::string report_csv(const ConvergenceReport& rep) {
  std::ostringstream os;
  os << "n,k,metric,value\n";
  for (const auto& r : rep.rows) {
    auto put = [&](std::string_view metric, const std::string& value) {
      os << r.n << "," << r.k << "," << metric << "," << value << "\n";
    };
    put("limit", format_double(rep.limit));
    put("epsilon", format_double(rep.epsilon));
    put("mean", format_double(r.mean));
    put("sd", format_double(r.sd));
    put("exceedance", format_double(r.exceedance));
    put("failures", std::to_string(r.failures));
    put("q10", format_double(r.q10));
    put("q50", format_double(r.q50));
    put("q90", format_double(r.q90));
  }
  return os.str();
}

inline nlohmann::ordered_json report_json(const ConvergenceReport& rep) {
  auto num = [](double v) -> nlohmann::ordered_json {
    if (!std::isfinite(v)) return nullptr;
    return v;
  };
  nlohmann::ordered_json j;
  j["name"] = rep.name;
  j["model"] = rep.model;
  j["target"] = rep.target;
  j["regime"] = rep.regime;
  j["policy"] = rep.policy;
  j["limit"] = rep.limit;
  j["limit_source"] = {{"true_xi", rep.true_xi}};
  j["epsilon"] = rep.epsilon;
  if (rep.window) j["window"] = *rep.window;
  if (rep.kappa) j["kappa"] = *rep.kappa;
  if (!rep.auxiliary.empty()) j["auxiliary"] = rep.auxiliary;
  j["replicates"] = rep.replicates;
  j["seed"] = rep.seed;
  j["streams"] = "replicate r at n_grid index i draws from (seed, r, i)";
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rep.rows) {
    j["rows"].push_back({{"n", r.n},
                         {"k", r.k},
                         {"mean", num(r.mean)},
                         {"sd", num(r.sd)},
                         {"exceedance", r.exceedance},
                         {"failures", r.failures},
                         {"q10", num(r.q10)},
                         {"q50", num(r.q50)},
                         {"q90", num(r.q90)}});
  }
  return j;
}

}  // namespace mep

#endif  // MEP_HARNESS_HPP
