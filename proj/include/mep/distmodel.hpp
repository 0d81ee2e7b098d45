#ifndef MEP_DISTMODEL_HPP
#define MEP_DISTMODEL_HPP

// Distribution models, the generalized Pareto family, and exact or
// quadrature-based mean-excess functions.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "mep/error.hpp"
#include "mep/format.hpp"
#include "mep/quadrature.hpp"
#include "mep/regime.hpp"
#include "mep/rng.hpp"
#include "mep/text.hpp"
#include "mep/sample.hpp"

namespace mep {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Below this |xi| the generalized Pareto formulas switch to the exponential
/// form plus a first-order correction in xi.
inline constexpr double kXiSwitch = 1e-8;

// ---------------------------------------------------------------------------
// Generalized Pareto family

struct GpdParams {
  double xi = 0.0;
  double beta = 1.0;

  void validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta))
      throw ParameterError("gpd scale beta must be > 0, got " + format_double(beta));
    if (!std::isfinite(xi)) throw ParameterError("gpd shape xi must be finite");
  }

  /// -beta/xi for xi < 0, +inf otherwise.
  double right_endpoint() const { return xi < 0.0 ? -beta / xi : kInfinity; }

  bool has_mean() const { return xi < 1.0; }
};

namespace detail {

// (1 + xi*y)^(-1/xi) for y = x/beta inside the support.
inline double gpd_survival(const GpdParams& p, double x) {
  const double y = x / p.beta;
  if (std::abs(p.xi) < kXiSwitch) return std::exp(-y) * (1.0 + 0.5 * p.xi * y * y);
  const double base = p.xi * y;
  if (base <= -1.0) return 0.0;
  return std::exp(-std::log1p(base) / p.xi);
}

// x with survival probability `tail`, i.e. beta*(tail^-xi - 1)/xi.
inline double gpd_from_log_tail(const GpdParams& p, double log_tail) {
  const double ell = -log_tail;
  if (std::abs(p.xi) < kXiSwitch) return p.beta * ell * (1.0 + 0.5 * p.xi * ell);
  return p.beta * std::expm1(p.xi * ell) / p.xi;
}

inline void check_gpd_support(const GpdParams& p, double x) {
  if (!(x >= 0.0) || x > p.right_endpoint())
    throw DomainError("x = " + format_double(x) + " outside gpd support [0, " +
                      format_double(p.right_endpoint()) + "]");
}

}  // namespace detail

/// Distribution function of the generalized Pareto law.
inline double gpd_cdf(const GpdParams& p, double x) {
  p.validate();
  detail::check_gpd_support(p, x);
  if (p.xi < 0.0 && x == p.right_endpoint()) return 1.0;
  return -std::expm1(std::log(detail::gpd_survival(p, x)));
}

/// Inverse of gpd_cdf on (0,1).
inline double gpd_quantile(const GpdParams& p, double u) {
  p.validate();
  if (!(u > 0.0 && u < 1.0)) throw DomainError("gpd quantile needs u in (0,1), got " + format_double(u));
  return detail::gpd_from_log_tail(p, std::log1p(-u));
}

/// Mean excess beta/(1-xi) + xi*u/(1-xi) of the generalized Pareto law.
inline double me_closed_form(const GpdParams& p, double u) {
  p.validate();
  if (!p.has_mean())
    throw MomentError("mean does not exist for xi >= 1 (xi = " + format_double(p.xi) + ")");
  if (!(u >= 0.0) || u > p.right_endpoint())
    throw DomainError("threshold " + format_double(u) + " outside [0, " +
                      format_double(p.right_endpoint()) + "]");
  if (p.xi < 0.0 && u == p.right_endpoint()) return 0.0;
  return (p.beta + p.xi * u) / (1.0 - p.xi);
}

// ---------------------------------------------------------------------------
// Concrete models. Each knows its tail, both quantile directions, support and
// limiting shape.

struct GpdModel {
  GpdParams params;

  std::string name() const { return "gpd"; }
  std::vector<std::pair<std::string, double>> param_list() const {
    return {{"xi", params.xi}, {"beta", params.beta}};
  }
  double left_endpoint() const { return 0.0; }
  double right_endpoint() const { return params.right_endpoint(); }
  double tail(double x) const {
    if (x <= 0.0) return 1.0;
    if (x >= right_endpoint()) return 0.0;
    return detail::gpd_survival(params, x);
  }
  double quantile(double u) const { return detail::gpd_from_log_tail(params, std::log1p(-u)); }
  double upper_quantile(double p) const { return detail::gpd_from_log_tail(params, std::log(p)); }
  double xi() const { return params.xi; }
  bool has_mean() const { return params.has_mean(); }
};

/// Pareto tail x^-alpha on [1, inf).
struct ParetoModel {
  double alpha = 1.0;

  std::string name() const { return "pareto"; }
  std::vector<std::pair<std::string, double>> param_list() const { return {{"alpha", alpha}}; }
  double left_endpoint() const { return 1.0; }
  double right_endpoint() const { return kInfinity; }
  double tail(double x) const { return x <= 1.0 ? 1.0 : std::pow(x, -alpha); }
  double quantile(double u) const { return std::exp(-std::log1p(-u) / alpha); }
  double upper_quantile(double p) const { return std::pow(p, -1.0 / alpha); }
  double xi() const { return 1.0 / alpha; }
  bool has_mean() const { return alpha > 1.0; }
};

struct UniformModel {
  double lo = 0.0;
  double hi = 1.0;

  std::string name() const { return "uniform"; }
  std::vector<std::pair<std::string, double>> param_list() const { return {{"a", lo}, {"b", hi}}; }
  double left_endpoint() const { return lo; }
  double right_endpoint() const { return hi; }
  double tail(double x) const {
    if (x <= lo) return 1.0;
    if (x >= hi) return 0.0;
    return (hi - x) / (hi - lo);
  }
  double quantile(double u) const { return lo + u * (hi - lo); }
  double upper_quantile(double p) const { return hi - p * (hi - lo); }
  double xi() const { return -1.0; }
  bool has_mean() const { return true; }
};

/// Tail (1-x)^power on [0,1].
struct BetaTailModel {
  double power = 1.0;

  std::string name() const { return "betatail"; }
  std::vector<std::pair<std::string, double>> param_list() const { return {{"p", power}}; }
  double left_endpoint() const { return 0.0; }
  double right_endpoint() const { return 1.0; }
  double tail(double x) const {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    return std::pow(1.0 - x, power);
  }
  double quantile(double u) const { return -std::expm1(std::log1p(-u) / power); }
  double upper_quantile(double p) const { return -std::expm1(std::log(p) / power); }
  double xi() const { return -1.0 / power; }
  bool has_mean() const { return true; }
};

struct ExponentialModel {
  double mean = 1.0;

  std::string name() const { return "exp"; }
  std::vector<std::pair<std::string, double>> param_list() const { return {{"mean", mean}}; }
  double left_endpoint() const { return 0.0; }
  double right_endpoint() const { return kInfinity; }
  double tail(double x) const { return x <= 0.0 ? 1.0 : std::exp(-x / mean); }
  double quantile(double u) const { return -mean * std::log1p(-u); }
  double upper_quantile(double p) const { return -mean * std::log(p); }
  double xi() const { return 0.0; }
  bool has_mean() const { return true; }
};

struct LognormalModel {
  double mu = 0.0;
  double sigma = 1.0;

  std::string name() const { return "lognormal"; }
  std::vector<std::pair<std::string, double>> param_list() const {
    return {{"mu", mu}, {"sigma", sigma}};
  }
  double left_endpoint() const { return 0.0; }
  double right_endpoint() const { return kInfinity; }
  double tail(double x) const {
    if (x <= 0.0) return 1.0;
    return 0.5 * std::erfc((std::log(x) - mu) / (sigma * std::sqrt(2.0)));
  }
  double quantile(double u) const {
    return std::exp(mu - sigma * std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u));
  }
  double upper_quantile(double p) const {
    return std::exp(mu + sigma * std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p));
  }
  double xi() const { return 0.0; }
  bool has_mean() const { return true; }
};

// ---------------------------------------------------------------------------

/// Immutable distribution handle used for sampling and as a numeric oracle.
class DistributionModel {
public:
  using Variant = std::variant<GpdModel, ParetoModel, UniformModel, BetaTailModel,
                               ExponentialModel, LognormalModel>;

  static DistributionModel gpd(double xi, double beta) {
    GpdParams p{xi, beta};
    p.validate();
    return DistributionModel(GpdModel{p});
  }
  static DistributionModel pareto(double alpha) {
    require_positive(alpha, "pareto alpha");
    return DistributionModel(ParetoModel{alpha});
  }
  static DistributionModel uniform(double lo = 0.0, double hi = 1.0) {
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
      throw ParameterError("uniform needs a < b");
    return DistributionModel(UniformModel{lo, hi});
  }
  static DistributionModel beta_tail(double power) {
    require_positive(power, "betatail p");
    return DistributionModel(BetaTailModel{power});
  }
  static DistributionModel exponential(double mean = 1.0) {
    require_positive(mean, "exp mean");
    return DistributionModel(ExponentialModel{mean});
  }
  static DistributionModel lognormal(double mu = 0.0, double sigma = 1.0) {
    if (!std::isfinite(mu)) throw ParameterError("lognormal mu must be finite");
    require_positive(sigma, "lognormal sigma");
    return DistributionModel(LognormalModel{mu, sigma});
  }

  std::string name() const { return visit([](const auto& m) { return m.name(); }); }

  /// Canonical "name:param=value,..." form, parseable by parse_model_spec.
  std::string spec() const {
    return visit([](const auto& m) {
      std::string out = m.name() + ":";
      bool first = true;
      for (const auto& [key, value] : m.param_list()) {
        if (!first) out += ",";
        out += key + "=" + format_double(value);
        first = false;
      }
      return out;
    });
  }

  double tail(double x) const { return visit([x](const auto& m) { return m.tail(x); }); }
  double cdf(double x) const { return 1.0 - tail(x); }

  /// Left-continuous inverse F^<-(u) for u in (0,1).
  double quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile needs u in (0,1), got " + format_double(u));
    return visit([u](const auto& m) { return m.quantile(u); });
  }

  /// F^<-(1 - p), evaluated without forming 1 - p.
  double upper_quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("upper quantile needs p in (0,1), got " + format_double(p));
    return visit([p](const auto& m) { return m.upper_quantile(p); });
  }

  /// Tail quantile b(t) = F^<-(1 - 1/t), t > 1.
  double tail_quantile(double t) const {
    if (!(t > 1.0)) throw DomainError("tail quantile needs t > 1, got " + format_double(t));
    return upper_quantile(1.0 / t);
  }

  double left_endpoint() const { return visit([](const auto& m) { return m.left_endpoint(); }); }
  double right_endpoint() const { return visit([](const auto& m) { return m.right_endpoint(); }); }
  std::optional<double> true_xi() const { return visit([](const auto& m) { return m.xi(); }); }
  bool has_mean() const { return visit([](const auto& m) { return m.has_mean(); }); }

  Regime regime() const {
    const double xi = *true_xi();
    if (xi > 0.0) return Regime::Frechet;
    if (xi < 0.0) return Regime::Weibull;
    return Regime::Gumbel;
  }

  const Variant& variant() const noexcept { return model_; }

private:
  explicit DistributionModel(Variant m) : model_(std::move(m)) {}

  template <class F>
  auto visit(F&& f) const -> decltype(std::visit(std::forward<F>(f), std::declval<const Variant&>())) {
    return std::visit(std::forward<F>(f), model_);
  }

  static void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ParameterError(std::string(what) + " must be > 0, got " + format_double(v));
  }

  Variant model_;
};

// ---------------------------------------------------------------------------
// Text form "name:param=value,param=value".


inline DistributionModel parse_model_spec(std::string_view text) {
  text = detail::trim(text);
  const auto colon = text.find(':');
  const std::string name(detail::trim(text.substr(0, colon)));
  std::map<std::string, double, std::less<>> params;
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = detail::trim(rest.substr(0, comma));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string_view::npos)
        throw ParseError("field '" + std::string(item) + "': expected param=value");
      const std::string key(detail::trim(item.substr(0, eq)));
      params[key] = detail::parse_number(detail::trim(item.substr(eq + 1)), key);
    }
  }

  auto take = [&](std::string_view key, std::optional<double> fallback) -> double {
    const auto it = params.find(key);
    if (it == params.end()) {
      if (!fallback) throw ParseError("field '" + std::string(key) + "': required by model '" + name + "'");
      return *fallback;
    }
    const double v = it->second;
    params.erase(it);
    return v;
  };
  auto finish = [&](DistributionModel m) {
    if (!params.empty())
      throw ParseError("field '" + params.begin()->first + "': not a parameter of model '" + name + "'");
    return m;
  };

  if (name == "gpd") {
    const double xi = take("xi", std::nullopt);
    const double beta = take("beta", 1.0);
    return finish(DistributionModel::gpd(xi, beta));
  }
  if (name == "pareto") return finish(DistributionModel::pareto(take("alpha", std::nullopt)));
  if (name == "uniform") {
    const double a = take("a", 0.0);
    const double b = take("b", 1.0);
    return finish(DistributionModel::uniform(a, b));
  }
  if (name == "betatail") return finish(DistributionModel::beta_tail(take("p", std::nullopt)));
  if (name == "exp") return finish(DistributionModel::exponential(take("mean", 1.0)));
  if (name == "lognormal") {
    const double mu = take("mu", 0.0);
    const double sigma = take("sigma", 1.0);
    return finish(DistributionModel::lognormal(mu, sigma));
  }
  throw ParseError("field 'name': unknown model '" + name + "'");
}

// ---------------------------------------------------------------------------

/// Mean excess E[X - u | X > u] by adaptive quadrature of the tail integral.
inline double me_numeric(const DistributionModel& d, double u, const quad::Options& opt = {}) {
  if (!d.has_mean()) throw MomentError("mean does not exist for " + d.spec());
  const double tail_u = d.tail(u);
  if (!(u < d.right_endpoint()) || !(tail_u > 0.0))
    throw DomainError("threshold " + format_double(u) + " is at or beyond the right endpoint of " + d.spec());

  double below = 0.0;  // part of the integral where the tail is identically 1
  double start = u;
  if (u < d.left_endpoint()) {
    below = d.left_endpoint() - u;
    start = d.left_endpoint();
  }
  auto tail = [&d](double s) { return d.tail(s); };
  const double xf = d.right_endpoint();
  const quad::Result r = std::isfinite(xf) ? quad::integrate(tail, start, xf, opt)
                                            : quad::integrate_to_infinity(tail, start, opt);
  return (below + quad::require_converged(r, "mean-excess tail integral")) / tail_u;
}

// ---------------------------------------------------------------------------

/// n raw i.i.d. draws quantile(U_i), U_i from the counter-based stream.
inline std::vector<double> draw(const DistributionModel& d, std::size_t n, const StreamKey& key) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = d.quantile(stream_uniform(key, i));
  return out;
}

inline SortedSample sample(const DistributionModel& d, std::size_t n, const StreamKey& key) {
  if (n < 1) throw ParameterError("sample size must be >= 1");
  return SortedSample::from_unsorted(draw(d, n, key));
}

inline SortedSample sample(const DistributionModel& d, std::size_t n, std::uint64_t seed) {
  return sample(d, n, StreamKey{seed, 0, 0});
}

}  // namespace mep

#endif  // MEP_DISTMODEL_HPP
