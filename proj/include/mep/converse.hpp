#ifndef MEP_CONVERSE_HPP
#define MEP_CONVERSE_HPP

// Statistics whose convergence characterizes the three domains of attraction,
// the H-functionals they converge through, and the numeric identities used
// along the way (Renyi, Hall-Wellner, Karamata).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mep/distmodel.hpp"
#include "mep/error.hpp"
#include "mep/format.hpp"
#include "mep/policy.hpp"
#include "mep/quadrature.hpp"
#include "mep/regime.hpp"
#include "mep/sample.hpp"

namespace mep {

// ---------------------------------------------------------------------------
// gamma <-> xi

/// gamma = xi/(1-xi) for Frechet, -xi/(1-xi) for Weibull, 1 for Gumbel.
inline double gamma_from_xi(Regime r, double xi) {
  switch (r) {
    case Regime::Frechet: return xi / (1.0 - xi);
    case Regime::Weibull: return -xi / (1.0 - xi);
    case Regime::Gumbel: return 1.0;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline double xi_from_gamma(Regime r, double gamma) {
  switch (r) {
    case Regime::Frechet: return gamma / (1.0 + gamma);
    case Regime::Weibull: return -gamma / (1.0 - gamma);
    case Regime::Gumbel: return 0.0;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// Sample statistics

namespace detail {

inline void check_k(const SortedSample& s, std::size_t k) {
  if (k < 1 || k >= s.size())
    throw DomainError("statistic needs 1 <= k < n (k = " + std::to_string(k) + ", n = " + std::to_string(s.size()) + ")");
}

// sum_{i<=k} (X_(i) - X_(k+1))
inline double excess_sum(const SortedSample& s, std::size_t k) {
  const auto v = s.values();
  const double base = v[k];
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += v[i] - base;
  return sum;
}

}  // namespace detail

/// (1/(k X_(k+1))) sum_{i<=k} (X_(i) - X_(k+1)); converges to xi/(1-xi) in the Frechet case.
inline double slope_statistic_frechet(const SortedSample& s, std::size_t k) {
  detail::check_k(s, k);
  const double threshold = s.order_stat(k + 1);
  if (!(threshold > 0.0))
    throw SampleError("nonpositive threshold X_(" + std::to_string(k + 1) + ") = " + format_double(threshold));
  return detail::excess_sum(s, k) / (static_cast<double>(k) * threshold);
}

/// (1/k) sum_{i<=k} X_(i)/X_(k+1), zeroed unless X_(k+1) > 1.
inline double v_statistic_frechet(const SortedSample& s, std::size_t k) {
  detail::check_k(s, k);
  const double threshold = s.order_stat(k + 1);
  if (!(threshold > 1.0)) return 0.0;
  const auto v = s.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += v[i] / threshold;
  return sum / static_cast<double>(k);
}

/// (1/(k (kappa - X_(k+1)))) sum_{i<=k} (X_(i) - X_(k+1)) for a hypothesized endpoint kappa.
inline double endpoint_statistic_weibull(const SortedSample& s, std::size_t k, double kappa) {
  detail::check_k(s, k);
  if (kappa < s.max())
    throw DomainError("endpoint kappa = " + format_double(kappa) + " is below the sample maximum " + format_double(s.max()));
  const double gap = kappa - s.order_stat(k + 1);
  if (!(gap > 0.0)) throw SampleError("zero normalizer: kappa equals X_(" + std::to_string(k + 1) + ")");
  return detail::excess_sum(s, k) / (static_cast<double>(k) * gap);
}

/// (Z_(k)/k) sum_{i<=k} 1/Z_(i) with Z = 1/(kappa - X); converges to 1 - gamma.
inline double z_statistic_weibull(const SortedSample& s, std::size_t k, double kappa) {
  detail::check_k(s, k);
  if (!(kappa > s.max()))
    throw DomainError("z statistic needs kappa > X_(1) (kappa = " + format_double(kappa) + ", X_(1) = " +
                      format_double(s.max()) + ")");
  const auto v = s.values();
  const double zk = 1.0 / (kappa - v[k - 1]);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += (kappa - v[i]) * zk;
  return sum / static_cast<double>(k);
}

/// Positive normalizing function a(t), t > 1.
class AuxiliaryFunction {
public:
  enum class Form { Constant, Table, ClosedForm };

  static AuxiliaryFunction constant(double c) {
    if (!(c > 0.0)) throw DomainError("auxiliary constant must be > 0, got " + format_double(c));
    AuxiliaryFunction a(Form::Constant);
    a.constant_ = c;
    return a;
  }

  static AuxiliaryFunction closed_form(std::function<double(double)> f) {
    AuxiliaryFunction a(Form::ClosedForm);
    a.fn_ = std::move(f);
    return a;
  }

  /// Log-log linear interpolation through (t_i, a_i); t must be increasing.
  static AuxiliaryFunction table(std::vector<double> t, std::vector<double> values) {
    if (t.size() < 2 || t.size() != values.size()) throw DomainError("auxiliary table needs >= 2 matching nodes");
    AuxiliaryFunction a(Form::Table);
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!(values[i] > 0.0)) throw DomainError("auxiliary table value must be > 0");
      if (i > 0 && !(t[i] > t[i - 1])) throw DomainError("auxiliary table grid must be increasing");
      a.log_t_.push_back(std::log(t[i]));
      a.log_a_.push_back(std::log(values[i]));
    }
    return a;
  }

  Form form() const noexcept { return form_; }

  double operator()(double t) const {
    switch (form_) {
      case Form::Constant: return constant_;
      case Form::ClosedForm: return fn_(t);
      case Form::Table: break;
    }
    const double lt = std::log(t);
    if (!(lt >= log_t_.front() && lt <= log_t_.back()))
      throw DomainError("auxiliary table evaluated at t = " + format_double(t) + " outside its grid [" +
                        format_double(std::exp(log_t_.front())) + ", " + format_double(std::exp(log_t_.back())) + "]");
    const auto hi = std::upper_bound(log_t_.begin(), log_t_.end(), lt);
    const std::size_t j = hi == log_t_.end() ? log_t_.size() - 1 : static_cast<std::size_t>(hi - log_t_.begin());
    const std::size_t i = j - 1;
    const double w = (lt - log_t_[i]) / (log_t_[j] - log_t_[i]);
    return std::exp((1.0 - w) * log_a_[i] + w * log_a_[j]);
  }

private:
  explicit AuxiliaryFunction(Form f) : form_(f) {}

  Form form_;
  double constant_ = 1.0;
  std::function<double(double)> fn_;
  std::vector<double> log_t_, log_a_;
};

/// (1/(k a(n/k))) sum_{i<=k} (X_(i) - X_(k+1)); converges to 1 in the Gumbel case.
inline double gumbel_statistic(const SortedSample& s, std::size_t k, const AuxiliaryFunction& a, std::size_t n) {
  detail::check_k(s, k);
  const double scale = a(static_cast<double>(n) / static_cast<double>(k));
  if (!(scale > 0.0)) throw DomainError("auxiliary value a(n/k) must be > 0, got " + format_double(scale));
  return detail::excess_sum(s, k) / (static_cast<double>(k) * scale);
}

inline double gumbel_statistic(const SortedSample& s, std::size_t k, const AuxiliaryFunction& a) {
  return gumbel_statistic(s, k, a, s.size());
}

// ---------------------------------------------------------------------------
// H-functionals. Each integral over x in (y,1) is rewritten with
// 1 - x = (1 - y) e^{-w}, w in (0, inf), which removes the (1-y) weight and
// leaves a smooth integrand in w.

namespace detail {

template <class G>
double integrate_upper_tail_w(G g, const char* what) {
  const quad::Result r = quad::integrate_to_infinity(g, 0.0);
  return quad::require_converged(r, what);
}

inline void check_open_unit(double y, const char* name) {
  if (!(y > 0.0 && y < 1.0)) throw DomainError(std::string(name) + " must lie in (0,1), got " + format_double(y));
}

}  // namespace detail

/// H(y) = int_y^1 F<-(x) dx / (F<-(y)(1-y)); tends to gamma + 1 as y -> 1.
inline double h_frechet(const DistributionModel& d, double y) {
  detail::check_open_unit(y, "y");
  if (!d.has_mean()) throw MomentError("H integral diverges: " + d.spec() + " has no finite mean");
  const double tail_y = 1.0 - y;
  const double level = d.upper_quantile(tail_y);
  if (!(level > 0.0)) throw DomainError("H needs F<-(y) > 0, got " + format_double(level));
  auto g = [&](double w) {
    const double p = tail_y * std::exp(-w);
    if (!(p > 0.0)) return 0.0;
    return d.upper_quantile(p) / level * std::exp(-w);
  };
  try {
    return detail::integrate_upper_tail_w(g, "H integral");
  } catch (const NumericError& e) {
    throw MomentError(std::string("H integral did not converge; moment condition likely fails: ") + e.what());
  }
}

/// Transformed-variable H(y) = int_y^1 F_Z<-(y)/F_Z<-(x) dx/(1-y), Z = 1/(kappa - X);
/// tends to 1 - gamma as y -> 1.
inline double h_weibull(const DistributionModel& d, double kappa, double y) {
  detail::check_open_unit(y, "y");
  if (!(kappa >= d.right_endpoint()))
    throw DomainError("kappa = " + format_double(kappa) + " is below the right endpoint of " + d.spec());
  const double tail_y = 1.0 - y;
  const double gap_y = kappa - d.upper_quantile(tail_y);
  if (!(gap_y > 0.0)) throw DomainError("kappa - F<-(y) must be > 0");
  auto g = [&](double w) {
    const double p = tail_y * std::exp(-w);
    if (!(p > 0.0)) return 0.0;
    return (kappa - d.upper_quantile(p)) / gap_y * std::exp(-w);
  };
  return detail::integrate_upper_tail_w(g, "weibull H integral");
}

enum class HGumbelForm {
  MeanExcess,  // (1/(1-x)) int_x^1 (F<-(s) - F<-(x)) ds, i.e. f(F<-(x))
  Literal,     // (1/(1-x)) int_x^1 F<-(s) ds
};

inline double h_gumbel(const DistributionModel& d, double x, HGumbelForm form = HGumbelForm::MeanExcess) {
  detail::check_open_unit(x, "x");
  if (!d.has_mean()) throw MomentError("H integral diverges: " + d.spec() + " has no finite mean");
  const double tail_x = 1.0 - x;
  const double level = d.upper_quantile(tail_x);
  const double shift = form == HGumbelForm::MeanExcess ? level : 0.0;
  auto g = [&](double w) {
    const double p = tail_x * std::exp(-w);
    if (!(p > 0.0)) return 0.0;
    return (d.upper_quantile(p) - shift) * std::exp(-w);
  };
  return detail::integrate_upper_tail_w(g, "gumbel H integral");
}

/// a(t) = f(b(t)), the mean excess at the tail quantile, tabulated at
/// t = 1.5 and t = 10^(j/20) up to 1e12, so every power of ten is a node.
inline AuxiliaryFunction auxiliary_from_f(const DistributionModel& d) {
  if (d.regime() != Regime::Gumbel) throw DomainError("auxiliary_from_f needs a gumbel-regime model, got " + d.spec());
  if (!d.has_mean()) throw MomentError("auxiliary_from_f needs a finite mean");
  constexpr int kPerDecade = 20;
  std::vector<double> t{1.5}, a;
  for (int j = 4; j <= 12 * kPerDecade; ++j) t.push_back(std::pow(10.0, static_cast<double>(j) / kPerDecade));
  for (double tt : t) a.push_back(me_numeric(d, d.tail_quantile(tt)));
  return AuxiliaryFunction::table(std::move(t), std::move(a));
}

// ---------------------------------------------------------------------------
// Identities

/// The product formula prod_{i=1}^{n-k-1} (n-i+1)/(n-i) = n/(k+1) quoted for
/// E[(1 - U_(k+1))^-1].
inline double renyi_expectation(std::size_t n, std::size_t k) {
  if (n < 1 || k + 1 > n) throw DomainError("renyi expectation needs 1 <= k+1 <= n");
  return static_cast<double>(n) / static_cast<double>(k + 1);
}

/// Exact E[(1 - U_(k+1))^-1] for the (k+1)-th largest of n uniforms:
/// 1 - U_(k+1) ~ Beta(k+1, n-k), whose reciprocal has mean n/k.
inline double inverse_complement_mean(std::size_t n, std::size_t k) {
  if (k < 1 || k + 1 > n) throw DomainError("inverse complement mean needs 1 <= k < n");
  return static_cast<double>(n) / static_cast<double>(k);
}

/// (sup over grid of |(1 - y/n)^n 1[y <= n] - e^-y|, (2 + 1/n) e^-2 / n).
inline std::pair<double, double> hall_wellner_gap(std::size_t n, std::span<const double> grid) {
  if (n < 1) throw DomainError("hall-wellner gap needs n >= 1");
  const double nn = static_cast<double>(n);
  double sup = 0.0;
  for (double y : grid) {
    if (!(y >= 0.0)) throw DomainError("hall-wellner grid must lie in [0, inf)");
    const double lhs = y <= nn ? std::pow(1.0 - y / nn, nn) : 0.0;
    sup = std::max(sup, std::abs(lhs - std::exp(-y)));
  }
  return {sup, (2.0 + 1.0 / nn) * std::exp(-2.0) / nn};
}

struct KaramataReport {
  struct Entry {
    double t, x, deviation;
  };
  std::vector<Entry> entries;
  double largest_t = 0.0;
  double deviation_at_largest_t = 0.0;  // max over x at the largest t
  double tolerance = 0.0;
  bool passed = false;
};

/// Checks g(tx)/g(t) -> x^rho over the grids and certifies the deviation at
/// the largest t against `tolerance`.
inline KaramataReport karamata_oracle(const std::function<double(double)>& g, double rho, std::span<const double> t_grid,
                                      std::span<const double> x_grid, double tolerance = 0.01) {
  if (t_grid.empty() || x_grid.empty()) throw DomainError("karamata oracle needs nonempty grids");
  KaramataReport rep;
  rep.tolerance = tolerance;
  rep.largest_t = *std::max_element(t_grid.begin(), t_grid.end());
  for (double t : t_grid) {
    const double gt = g(t);
    if (!(gt > 0.0)) throw DomainError("g must be positive, g(" + format_double(t) + ") = " + format_double(gt));
    for (double x : x_grid) {
      const double gtx = g(t * x);
      if (!(gtx > 0.0)) throw DomainError("g must be positive, g(" + format_double(t * x) + ") = " + format_double(gtx));
      const double dev = std::abs(gtx / gt - std::pow(x, rho));
      rep.entries.push_back({t, x, dev});
      if (t == rep.largest_t) rep.deviation_at_largest_t = std::max(rep.deviation_at_largest_t, dev);
    }
  }
  rep.passed = rep.deviation_at_largest_t <= tolerance;
  return rep;
}

// ---------------------------------------------------------------------------
// Regime classification

enum class Verdict { Frechet, Weibull, Gumbel, Inconclusive };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Frechet: return "frechet";
    case Verdict::Weibull: return "weibull";
    case Verdict::Gumbel: return "gumbel";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct RegimeEstimate {
  struct PerK {
    std::size_t k;
    double statistic;
  };
  Verdict regime = Verdict::Inconclusive;
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double xi = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> kappa;
  std::string statistic;  // name of the statistic listed in per_k
  std::vector<PerK> per_k;
};

struct ClassifyOptions {
  double stability_tol = 0.15;  // max relative spread over the k values
  double gumbel_tol = 0.15;     // max |statistic - 1| for the Gumbel check
};

/// k exponents used when the caller does not pass a policy.
inline ThresholdPolicy default_classify_policy() { return ThresholdPolicy::power({0.55, 0.6, 0.65, 0.7, 0.75}); }

namespace detail {

inline double relative_spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return mean == 0.0 ? std::numeric_limits<double>::infinity() : (*hi - *lo) / std::abs(mean);
}

inline double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

template <class F>
std::optional<std::vector<double>> try_all(const std::vector<std::size_t>& ks, F&& f) {
  std::vector<double> out;
  try {
    for (auto k : ks) out.push_back(f(k));
  } catch (const Error&) {
    return std::nullopt;
  }
  return out;
}

inline std::vector<RegimeEstimate::PerK> zip_k(const std::vector<std::size_t>& ks, const std::vector<double>& v) {
  std::vector<RegimeEstimate::PerK> out;
  for (std::size_t i = 0; i < ks.size(); ++i) out.push_back({ks[i], v[i]});
  return out;
}

}  // namespace detail

/// Decides the domain of attraction from the converse statistics.
///
/// Order of checks: Frechet slope statistic stable and positive; Weibull
/// endpoint statistic stable inside (0,1) with kappa just above the maximum;
/// Gumbel statistic, normalized by the empirical mean excess at the middle k,
/// within `gumbel_tol` of 1 at every k. The Gumbel check doubles as a veto on
/// the first two, since a slowly varying mean excess rules out both.
inline RegimeEstimate classify_regime(const SortedSample& s, const ThresholdPolicy& policy = default_classify_policy(),
                                      const ClassifyOptions& opt = {}) {
  const std::size_t n = s.size();
  if (n < 3) throw DomainError("classification needs at least 3 values");
  const std::vector<std::size_t> ks = policy.ks(n);
  if (ks.size() < 2) throw DomainError("classification needs at least two distinct k values at n = " + std::to_string(n));

  RegimeEstimate est;

  const auto frechet = detail::try_all(ks, [&](std::size_t k) { return slope_statistic_frechet(s, k); });

  const std::size_t k_ref = ks[ks.size() / 2];
  const double a_ref = detail::excess_sum(s, k_ref) / static_cast<double>(k_ref);
  std::optional<std::vector<double>> gumbel;
  bool gumbel_ok = false;
  if (a_ref > 0.0) {
    const auto a = AuxiliaryFunction::constant(a_ref);
    gumbel = detail::try_all(ks, [&](std::size_t k) { return gumbel_statistic(s, k, a, n); });
    gumbel_ok = gumbel && std::all_of(gumbel->begin(), gumbel->end(),
                                      [&](double g) { return std::abs(g - 1.0) <= opt.gumbel_tol; });
  }

  if (frechet && !gumbel_ok) {
    const bool positive = std::all_of(frechet->begin(), frechet->end(), [](double g) { return g > 0.0; });
    if (positive && detail::relative_spread(*frechet) < opt.stability_tol) {
      est.regime = Verdict::Frechet;
      est.gamma = detail::mean_of(*frechet);
      est.xi = xi_from_gamma(Regime::Frechet, est.gamma);
      est.statistic = "slope_frechet";
      est.per_k = detail::zip_k(ks, *frechet);
      return est;
    }
  }

  const double x1 = s.order_stat(1);
  const double kappa = x1 > 0.0 ? x1 * (1.0 + 1.0 / static_cast<double>(n)) : x1 + (x1 - s.order_stat(2));
  const auto weibull = detail::try_all(ks, [&](std::size_t k) { return endpoint_statistic_weibull(s, k, kappa); });
  if (weibull && !gumbel_ok) {
    const bool inside = std::all_of(weibull->begin(), weibull->end(), [](double g) { return g > 0.0 && g < 1.0; });
    if (inside && detail::relative_spread(*weibull) < opt.stability_tol) {
      est.regime = Verdict::Weibull;
      est.gamma = detail::mean_of(*weibull);
      est.xi = xi_from_gamma(Regime::Weibull, est.gamma);
      est.kappa = kappa;
      est.statistic = "endpoint_weibull";
      est.per_k = detail::zip_k(ks, *weibull);
      return est;
    }
  }

  if (gumbel_ok) {
    est.regime = Verdict::Gumbel;
    est.gamma = 1.0;
    est.xi = 0.0;
    est.statistic = "gumbel";
    est.per_k = detail::zip_k(ks, *gumbel);
    return est;
  }

  if (frechet) {
    est.statistic = "slope_frechet";
    est.per_k = detail::zip_k(ks, *frechet);
  }
  return est;
}

inline nlohmann::ordered_json to_json(const RegimeEstimate& e) {
  auto num = [](double v) -> nlohmann::ordered_json {
    if (!std::isfinite(v)) return nullptr;
    return v;
  };
  nlohmann::ordered_json j;
  j["regime"] = std::string(to_string(e.regime));
  j["gamma"] = num(e.gamma);
  j["xi"] = num(e.xi);
  if (e.kappa) j["kappa"] = *e.kappa;
  j["statistic"] = e.statistic;
  j["per_k"] = nlohmann::ordered_json::array();
  for (const auto& p : e.per_k) j["per_k"].push_back({{"k", p.k}, {"statistic", num(p.statistic)}});
  return j;
}

}  // namespace mep

#endif  // MEP_CONVERSE_HPP
