#ifndef MEP_QUADRATURE_HPP
#define MEP_QUADRATURE_HPP

// Double-exponential quadrature: tanh-sinh on finite intervals, exp-sinh on
// [a, inf). Both tolerate integrable endpoint singularities.

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "mep/error.hpp"

namespace mep::quad {

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  std::size_t max_refinements = 15;
};

struct Result {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate
  bool converged = false;
};

namespace detail {

// Runs `integrator`, turning thrown evaluation errors and non-finite
// integrand values into a non-converged result.
template <class F, class Run>
Result run_guarded(F& f, const Options& opt, Run run) {
  Result res;
  bool finite = true;
  auto guarded = [&](double x) {
    const double v = f(x);
    if (!std::isfinite(v)) {
      finite = false;
      return 0.0;
    }
    return v;
  };
  double l1 = 0.0;
  try {
    res.value = run(guarded, &res.error, &l1);
  } catch (const std::exception&) {
    res.error = std::numeric_limits<double>::infinity();
    return res;
  }
  if (!finite) {
    res.error = std::numeric_limits<double>::infinity();
    return res;
  }
  res.converged = std::isfinite(res.value) &&
                  res.error <= std::max(opt.abs_tol, opt.rel_tol * std::max(std::abs(res.value), l1));
  return res;
}

}  // namespace detail

/// Integrates `f` over the finite interval [a, b]. Never throws; inspect
/// `converged`.
template <class F>
Result integrate(F f, double a, double b, const Options& opt = {}) {
  if (a == b) return {0.0, 0.0, true};
  if (b < a) {
    Result r = integrate(f, b, a, opt);
    r.value = -r.value;
    return r;
  }
  return detail::run_guarded(f, opt, [&](auto& g, double* err, double* l1) {
    boost::math::quadrature::tanh_sinh<double> ts(opt.max_refinements);
    return ts.integrate(g, a, b, 0.1 * opt.rel_tol, err, l1);
  });
}

/// Integrates `f` over [a, inf).
template <class F>
Result integrate_to_infinity(F f, double a, const Options& opt = {}) {
  return detail::run_guarded(f, opt, [&](auto& g, double* err, double* l1) {
    boost::math::quadrature::exp_sinh<double> es(opt.max_refinements);
    auto shifted = [&](double s) { return g(a + s); };
    return es.integrate(shifted, 0.0, std::numeric_limits<double>::infinity(), 0.1 * opt.rel_tol, err, l1);
  });
}

/// Throws NumericError unless the result converged.
inline double require_converged(const Result& r, const char* what) {
  if (!r.converged || !std::isfinite(r.value)) throw NumericError(what, r.error);
  return r.value;
}

}  // namespace mep::quad

#endif  // MEP_QUADRATURE_HPP
