#ifndef MEP_POLICY_HPP
#define MEP_POLICY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mep/distmodel.hpp"
#include "mep/error.hpp"
#include "mep/format.hpp"

namespace mep {

/// Rule producing the number k of upper order statistics used at sample size n.
class ThresholdPolicy {
public:
  /// k = ceil(n^a) for each exponent a in (0,1).
  struct Power {
    std::vector<double> exponents;
  };
  /// k = ceil(c * n), c in (0,1).
  struct Ratio {
    double c;
  };
  /// Fixed k values, independent of n.
  struct Explicit {
    std::vector<std::size_t> ks;
  };

  static ThresholdPolicy power(double a) { return power(std::vector<double>{a}); }
  static ThresholdPolicy power(std::vector<double> exponents) {
    if (exponents.empty()) throw ParameterError("power policy needs at least one exponent");
    for (double a : exponents)
      if (!(a > 0.0 && a < 1.0)) throw ParameterError("power exponent must lie in (0,1), got " + format_double(a));
    return ThresholdPolicy(Power{std::move(exponents)});
  }
  static ThresholdPolicy ratio(double c) {
    if (!(c > 0.0 && c < 1.0)) throw ParameterError("ratio must lie in (0,1), got " + format_double(c));
    return ThresholdPolicy(Ratio{c});
  }
  static ThresholdPolicy list(std::vector<std::size_t> ks) {
    if (ks.empty()) throw ParameterError("explicit policy needs at least one k");
    for (auto k : ks)
      if (k < 1) throw ParameterError("explicit k must be >= 1");
    return ThresholdPolicy(Explicit{std::move(ks)});
  }

  /// Sorted distinct k values for sample size n, each clamped to 1 <= k < n.
  std::vector<std::size_t> ks(std::size_t n) const {
    if (n < 2) throw DomainError("threshold policy needs n >= 2");
    std::vector<std::size_t> out;
    auto push = [&](double raw) {
      const double clamped = std::clamp(raw, 1.0, static_cast<double>(n - 1));
      out.push_back(static_cast<std::size_t>(clamped));
    };
    if (const auto* p = std::get_if<Power>(&rule_)) {
      for (double a : p->exponents) push(std::ceil(std::pow(static_cast<double>(n), a)));
    } else if (const auto* r = std::get_if<Ratio>(&rule_)) {
      push(std::ceil(r->c * static_cast<double>(n)));
    } else {
      for (auto k : std::get<Explicit>(rule_).ks) push(static_cast<double>(k));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// True when every power exponent a gives n / k^(1+eps) -> 0, i.e. a > 1/(1+eps).
  /// Ratio rules always do; explicit lists never do.
  bool satisfies_moment_growth(double eps) const {
    if (const auto* p = std::get_if<Power>(&rule_))
      return std::all_of(p->exponents.begin(), p->exponents.end(),
                         [eps](double a) { return a > 1.0 / (1.0 + eps); });
    return std::holds_alternative<Ratio>(rule_);
  }

  /// "power:0.45", "power:0.55,0.6", "ratio:0.01" or "list:10,20".
  std::string spec() const {
    std::string out;
    auto join = [&out](const auto& xs, auto fmt) {
      for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + fmt(xs[i]);
    };
    if (const auto* p = std::get_if<Power>(&rule_)) {
      out = "power:";
      join(p->exponents, [](double a) { return format_double(a); });
    } else if (const auto* r = std::get_if<Ratio>(&rule_)) {
      out = "ratio:" + format_double(r->c);
    } else {
      out = "list:";
      join(std::get<Explicit>(rule_).ks, [](std::size_t k) { return std::to_string(k); });
    }
    return out;
  }

  static ThresholdPolicy parse(std::string_view text) {
    text = detail::trim(text);
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw ParseError("field 'policy': expected rule:values, got '" + std::string(text) + "'");
    const std::string_view rule = detail::trim(text.substr(0, colon));
    std::vector<double> values;
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = detail::trim(rest.substr(0, comma));
      if (!item.empty()) values.push_back(detail::parse_number(item, "policy"));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    if (values.empty()) throw ParseError("field 'policy': no values given");
    if (rule == "power") return power(values);
    if (rule == "ratio") {
      if (values.size() != 1) throw ParseError("field 'policy': ratio takes one value");
      return ratio(values[0]);
    }
    if (rule == "list") {
      std::vector<std::size_t> ks;
      for (double v : values) {
        if (!(v >= 1.0) || v != std::floor(v)) throw ParseError("field 'policy': k must be a positive integer");
        ks.push_back(static_cast<std::size_t>(v));
      }
      return list(std::move(ks));
    }
    throw ParseError("field 'policy': unknown rule '" + std::string(rule) + "'");
  }

private:
  explicit ThresholdPolicy(std::variant<Power, Ratio, Explicit> r) : rule_(std::move(r)) {}

  std::variant<Power, Ratio, Explicit> rule_;
};

}  // namespace mep

#endif  // MEP_POLICY_HPP
