#ifndef MEP_REGIME_HPP
#define MEP_REGIME_HPP

#include <optional>
#include <string>
#include <string_view>

namespace mep {

/// Maximal domain of attraction, i.e. the sign of the shape parameter.
enum class Regime { Frechet, Weibull, Gumbel };

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Frechet: return "frechet";
    case Regime::Weibull: return "weibull";
    case Regime::Gumbel: return "gumbel";
  }
  return "unknown";
}

inline std::optional<Regime> parse_regime(std::string_view s) {
  if (s == "frechet") return Regime::Frechet;
  if (s == "weibull") return Regime::Weibull;
  if (s == "gumbel") return Regime::Gumbel;
  return std::nullopt;
}

}  // namespace mep

#endif  // MEP_REGIME_HPP
