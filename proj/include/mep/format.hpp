#ifndef MEP_FORMAT_HPP
#define MEP_FORMAT_HPP

#include <array>
#include <charconv>
#include <cmath>
#include <string>

namespace mep {

/// Shortest decimal string that parses back to exactly `v`.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace mep

#endif  // MEP_FORMAT_HPP
