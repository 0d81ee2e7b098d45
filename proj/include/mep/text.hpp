#ifndef MEP_TEXT_HPP
#define MEP_TEXT_HPP

#include <charconv>
#include <string>
#include <string_view>

#include "mep/error.hpp"

namespace mep {

namespace detail {

inline double parse_number(std::string_view text, std::string_view field) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty())
    throw ParseError("field '" + std::string(field) + "': cannot parse '" + std::string(text) +
                     "' as a number");
  return v;
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

}  // namespace mep

#endif  // MEP_TEXT_HPP
