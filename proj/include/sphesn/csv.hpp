#pragma once

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>

namespace sphesn::csv {

/// Shortest round-trip representation; '.' decimal regardless of locale.
inline std::string format(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

template <typename Int>
  requires std::is_integral_v<Int>
std::string format(Int value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

inline std::string format(std::string_view value) { return std::string(value); }
inline std::string format(const char* value) { return std::string(value); }
inline std::string format(const std::string& value) { return value; }

/// Writes one comma-separated row terminated by '\n'.
template <typename... Fields>
void write_row(std::ostream& out, const Fields&... fields) {
  bool first = true;
  ((out << (first ? "" : ",") << format(fields), first = false), ...);
  out << '\n';
}

}  // namespace sphesn::csv
