#pragma once

#include <charconv>
#include <string>

namespace netspill {

/// Shortest round-trip decimal form, independent of stream locale and precision.
inline std::string format_double(double value) {
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return ec == std::errc{} ? std::string(buffer, ptr) : std::string("nan");
}

}  // namespace netspill
