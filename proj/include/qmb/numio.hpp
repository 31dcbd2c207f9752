#ifndef QMB_NUMIO_HPP
#define QMB_NUMIO_HPP

#include <charconv>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace qmb {

// Shortest decimal representation that round-trips to the same double.
// Used for CSV output and the circuit text format, both of which require
// byte-exact reproducibility.
inline std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  return value;
}

inline long long parse_int(std::string_view text) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  return value;
}

}  // namespace qmb

#endif
