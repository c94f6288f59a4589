#include "trustdyn/format.hpp"

#include <cstdio>

namespace trustdyn {

std::string format_number(double value, int digits) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return std::string(buf, n > 0 ? static_cast<std::size_t>(n) : 0);
}

}  // namespace trustdyn
