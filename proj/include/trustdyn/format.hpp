#pragma once

#include <string>

namespace trustdyn {

/// Shortest "%.{digits}g" rendering. 17 digits round-trip any double.
std::string format_number(double value, int digits = 17);

}  // namespace trustdyn
