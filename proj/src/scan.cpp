#include "trustdyn/scan.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "trustdyn/kernels.hpp"

namespace trustdyn {

namespace {

constexpr std::size_t kChunk = 4096;

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

std::vector<double> scan_rest_points(const ModelParams& params,
                                     std::size_t points) {
  if (points < 2) throw std::invalid_argument("scan needs at least 2 points");
  const double last = static_cast<double>(points - 1);
  auto grid_at = [last](std::size_t i) { return static_cast<double>(i) / last; };

  std::vector<double> roots;
  std::array<double, kChunk> s{};
  std::array<double, kChunk> r{};
  int prev_sign = 0;
  double prev_s = 0.0;
  bool have_prev = false;

  for (std::size_t start = 0; start < points; start += kChunk) {
    const std::size_t n = std::min(kChunk, points - start);
    for (std::size_t k = 0; k < n; ++k) s[k] = grid_at(start + k);
    kernels::fixed_point_residual(std::span<const double>(s.data(), n), params,
                                  std::span<double>(r.data(), n));
    for (std::size_t k = 0; k < n; ++k) {
      const int sg = sign_of(r[k]);
      if (sg == 0) {
        if (!have_prev || prev_sign != 0) roots.push_back(s[k]);
      } else if (have_prev && prev_sign != 0 && sg != prev_sign) {
        roots.push_back(0.5 * (prev_s + s[k]));
      }
      prev_sign = sg;
      prev_s = s[k];
      have_prev = true;
    }
  }
  return roots;
}

}  // namespace trustdyn
