#include "trustdyn/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace trustdyn::kernels {

namespace {

bool detect_avx2() {
#if defined(TRUSTDYN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend initial_backend() {
  if (const char* forced = std::getenv("TRUSTDYN_SIMD")) {
    if (std::string(forced) == "scalar") return Backend::Scalar;
  }
  return detect_avx2() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{initial_backend()};
  return slot;
}

void check_sizes(std::size_t in, std::size_t out) {
  if (out < in) throw std::invalid_argument("output span shorter than input");
}

}  // namespace

std::string_view to_string(Backend backend) {
  return backend == Backend::Avx2 ? "avx2" : "scalar";
}

bool avx2_available() {
  static const bool available = detect_avx2();
  return available;
}

Backend active_backend() { return backend_slot().load(); }

void set_backend(Backend backend) {
  if (backend == Backend::Avx2 && !avx2_available()) {
    throw std::runtime_error("AVX2 backend requested but not available");
  }
  backend_slot().store(backend);
}

void social_cost(std::span<const double> s, const ModelParams& params,
                 std::span<double> out) {
  check_sizes(s.size(), out.size());
  if (active_backend() == Backend::Avx2) {
    avx2::social_cost(s, params.theta(), params.q(), out);
  } else {
    scalar::social_cost(s, params.theta(), params.q(), out);
  }
}

void fixed_point_residual(std::span<const double> s, const ModelParams& params,
                          std::span<double> out) {
  check_sizes(s.size(), out.size());
  if (active_backend() == Backend::Avx2) {
    avx2::fixed_point_residual(s, params.theta(), params.q(), out);
  } else {
    scalar::fixed_point_residual(s, params.theta(), params.q(), out);
  }
}

void proposer_payoff(std::span<const double> x, double s,
                     const ModelParams& params, std::span<double> out) {
  check_sizes(x.size(), out.size());
  if (active_backend() == Backend::Avx2) {
    avx2::proposer_payoff(x, s, params.theta(), params.q(), out);
  } else {
    scalar::proposer_payoff(x, s, params.theta(), params.q(), out);
  }
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> grid(n);
  if (n == 0) return grid;
  if (n == 1) {
    grid[0] = lo;
    return grid;
  }
  const double span = hi - lo;
  const double last = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = lo + span * (static_cast<double>(i) / last);
  }
  grid[n - 1] = hi;
  return grid;
}

}  // namespace trustdyn::kernels
