// Compiled with -mavx2 (and without FMA) when the compiler targets x86-64.
// Only reached through dispatch after a CPU check.

#include "trustdyn/kernels.hpp"

#if defined(TRUSTDYN_HAVE_AVX2)

#include <immintrin.h>

#include "trustdyn/detail/formulas.hpp"

namespace trustdyn::kernels::avx2 {

namespace {

// theta q / (q + (1 - q) s), same association as the scalar formula.
inline __m256d social_cost_x4(__m256d s, __m256d theta_q, __m256d q,
                              __m256d one_minus_q) {
  return _mm256_div_pd(theta_q, _mm256_add_pd(q, _mm256_mul_pd(one_minus_q, s)));
}

}  // namespace

void social_cost(std::span<const double> s, double theta, double q,
                 std::span<double> out) {
  const __m256d vtq = _mm256_set1_pd(theta * q);
  const __m256d vq = _mm256_set1_pd(q);
  const __m256d vomq = _mm256_set1_pd(1.0 - q);
  const std::size_t n = s.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(s.data() + i);
    _mm256_storeu_pd(out.data() + i, social_cost_x4(v, vtq, vq, vomq));
  }
  for (; i < n; ++i) out[i] = detail::social_cost(s[i], theta, q);
}

void fixed_point_residual(std::span<const double> s, double theta, double q,
                          std::span<double> out) {
  const double threshold = detail::s_star(theta, q);
  const __m256d vtq = _mm256_set1_pd(theta * q);
  const __m256d vq = _mm256_set1_pd(q);
  const __m256d vomq = _mm256_set1_pd(1.0 - q);
  const __m256d vhalf = _mm256_set1_pd(0.5);
  const __m256d vthreshold = _mm256_set1_pd(threshold);
  const __m256d vzero = _mm256_setzero_pd();
  const std::size_t n = s.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(s.data() + i);
    const __m256d f = social_cost_x4(v, vtq, vq, vomq);
    const __m256d interior = _mm256_sub_pd(vhalf, _mm256_mul_pd(vhalf, f));
    // s <= s* selects the corner branch (realized cheating 0).
    const __m256d corner = _mm256_cmp_pd(v, vthreshold, _CMP_LE_OQ);
    const __m256d realized = _mm256_blendv_pd(interior, vzero, corner);
    _mm256_storeu_pd(out.data() + i, _mm256_sub_pd(realized, v));
  }
  for (; i < n; ++i) {
    out[i] = detail::realized_cheating(s[i], theta, q, threshold) - s[i];
  }
}

void proposer_payoff(std::span<const double> x, double s, double theta,
                     double q, std::span<double> out) {
  const double f = detail::social_cost(s, theta, q);
  const __m256d vf = _mm256_set1_pd(f);
  const __m256d vq = _mm256_set1_pd(q);
  const __m256d vomq = _mm256_set1_pd(1.0 - q);
  const __m256d vone = _mm256_set1_pd(1.0);
  const __m256d vzero = _mm256_setzero_pd();
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x.data() + i);
    // min(1, max(0, x - f)) with the scalar argument order, so NaN-free
    // inputs clamp identically.
    const __m256d cutoff =
        _mm256_min_pd(vone, _mm256_max_pd(vzero, _mm256_sub_pd(v, vf)));
    const __m256d cheat = _mm256_add_pd(_mm256_mul_pd(vomq, cutoff), vq);
    _mm256_storeu_pd(out.data() + i,
                     _mm256_mul_pd(_mm256_sub_pd(vone, cheat), v));
  }
  for (; i < n; ++i) out[i] = detail::proposer_payoff(x[i], s, theta, q);
}

}  // namespace trustdyn::kernels::avx2

#else

#include <stdexcept>

namespace trustdyn::kernels::avx2 {

namespace {
[[noreturn]] void unavailable() {
  throw std::runtime_error("AVX2 kernels were not compiled into this build");
}
}  // namespace

void social_cost(std::span<const double>, double, double, std::span<double>) {
  unavailable();
}
void fixed_point_residual(std::span<const double>, double, double,
                          std::span<double>) {
  unavailable();
}
void proposer_payoff(std::span<const double>, double, double, double,
                     std::span<double>) {
  unavailable();
}

}  // namespace trustdyn::kernels::avx2

#endif
