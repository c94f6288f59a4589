#pragma once

// Batch evaluation of the model's pointwise functions over grids.
//
// Each kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant selected at runtime. The variants perform the same IEEE operations
// in the same order (no FMA contraction), so their outputs are bit-identical;
// tests/test_kernels.cpp holds them to that.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "trustdyn/model.hpp"

namespace trustdyn::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend backend);

/// True when the AVX2 variant is compiled in and the CPU supports it.
bool avx2_available();

/// Backend used by the dispatching entry points. Defaults to the best
/// available one; TRUSTDYN_SIMD=scalar in the environment forces scalar.
Backend active_backend();

/// Overrides the dispatch choice (tests, benchmarking). Requesting Avx2 when
/// it is unavailable throws std::runtime_error.
void set_backend(Backend backend);

// out[i] = f(s[i]).
void social_cost(std::span<const double> s, const ModelParams& params,
                 std::span<double> out);

// out[i] = realized_cheating(s[i]) - s[i]; zero exactly at rest points of the
// common-perception flow.
void fixed_point_residual(std::span<const double> s, const ModelParams& params,
                          std::span<double> out);

// out[i] = proposer_payoff(x[i], s).
void proposer_payoff(std::span<const double> x, double s,
                     const ModelParams& params, std::span<double> out);

// Inputs are not range-checked in the per-backend entry points below.
namespace scalar {
void social_cost(std::span<const double> s, double theta, double q,
                 std::span<double> out);
void fixed_point_residual(std::span<const double> s, double theta, double q,
                          std::span<double> out);
void proposer_payoff(std::span<const double> x, double s, double theta,
                     double q, std::span<double> out);
}  // namespace scalar

namespace avx2 {
void social_cost(std::span<const double> s, double theta, double q,
                 std::span<double> out);
void fixed_point_residual(std::span<const double> s, double theta, double q,
                          std::span<double> out);
void proposer_payoff(std::span<const double> x, double s, double theta,
                     double q, std::span<double> out);
}  // namespace avx2

/// Uniform grid lo + i (hi - lo) / (n - 1), i = 0..n-1, endpoints exact.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace trustdyn::kernels
