#pragma once

#include <cstddef>
#include <vector>

#include "trustdyn/model.hpp"

namespace trustdyn {

/// Brute-force rest points of the common-perception flow: evaluates
/// realized_cheating(s) - s on `points` uniformly spaced s in [0, 1] and
/// reports every exact zero and every sign change (at the cell midpoint).
/// Runs of consecutive zeros count once. Independent of the closed forms in
/// equilibria.hpp.
std::vector<double> scan_rest_points(const ModelParams& params,
                                     std::size_t points = 1'000'000);

}  // namespace trustdyn
