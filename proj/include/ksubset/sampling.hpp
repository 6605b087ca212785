#pragma once

#include <vector>

#include "ksubset/params.hpp"
#include "ksubset/rng.hpp"

namespace ksubset {

// Exact ancestral sampler: walk i = n..1 keeping the remaining budget j, take z_i = 1
// with probability exp(a[i-1][j-1] + log p_i - a[i][j]). Always returns weight k.
SubsetMask sample_exact(const KSubsetParams& params, RngStream& rng);

// Divide-and-conquer exact sampler: draw the left-half sum from the distribution
// proportional to PrLeft(m) * PrRight(k - m), recurse on both halves. Distributionally
// identical to sample_exact, not draw-for-draw identical.
SubsetMask sample_exact_dc(const KSubsetParams& params, RngStream& rng);

// i.i.d. standard Gumbel(0,1): -log(-log U) with U clamped to [1e-12, 1 - 1e-12]
std::vector<double> gumbel_noise(int n, RngStream& rng);

// Mask of the k largest entries of theta + noise; ties broken toward the lower index.
SubsetMask pam_topk(const KSubsetParams& params, const std::vector<double>& noise);

}  // namespace ksubset
