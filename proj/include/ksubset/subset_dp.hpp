#pragma once

#include <utility>
#include <vector>

#include "ksubset/params.hpp"

namespace ksubset {

// DP table over prefixes: a[i][j] = log Pr(z_1 + ... + z_i = j), 0 <= i <= n,
// 0 <= j <= k. Column j > i is -inf; entries beyond k are never needed.
struct PrefixTable {
  int n = 0, k = 0;
  std::vector<double> a;

  double at(int i, int j) const { return a[static_cast<size_t>(i) * (k + 1) + j]; }
  double& at(int i, int j) { return a[static_cast<size_t>(i) * (k + 1) + j]; }
};

PrefixTable prefix_table(const KSubsetParams& params);

// log Pr(sum = k) together with the table it came from (reused by samplers,
// marginals and entropy). O(nk), all log-domain.
std::pair<double, PrefixTable> pr_exactly_k(const KSubsetParams& params);

// Same quantity by divide and conquer: split the index range at its midpoint,
// compute each half's sum-distribution truncated at k, combine by log-domain
// convolution. Functionally equivalent to the DP; kept for equivalence testing.
double pr_exactly_k_dc(const KSubsetParams& params);

// Sum-distribution (log probs over sums 0..min(cap, hi-lo)) of variables [lo, hi);
// building block of pr_exactly_k_dc and the divide-and-conquer sampler.
std::vector<double> dc_sum_distribution(const std::vector<double>& theta, int lo, int hi, int cap);

}  // namespace ksubset
