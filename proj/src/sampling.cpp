#include "ksubset/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ksubset/logdomain.hpp"
#include "ksubset/subset_dp.hpp"

namespace ksubset {

SubsetMask sample_exact(const KSubsetParams& params, RngStream& rng) {
  const int n = params.n(), k = params.k;
  const PrefixTable t = prefix_table(params);
  SubsetMask z(n, 0);
  int j = k;
  for (int i = n; i >= 1 && j > 0; --i) {
    // Pr(z_i = 1 | remaining budget j over first i vars); forced branches come out
    // exactly 0 or 1 because log_add returns the finite operand untouched.
    double q = 0.0;
    if (t.at(i - 1, j - 1) != kNegInf)
      q = std::exp(t.at(i - 1, j - 1) + log_sigmoid(params.theta[i - 1]) - t.at(i, j));
    if (rng.uniform01() < q) {
      z[i - 1] = 1;
      --j;
    }
  }
  return z;
}

namespace {

void dc_sample_range(const std::vector<double>& theta, int lo, int hi, int k, RngStream& rng,
                     SubsetMask& z) {
  if (k == 0) return;
  const int len = hi - lo;
  if (len == 1) {
    z[lo] = 1;  // k == 1 here by construction
    return;
  }
  const int mid = lo + len / 2;
  const std::vector<double> left = dc_sum_distribution(theta, lo, mid, k);
  const std::vector<double> right = dc_sum_distribution(theta, mid, hi, k);
  const int mlo = std::max(0, k - static_cast<int>(right.size()) + 1);
  const int mhi = std::min(k, static_cast<int>(left.size()) - 1);

  double tot = kNegInf;
  for (int m = mlo; m <= mhi; ++m) tot = log_add(tot, left[m] + right[k - m]);

  const double u = rng.uniform01();
  double cum = 0.0;
  int pick = mhi;
  for (int m = mlo; m <= mhi; ++m) {
    cum += std::exp(left[m] + right[k - m] - tot);
    if (u < cum) {
      pick = m;
      break;
    }
  }
  dc_sample_range(theta, lo, mid, pick, rng, z);
  dc_sample_range(theta, mid, hi, k - pick, rng, z);
}

}  // namespace

SubsetMask sample_exact_dc(const KSubsetParams& params, RngStream& rng) {
  SubsetMask z(params.n(), 0);
  dc_sample_range(params.theta, 0, params.n(), params.k, rng, z);
  return z;
}

std::vector<double> gumbel_noise(int n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("n: must be >= 1");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    const double u = std::clamp(rng.uniform01(), 1e-12, 1.0 - 1e-12);
    g[i] = -std::log(-std::log(u));
  }
  return g;
}

SubsetMask pam_topk(const KSubsetParams& params, const std::vector<double>& noise) {
  const int n = params.n();
  if (static_cast<int>(noise.size()) != n) throw std::invalid_argument("noise: length must equal n");
  for (double x : noise)
    if (!std::isfinite(x)) throw std::invalid_argument("noise: entries must be finite");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  // stable sort on descending perturbed logit keeps ties in ascending-index order
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return params.theta[a] + noise[a] > params.theta[b] + noise[b];
  });
  SubsetMask z(n, 0);
  for (int i = 0; i < params.k; ++i) z[idx[i]] = 1;
  return z;
}

}  // namespace ksubset
