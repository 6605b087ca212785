#include "ksubset/subset_dp.hpp"

#include <algorithm>

#include "ksubset/logdomain.hpp"

namespace ksubset {

PrefixTable prefix_table(const KSubsetParams& params) {
  const int n = params.n(), k = params.k;
  PrefixTable t{n, k, std::vector<double>(static_cast<size_t>(n + 1) * (k + 1), kNegInf)};
  t.at(0, 0) = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double lp = log_sigmoid(params.theta[i - 1]);
    const double lq = log_sigmoid(-params.theta[i - 1]);
    const int jmax = std::min(i, k);
    for (int j = 0; j <= jmax; ++j) {
      double v = t.at(i - 1, j) + lq;
      if (j > 0) v = log_add(v, t.at(i - 1, j - 1) + lp);
      t.at(i, j) = v;
    }
  }
  return t;
}

std::pair<double, PrefixTable> pr_exactly_k(const KSubsetParams& params) {
  PrefixTable t = prefix_table(params);
  const double lp = t.at(params.n(), params.k);
  return {lp, std::move(t)};
}

std::vector<double> dc_sum_distribution(const std::vector<double>& theta, int lo, int hi, int cap) {
  const int len = hi - lo;
  const int c = std::min(cap, len);
  if (len == 1) {
    std::vector<double> d(static_cast<size_t>(c) + 1, kNegInf);
    d[0] = log_sigmoid(-theta[lo]);
    if (c >= 1) d[1] = log_sigmoid(theta[lo]);
    return d;
  }
  const int mid = lo + len / 2;
  const std::vector<double> left = dc_sum_distribution(theta, lo, mid, c);
  const std::vector<double> right = dc_sum_distribution(theta, mid, hi, c);
  std::vector<double> out(static_cast<size_t>(c) + 1, kNegInf);
  for (int s = 0; s <= c; ++s) {
    double acc = kNegInf;
    const int mlo = std::max(0, s - static_cast<int>(right.size()) + 1);
    const int mhi = std::min(s, static_cast<int>(left.size()) - 1);
    for (int m = mlo; m <= mhi; ++m) acc = log_add(acc, left[m] + right[s - m]);
    out[s] = acc;
  }
  return out;
}

double pr_exactly_k_dc(const KSubsetParams& params) {
  return dc_sum_distribution(params.theta, 0, params.n(), params.k)[params.k];
}

}  // namespace ksubset
