#include "ksubset/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ksubset/logdomain.hpp"

namespace ksubset {

namespace {

// suffix[i][j] = log Pr(z_{i+1} + ... + z_n = j), 0 <= i <= n, 0 <= j <= k
std::vector<double> suffix_table(const KSubsetParams& params) {
  const int n = params.n(), k = params.k;
  std::vector<double> s(static_cast<size_t>(n + 1) * (k + 1), kNegInf);
  auto at = [&](int i, int j) -> double& { return s[static_cast<size_t>(i) * (k + 1) + j]; };
  at(n, 0) = 0.0;
  for (int i = n - 1; i >= 0; --i) {
    const double lp = log_sigmoid(params.theta[i]);
    const double lq = log_sigmoid(-params.theta[i]);
    const int jmax = std::min(n - i, k);
    for (int j = 0; j <= jmax; ++j) {
      double v = at(i + 1, j) + lq;
      if (j > 0) v = log_add(v, at(i + 1, j - 1) + lp);
      at(i, j) = v;
    }
  }
  return s;
}

double binary_entropy(double q) {
  if (q <= 0.0 || q >= 1.0) return 0.0;
  return -q * std::log(q) - (1.0 - q) * std::log(1.0 - q);
}

}  // namespace

Marginals conditional_marginals(const KSubsetParams& params) {
  const int n = params.n(), k = params.k;
  if (k == 0) return Marginals(n, 0.0);
  if (k == n) return Marginals(n, 1.0);
  const PrefixTable fwd = prefix_table(params);
  const std::vector<double> suf = suffix_table(params);
  const double logz = fwd.at(n, k);
  auto suffix_at = [&](int i, int j) { return suf[static_cast<size_t>(i) * (k + 1) + j]; };

  Marginals mu(n);
  for (int i = 1; i <= n; ++i) {
    const double lp = log_sigmoid(params.theta[i - 1]);
    // Pr(z_i = 1, sum = k) = sum_j Pr(prefix i-1 sums to j) p_i Pr(suffix sums to k-j-1)
    double acc = kNegInf;
    const int jmax = std::min(i - 1, k - 1);
    for (int j = 0; j <= jmax; ++j) {
      const double a = fwd.at(i - 1, j);
      const double b = suffix_at(i, k - j - 1);
      if (a == kNegInf || b == kNegInf) continue;
      acc = log_add(acc, a + lp + b);
    }
    mu[i - 1] = std::clamp(std::exp(acc - logz), 0.0, 1.0);
  }
  return mu;
}

namespace {

// one row of the pairwise table: Pr(z_p=1, z_q=1 | k) for all q, via clamping z_p = 1
std::vector<double> pairwise_row(const KSubsetParams& params, const Marginals& mu, int p) {
  const int n = params.n();
  std::vector<double> row(n, 0.0);
  row[p] = mu[p];
  if (params.k < 1) return row;
  if (params.k == 1) return row;  // two ones are impossible
  std::vector<double> sub_theta;
  sub_theta.reserve(n - 1);
  for (int q = 0; q < n; ++q)
    if (q != p) sub_theta.push_back(params.theta[q]);
  const Marginals sub_mu = conditional_marginals(KSubsetParams(std::move(sub_theta), params.k - 1));
  for (int q = 0, s = 0; q < n; ++q) {
    if (q == p) continue;
    row[q] = mu[p] * sub_mu[s++];
  }
  return row;
}

SquareMatrix pairwise_from_rows(const KSubsetParams& params, bool parallel) {
  const int n = params.n();
  const Marginals mu = conditional_marginals(params);
  SquareMatrix table(n);
  // Each row is independent; fill the upper triangle from row p and mirror so the
  // result is exactly symmetric no matter how the rows are scheduled.
  std::vector<std::vector<double>> rows(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int p = 0; p < n; ++p) rows[p] = pairwise_row(params, mu, p);
  (void)parallel;
  for (int p = 0; p < n; ++p) {
    table.at(p, p) = rows[p][p];
    for (int q = p + 1; q < n; ++q) {
      table.at(p, q) = rows[p][q];
      table.at(q, p) = rows[p][q];
    }
  }
  return table;
}

}  // namespace

SquareMatrix pairwise_marginals(const KSubsetParams& params) { return pairwise_from_rows(params, true); }

SquareMatrix pairwise_marginals_serial(const KSubsetParams& params) {
  return pairwise_from_rows(params, false);
}

namespace {

CovJacobian jacobian_from_pairwise(const KSubsetParams& params, const SquareMatrix& pair) {
  const int n = params.n();
  const Marginals mu = conditional_marginals(params);
  CovJacobian j(n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      j.at(p, q) = (p == q) ? mu[p] * (1.0 - mu[p]) : pair.at(p, q) - mu[p] * mu[q];
  return j;
}

}  // namespace

CovJacobian marginal_jacobian(const KSubsetParams& params) {
  return jacobian_from_pairwise(params, pairwise_marginals(params));
}

CovJacobian marginal_jacobian_serial(const KSubsetParams& params) {
  return jacobian_from_pairwise(params, pairwise_marginals_serial(params));
}

std::vector<double> jacobian_vector_product(const KSubsetParams& params, const std::vector<double>& v) {
  const int n = params.n();
  if (static_cast<int>(v.size()) != n) throw std::invalid_argument("v: length must equal n");
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument("v: entries must be finite");
  const CovJacobian j = marginal_jacobian(params);
  std::vector<double> out(n, 0.0);
  for (int p = 0; p < n; ++p) {
    double acc = 0.0;
    for (int q = 0; q < n; ++q) acc += j.at(p, q) * v[q];
    out[p] = acc;
  }
  return out;
}

double entropy(const KSubsetParams& params) {
  const int n = params.n(), k = params.k;
  if (k == 0 || k == n) return 0.0;
  const PrefixTable t = prefix_table(params);
  std::vector<double> e(static_cast<size_t>(n + 1) * (k + 1), 0.0);
  auto eat = [&](int i, int j) -> double& { return e[static_cast<size_t>(i) * (k + 1) + j]; };
  for (int i = 1; i <= n; ++i) {
    const double lp = log_sigmoid(params.theta[i - 1]);
    const int jmax = std::min(i, k);
    for (int j = 0; j <= jmax; ++j) {
      if (t.at(i, j) == kNegInf) continue;
      double q = 0.0;
      if (j > 0 && t.at(i - 1, j - 1) != kNegInf)
        q = std::clamp(std::exp(t.at(i - 1, j - 1) + lp - t.at(i, j)), 0.0, 1.0);
      const double down = (j > 0) ? eat(i - 1, j - 1) : 0.0;
      eat(i, j) = binary_entropy(q) + q * down + (1.0 - q) * eat(i - 1, j);
    }
  }
  return eat(n, k);
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) throw std::invalid_argument("k: must satisfy 0 <= k <= n");
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double kl_to_uniform(const KSubsetParams& params) {
  return std::max(0.0, log_binomial(params.n(), params.k) - entropy(params));
}

double log_prob(const KSubsetParams& params, const SubsetMask& z) {
  const int n = params.n();
  if (static_cast<int>(z.size()) != n) throw std::invalid_argument("z: length must equal n");
  if (mask_weight(z) != params.k)
    throw std::invalid_argument("z: Hamming weight must equal k=" + std::to_string(params.k));
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    acc += z[i] ? log_sigmoid(params.theta[i]) : log_sigmoid(-params.theta[i]);
  return acc - pr_exactly_k(params).first;
}

std::vector<double> score(const KSubsetParams& params, const SubsetMask& z) {
  const int n = params.n();
  if (static_cast<int>(z.size()) != n) throw std::invalid_argument("z: length must equal n");
  if (mask_weight(z) != params.k)
    throw std::invalid_argument("z: Hamming weight must equal k=" + std::to_string(params.k));
  const Marginals mu = conditional_marginals(params);
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = static_cast<double>(z[i]) - mu[i];
  return s;
}

std::vector<std::pair<SubsetMask, double>> enumerate_distribution(const KSubsetParams& params) {
  const int n = params.n(), k = params.k;
  if (log_binomial(n, k) > std::log(1e6) + 1e-9)
    throw std::invalid_argument("n,k: C(n,k) exceeds the enumeration limit of 1e6");

  const double logz = pr_exactly_k(params).first;
  std::vector<double> lp(n), lq(n);
  for (int i = 0; i < n; ++i) {
    lp[i] = log_sigmoid(params.theta[i]);
    lq[i] = log_sigmoid(-params.theta[i]);
  }

  std::vector<std::pair<SubsetMask, double>> out;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    SubsetMask z(n, 0);
    double acc = -logz;
    for (int i : idx) z[i] = 1;
    for (int i = 0; i < n; ++i) acc += z[i] ? lp[i] : lq[i];
    out.emplace_back(std::move(z), std::exp(acc));
    if (k == 0) break;
    // advance to the next k-combination in lexicographic order
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int t = pos + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
  }
  return out;
}

}  // namespace ksubset
