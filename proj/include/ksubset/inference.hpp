#pragma once

#include <utility>
#include <vector>

#include "ksubset/params.hpp"
#include "ksubset/subset_dp.hpp"

namespace ksubset {

// mu_i = Pr(z_i = 1 | sum = k)
using Marginals = std::vector<double>;

struct SquareMatrix {
  int n = 0;
  std::vector<double> v;

  explicit SquareMatrix(int nn = 0) : n(nn), v(static_cast<size_t>(nn) * nn, 0.0) {}
  double at(int p, int q) const { return v[static_cast<size_t>(p) * n + q]; }
  double& at(int p, int q) { return v[static_cast<size_t>(p) * n + q]; }
};

// entry (p,q) = d mu_p / d theta_q = Pr(z_p=1, z_q=1 | k) - mu_p mu_q
using CovJacobian = SquareMatrix;

// Forward prefix table + backward suffix table; O(nk) total.
Marginals conditional_marginals(const KSubsetParams& params);

// Entry (p,q), p != q: Pr(z_p=1, z_q=1 | sum=k); diagonal mu_p. Computed by clamping
// variable p to 1 (drop it, decrement k, rescale by mu_p), O(n^2 k) total. The row
// loop is independent per p: the default entry point parallelizes it with OpenMP,
// the _serial variant is the plain-loop reference used for equivalence tests.
SquareMatrix pairwise_marginals(const KSubsetParams& params);
SquareMatrix pairwise_marginals_serial(const KSubsetParams& params);

CovJacobian marginal_jacobian(const KSubsetParams& params);
CovJacobian marginal_jacobian_serial(const KSubsetParams& params);

// marginal_jacobian(params) * v (materializes the matrix; fine at desk scale)
std::vector<double> jacobian_vector_product(const KSubsetParams& params, const std::vector<double>& v);

// Entropy (nats) of the conditioned distribution, via the chain-rule recursion over
// prefix-sum states E[i][j] = H_b(q) + q E[i-1][j-1] + (1-q) E[i-1][j] with
// q = Pr(z_i=1 | prefix sum j).
double entropy(const KSubsetParams& params);

// log C(n,k) - entropy; clamped nonnegative.
double kl_to_uniform(const KSubsetParams& params);

// log p(z | sum = k); rejects masks whose weight is not k.
double log_prob(const KSubsetParams& params, const SubsetMask& z);

// grad_theta log p(z | sum=k) = z - mu (exponential-family score)
std::vector<double> score(const KSubsetParams& params, const SubsetMask& z);

// All C(n,k) weight-k masks with exact probabilities; the oracle for property tests
// and the exact gradient. Guarded to C(n,k) <= 1e6.
std::vector<std::pair<SubsetMask, double>> enumerate_distribution(const KSubsetParams& params);

// log C(n,k) via lgamma (no factorial overflow)
double log_binomial(int n, int k);

}  // namespace ksubset
