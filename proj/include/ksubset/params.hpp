#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace ksubset {

// Binary selection vector z in {0,1}^n; samplers and MAP ops produce weight-k masks.
using SubsetMask = std::vector<int>;

// Logits theta for n independent Bernoullis p_i = sigmoid(theta_i), conditioned on
// sum_i z_i = k. Construction validates the invariants once so downstream code can
// assume them.
struct KSubsetParams {
  std::vector<double> theta;
  int k = 0;

  KSubsetParams(std::vector<double> t, int kk) : theta(std::move(t)), k(kk) {
    if (theta.empty()) throw std::invalid_argument("theta: must be non-empty");
    if (k < 0 || k > n())
      throw std::invalid_argument("k: must satisfy 0 <= k <= n, got k=" + std::to_string(k) +
                                  ", n=" + std::to_string(n()));
    for (double v : theta)
      if (!std::isfinite(v)) throw std::invalid_argument("theta: entries must be finite");
  }

  int n() const { return static_cast<int>(theta.size()); }
};

inline int mask_weight(const SubsetMask& z) {
  int w = 0;
  for (int b : z) w += (b != 0);
  return w;
}

inline std::vector<double> mask_to_real(const SubsetMask& z) {
  return std::vector<double>(z.begin(), z.end());
}

}  // namespace ksubset
