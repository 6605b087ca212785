#include "ksubset/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ksubset {

double cosine_distance(const std::vector<double>& u, const std::vector<double>& v) {
  if (u.size() != v.size()) throw std::invalid_argument("u,v: lengths must match");
  double uu = 0.0, vv = 0.0, uv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    uu += u[i] * u[i];
    vv += v[i] * v[i];
    uv += u[i] * v[i];
  }
  const double nu = std::sqrt(uu), nv = std::sqrt(vv);
  if (nu < 1e-12 || nv < 1e-12) return 1.0;
  return std::clamp(1.0 - uv / (nu * nv), 0.0, 2.0);
}

EstimatorReport compute_metrics(const std::vector<std::vector<double>>& estimates,
                                const std::vector<double>& exact) {
  const size_t count = estimates.size();
  if (count < 2) throw std::invalid_argument("estimates: need at least 2");
  const size_t n = exact.size();

  std::vector<double> mean(n, 0.0);
  for (const auto& g : estimates) {
    if (g.size() != n) throw std::invalid_argument("estimates: inconsistent lengths");
    for (size_t i = 0; i < n; ++i) mean[i] += g[i];
  }
  for (size_t i = 0; i < n; ++i) mean[i] /= static_cast<double>(count);

  EstimatorReport r;
  r.bias = cosine_distance(mean, exact);
  double err_sum = 0.0, err_sq = 0.0, var_sum = 0.0;
  for (const auto& g : estimates) {
    const double d = cosine_distance(g, exact);
    err_sum += d;
    err_sq += d * d;
    var_sum += cosine_distance(g, mean);
  }
  r.mean_error = err_sum / static_cast<double>(count);
  r.variance = var_sum / static_cast<double>(count);
  r.error_std = std::sqrt(std::max(0.0, err_sq / static_cast<double>(count) - r.mean_error * r.mean_error));
  return r;
}

}  // namespace ksubset
