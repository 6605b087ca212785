#include "ksubset/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ksubset/inference.hpp"
#include "ksubset/sampling.hpp"

namespace ksubset {

namespace {

std::vector<double> softmax_over_t(const std::vector<double>& x, double t) {
  const int n = static_cast<int>(x.size());
  double hi = x[0];
  for (double v : x) hi = std::max(hi, v);
  std::vector<double> s(n);
  double tot = 0.0;
  for (int i = 0; i < n; ++i) {
    s[i] = std::exp((x[i] - hi) / t);
    tot += s[i];
  }
  for (int i = 0; i < n; ++i) s[i] /= tot;
  return s;
}

}  // namespace

GradientEstimate exact_gradient(const KSubsetParams& params, const LossOracle& loss) {
  const int n = params.n();
  const auto states = enumerate_distribution(params);
  const Marginals mu = conditional_marginals(params);
  std::vector<double> g(n, 0.0);
  for (const auto& [z, p] : states) {
    const double l = loss.value(z);
    for (int i = 0; i < n; ++i) g[i] += p * l * (static_cast<double>(z[i]) - mu[i]);
  }
  return {std::move(g), static_cast<long>(states.size())};
}

GradientEstimate estimate_simple(const KSubsetParams& params, const LossOracle& loss, RngStream& rng,
                                 SimpleForward forward, SimpleBackward backward, double lambda) {
  const int n = params.n();
  SubsetMask z;
  if (forward == SimpleForward::exact) {
    z = sample_exact(params, rng);
  } else {
    const std::vector<double> eps = gumbel_noise(n, rng);
    z = pam_topk(params, eps);
  }
  const std::vector<double> gz = loss.grad(mask_to_real(z));

  if (backward == SimpleBackward::jacobian)
    return {jacobian_vector_product(params, gz), 1};

  // finite difference of two exact samples lambda apart along the loss gradient
  if (lambda <= 0.0) throw std::invalid_argument("lambda: must be positive");
  std::vector<double> shifted(params.theta);
  for (int i = 0; i < n; ++i) shifted[i] -= lambda * gz[i];
  const SubsetMask zt = sample_exact(KSubsetParams(std::move(shifted), params.k), rng);
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = (static_cast<double>(z[i]) - zt[i]) / lambda;
  return {std::move(g), 2};
}

GradientEstimate estimate_sfe(const KSubsetParams& params, const LossOracle& loss, RngStream& rng,
                              double baseline) {
  const SubsetMask z = sample_exact(params, rng);
  const double l = loss.value(z) - baseline;
  std::vector<double> g = score(params, z);
  for (double& v : g) v *= l;
  return {std::move(g), 1};
}

GradientEstimate estimate_imle(const KSubsetParams& params, const LossOracle& loss, RngStream& rng,
                               double lambda) {
  if (lambda <= 0.0) throw std::invalid_argument("lambda: must be positive");
  const int n = params.n();
  const std::vector<double> eps = gumbel_noise(n, rng);
  const SubsetMask zhat = pam_topk(params, eps);
  const std::vector<double> gz = loss.grad(mask_to_real(zhat));
  std::vector<double> shifted(params.theta);
  for (int i = 0; i < n; ++i) shifted[i] -= lambda * gz[i];
  const SubsetMask ztilde = pam_topk(KSubsetParams(std::move(shifted), params.k), eps);
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = (static_cast<double>(zhat[i]) - ztilde[i]) / lambda;
  return {std::move(g), 1};
}

std::vector<double> softsub_relaxed(const std::vector<double>& theta, int k,
                                    const std::vector<double>& noise, double t) {
  const int n = static_cast<int>(theta.size());
  std::vector<double> kappa(n);
  for (int i = 0; i < n; ++i) kappa[i] = theta[i] + noise[i];
  std::vector<double> y(n, 0.0);
  for (int round = 0; round < k; ++round) {
    const std::vector<double> s = softmax_over_t(kappa, t);
    for (int i = 0; i < n; ++i) {
      y[i] += s[i];
      // remove the selected mass from the pool; a fully-consumed coordinate is
      // frozen at a large negative value instead of -inf
      kappa[i] = (s[i] > 1.0 - 1e-12) ? -1e9 : kappa[i] + std::log1p(-s[i]);
    }
  }
  return y;
}

GradientEstimate estimate_softsub(const KSubsetParams& params, const LossOracle& loss, RngStream& rng,
                                  double t) {
  if (t <= 0.0) throw std::invalid_argument("t: must be positive");
  const int n = params.n(), k = params.k;
  const std::vector<double> noise = gumbel_noise(n, rng);
  const std::vector<double> y = softsub_relaxed(params.theta, k, noise, t);
  const std::vector<double> gy = loss.grad(y);

  // directional (dual-number) pass through the relaxation recurrence: returns dy for
  // a unit perturbation of theta[dir], with the noise held fixed
  auto directional = [&](int dir) {
    std::vector<double> kappa(n), dkappa(n, 0.0), dy(n, 0.0);
    for (int i = 0; i < n; ++i) kappa[i] = params.theta[i] + noise[i];
    dkappa[dir] = 1.0;
    for (int round = 0; round < k; ++round) {
      const std::vector<double> s = softmax_over_t(kappa, t);
      double sdot = 0.0;
      for (int i = 0; i < n; ++i) sdot += s[i] * dkappa[i];
      for (int i = 0; i < n; ++i) {
        const double ds = s[i] * (dkappa[i] - sdot) / t;
        dy[i] += ds;
        if (s[i] > 1.0 - 1e-12) {
          kappa[i] = -1e9;  // frozen: the clamped branch is constant
          dkappa[i] = 0.0;
        } else {
          kappa[i] += std::log1p(-s[i]);
          dkappa[i] -= ds / (1.0 - s[i]);
        }
      }
    }
    return dy;
  };

  std::vector<double> g(n, 0.0);
  for (int dir = 0; dir < n; ++dir) {
    const std::vector<double> dy = directional(dir);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += gy[i] * dy[i];
    g[dir] = acc;
  }
  return {std::move(g), 1};
}

GradientEstimate st_gumbel_with_noise(const KSubsetParams& params, const LossOracle& loss,
                                      const std::vector<double>& noise, double t) {
  if (params.k != 1) throw std::invalid_argument("k: straight-through Gumbel-Softmax requires k = 1");
  if (t <= 0.0) throw std::invalid_argument("t: must be positive");
  const int n = params.n();
  const SubsetMask z = pam_topk(params, noise);
  std::vector<double> perturbed(n);
  for (int i = 0; i < n; ++i) perturbed[i] = params.theta[i] + noise[i];
  const std::vector<double> y = softmax_over_t(perturbed, t);
  const std::vector<double> gz = loss.grad(mask_to_real(z));
  // (diag(y) - y y^T) / t applied to gz (symmetric, so rows and columns agree)
  double ydot = 0.0;
  for (int i = 0; i < n; ++i) ydot += y[i] * gz[i];
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = y[i] * (gz[i] - ydot) / t;
  return {std::move(g), 1};
}

GradientEstimate estimate_st_gumbel(const KSubsetParams& params, const LossOracle& loss, RngStream& rng,
                                    double t) {
  return st_gumbel_with_noise(params, loss, gumbel_noise(params.n(), rng), t);
}

GradientEstimate estimate_by_name(const std::string& name, const KSubsetParams& params,
                                  const LossOracle& loss, RngStream& rng, double lambda, double t) {
  if (name == "simple")
    return estimate_simple(params, loss, rng, SimpleForward::exact, SimpleBackward::jacobian);
  if (name == "simple-f")
    return estimate_simple(params, loss, rng, SimpleForward::exact, SimpleBackward::pam_fd, lambda);
  if (name == "simple-b")
    return estimate_simple(params, loss, rng, SimpleForward::pam, SimpleBackward::jacobian);
  if (name == "sfe") return estimate_sfe(params, loss, rng);
  if (name == "imle") return estimate_imle(params, loss, rng, lambda);
  if (name == "softsub") return estimate_softsub(params, loss, rng, t);
  if (name == "st-gumbel") return estimate_st_gumbel(params, loss, rng, t);
  if (name == "exact") return exact_gradient(params, loss);
  throw std::invalid_argument("estimator: unknown name '" + name + "'");
}

}  // namespace ksubset
