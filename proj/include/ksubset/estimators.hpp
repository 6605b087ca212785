#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ksubset/params.hpp"
#include "ksubset/rng.hpp"

namespace ksubset {

// Downstream loss: value at a binary sample, gradient treating the sample as a real
// vector (so relaxed estimators can query it at fractional points). Must be
// deterministic in its argument.
struct LossOracle {
  std::function<double(const SubsetMask&)> value;
  std::function<std::vector<double>(const std::vector<double>&)> grad;
};

struct GradientEstimate {
  std::vector<double> g;
  long samples_used = 1;
};

enum class SimpleForward { exact, pam };
enum class SimpleBackward { jacobian, pam_fd };

// Enumeration of the score-function identity: sum_z p(z|k) loss(z) (z - mu).
// Deterministic; guarded by the enumeration limit.
GradientEstimate exact_gradient(const KSubsetParams& params, const LossOracle& loss);

// Exact sample (or perturb-and-MAP) forward; Jacobian-vector product (or the
// finite-difference of two maps, lambda apart along the loss gradient) backward.
GradientEstimate estimate_simple(const KSubsetParams& params, const LossOracle& loss, RngStream& rng,
                                 SimpleForward forward = SimpleForward::exact,
                                 SimpleBackward backward = SimpleBackward::jacobian,
                                 double lambda = 30.0);

// Score-function (REINFORCE) estimator loss(z) * (z - mu); optional constant baseline.
GradientEstimate estimate_sfe(const KSubsetParams& params, const LossOracle& loss, RngStream& rng,
                              double baseline = 0.0);

// Perturb-and-MAP finite difference: zhat = topk(theta + eps),
// ztilde = topk(theta - lambda * grad + eps) with the same eps; (zhat - ztilde) / lambda.
GradientEstimate estimate_imle(const KSubsetParams& params, const LossOracle& loss, RngStream& rng,
                               double lambda = 30.0);

// Relaxed k-subset sample (k successive temperature-t softmax rounds on Gumbel-perturbed
// logits); gradient of loss at the relaxed point by n forward dual-number passes.
GradientEstimate estimate_softsub(const KSubsetParams& params, const LossOracle& loss, RngStream& rng,
                                  double t = 0.5);

// Straight-through Gumbel-Softmax, k = 1 only: hard argmax forward, softmax Jacobian
// at the perturbed logits backward.
GradientEstimate estimate_st_gumbel(const KSubsetParams& params, const LossOracle& loss, RngStream& rng,
                                    double t = 1.0);

// The relaxed forward pass of estimate_softsub with explicit noise (exposed for tests:
// nonnegative entries summing to k, collapses to the hard top-k as t -> 0).
std::vector<double> softsub_relaxed(const std::vector<double>& theta, int k,
                                    const std::vector<double>& noise, double t);

// estimate_st_gumbel with explicit noise (exposed for tests).
GradientEstimate st_gumbel_with_noise(const KSubsetParams& params, const LossOracle& loss,
                                      const std::vector<double>& noise, double t);

// Name-based dispatch used by the benchmark harness and the CLI: one of
// simple, simple-f, simple-b, sfe, imle, softsub, st-gumbel, exact.
GradientEstimate estimate_by_name(const std::string& name, const KSubsetParams& params,
                                  const LossOracle& loss, RngStream& rng, double lambda = 30.0,
                                  double t = 0.5);

}  // namespace ksubset
