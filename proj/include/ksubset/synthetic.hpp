#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ksubset/metrics.hpp"

namespace ksubset {

struct EstimatorSpec {
  std::string name;      // simple | simple-f | simple-b | sfe | imle | softsub | st-gumbel | exact
  double lambda = 30.0;  // imle / simple-f finite-difference scale
  double t = 0.5;        // softsub / st-gumbel temperature
};

// The synthetic estimator study: quadratic loss ||z - b||^2 against ground-truth
// logits b ~ Normal(0, I), exact gradient by enumeration, per-estimator batches of
// single-sample estimates.
struct SyntheticConfig {
  int n = 10;
  int k = 5;
  long num_estimates = 10000;
  uint64_t master_seed = 0;
  std::vector<EstimatorSpec> estimators;
  bool random_theta = false;  // default evaluates at theta = 0
  uint64_t theta_seed = 0;
};

// Runs every configured estimator num_estimates times with per-trial derived seeds
// and reduces metrics in trial order, so reports are bit-identical for a given
// master_seed regardless of thread count. threads = 0 uses the machine default;
// threads = 1 is the serial reference path.
std::vector<EstimatorReport> run_synthetic(const SyntheticConfig& config, int threads = 0);

// Report serialization. CSV columns:
// estimator,n,k,samples,bias,variance,mean_error,error_std,wall_time_ms,master_seed
// with doubles printed as %.17g. JSON carries the same fields, one object per estimator.
std::string reports_to_csv(const std::vector<EstimatorReport>& reports, const SyntheticConfig& config);
std::string reports_to_json(const std::vector<EstimatorReport>& reports, const SyntheticConfig& config);

}  // namespace ksubset
