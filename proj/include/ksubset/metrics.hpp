#pragma once

#include <string>
#include <vector>

namespace ksubset {

// Per-estimator summary over a batch of single-sample gradient estimates, all in
// cosine-distance units (range [0, 2]).
struct EstimatorReport {
  std::string estimator;
  double bias = 0.0;        // distance(mean estimate, exact)
  double variance = 0.0;    // mean distance(estimate, mean estimate)
  double mean_error = 0.0;  // mean distance(estimate, exact)
  double error_std = 0.0;   // std deviation of the per-sample distances
  double wall_time_ms = 0.0;
};

// 1 - cosine similarity; returns 1 by convention when either norm < 1e-12.
double cosine_distance(const std::vector<double>& u, const std::vector<double>& v);

// Metrics over >= 2 estimates against the exact gradient. error_std is the
// population standard deviation of the per-sample distances.
EstimatorReport compute_metrics(const std::vector<std::vector<double>>& estimates,
                                const std::vector<double>& exact);

}  // namespace ksubset
