#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ksubset/params.hpp"

namespace ksubset {

// Planted-support linear regression: m rows drawn from an equicorrelated Gaussian
// (unit diagonal, off-diagonal rho), columns standardized to zero mean and unit norm,
// y = Phi_S* w* + Normal(0, sigma^2) built from the standardized columns.
struct SparseRegressionProblem {
  Eigen::MatrixXd phi;       // m x n
  Eigen::VectorXd y;         // m
  std::vector<int> support;  // planted k-subset, sorted
  double sigma = 0.0;
  double rho = 0.0;
};

struct LeastSquaresFit {
  Eigen::VectorXd w;
  double rmse = 0.0;
};

struct SparseTraceRow {
  int step = 0;
  double rmse = 0.0;         // loss at the point the estimator queried this step
  double map_overlap = 0.0;  // |top-k(theta) ∩ S*| / k after the update
};

struct SparseRegressionResult {
  SubsetMask map_subset;
  double final_rmse = 0.0;
  std::vector<SparseTraceRow> trace;
};

SparseRegressionProblem generate_sparse_problem(int n, int k, int m, double sigma, double rho,
                                                uint64_t seed);

// Minimum-norm least squares via a rank-revealing orthogonal decomposition; rmse is
// ||y - phi_sub w|| / sqrt(m).
LeastSquaresFit least_squares(const Eigen::MatrixXd& phi_sub, const Eigen::VectorXd& y);

// Plain gradient descent on the subset logits: theta starts at zero, each step draws
// z from the chosen estimator's forward pass and applies its gradient estimate of the
// selection rmse; the reported subset is the MAP (top-k logits) at the end.
SparseRegressionResult run_sparse_regression(const SparseRegressionProblem& problem, int k, int steps,
                                             double lr, const std::string& estimator, uint64_t seed);

// Trace serialization: step,rmse,map_overlap_with_planted with %.17g doubles.
std::string sparse_trace_to_csv(const std::vector<SparseTraceRow>& trace);

}  // namespace ksubset
