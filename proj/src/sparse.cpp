#include "ksubset/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "ksubset/estimators.hpp"
#include "ksubset/inference.hpp"
#include "ksubset/rng.hpp"
#include "ksubset/sampling.hpp"

namespace ksubset {

SparseRegressionProblem generate_sparse_problem(int n, int k, int m, double sigma, double rho,
                                                uint64_t seed) {
  if (!(m > n && n >= k && k >= 1)) throw std::invalid_argument("n,k,m: need m > n >= k >= 1");
  if (rho < 0.0 || rho >= 1.0) throw std::invalid_argument("rho: need 0 <= rho < 1");
  if (sigma < 0.0) throw std::invalid_argument("sigma: must be nonnegative");

  RngStream rng(seed);
  // rows ~ Normal(0, (1-rho) I + rho 11^T) via a shared factor plus independent noise
  Eigen::VectorXd shared(m);
  for (int r = 0; r < m; ++r) shared(r) = rng.normal();
  Eigen::MatrixXd phi(m, n);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) phi(r, c) = std::sqrt(rho) * shared(r) + std::sqrt(1.0 - rho) * rng.normal();

  // standardize: center each column, then scale to unit norm
  for (int c = 0; c < n; ++c) {
    phi.col(c).array() -= phi.col(c).mean();
    phi.col(c) /= phi.col(c).norm();
  }

  // planted support: partial Fisher-Yates over the index range
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i)
    std::swap(idx[i], idx[i + static_cast<int>(rng.next_u64() % static_cast<uint64_t>(n - i))]);
  std::vector<int> support(idx.begin(), idx.begin() + k);
  std::sort(support.begin(), support.end());

  // true weights: random sign times Uniform(0.5, 1.5)
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < k; ++i) {
    const double sign = (rng.next_u64() & 1ull) ? 1.0 : -1.0;
    const double mag = 0.5 + rng.uniform01();
    y += phi.col(support[i]) * (sign * mag);
  }
  for (int r = 0; r < m; ++r) y(r) += sigma * rng.normal();

  return {std::move(phi), std::move(y), std::move(support), sigma, rho};
}

LeastSquaresFit least_squares(const Eigen::MatrixXd& phi_sub, const Eigen::VectorXd& y) {
  if (phi_sub.rows() != y.size()) throw std::invalid_argument("phi_sub,y: row counts must match");
  const double scale = std::sqrt(static_cast<double>(y.size()));
  if (phi_sub.cols() == 0) return {Eigen::VectorXd(0), y.norm() / scale};
  if (phi_sub.rows() < phi_sub.cols()) throw std::invalid_argument("phi_sub: need rows >= cols");
  Eigen::VectorXd w = phi_sub.completeOrthogonalDecomposition().solve(y);
  const double rmse = (y - phi_sub * w).norm() / scale;
  return {std::move(w), rmse};
}

namespace {

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& phi, const std::vector<int>& cols) {
  Eigen::MatrixXd sub(phi.rows(), static_cast<Eigen::Index>(cols.size()));
  for (size_t i = 0; i < cols.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = phi.col(cols[i]);
  return sub;
}

std::vector<int> selected_indices(const std::vector<double>& z) {
  std::vector<int> sel;
  for (size_t i = 0; i < z.size(); ++i)
    if (z[i] > 0.5) sel.push_back(static_cast<int>(i));
  return sel;
}

}  // namespace

SparseRegressionResult run_sparse_regression(const SparseRegressionProblem& problem, int k, int steps,
                                             double lr, const std::string& estimator, uint64_t seed) {
  if (steps < 1) throw std::invalid_argument("steps: must be >= 1");
  const int n = static_cast<int>(problem.phi.cols());
  const int m = static_cast<int>(problem.phi.rows());

  // Envelope gradient of the selection rmse at a fixed fit. The fitted weight vector
  // only has entries for selected columns, so every column's coefficient is taken
  // from the all-columns fit (for selected columns the residual is orthogonal to the
  // column and the entry is ~0 either way); the residual is the active fit's.
  const Eigen::VectorXd w_all = least_squares(problem.phi, problem.y).w;
  auto last_rmse = std::make_shared<double>(0.0);
  LossOracle loss;
  loss.value = [&problem, m](const SubsetMask& z) {
    return least_squares(select_columns(problem.phi, selected_indices(mask_to_real(z))), problem.y).rmse;
  };
  loss.grad = [&problem, w_all, last_rmse, n, m](const std::vector<double>& z) {
    const std::vector<int> sel = selected_indices(z);
    const LeastSquaresFit fit = least_squares(select_columns(problem.phi, sel), problem.y);
    *last_rmse = fit.rmse;
    std::vector<double> g(n, 0.0);
    if (fit.rmse <= 1e-12) return g;
    Eigen::VectorXd r = problem.y - select_columns(problem.phi, sel) * fit.w;
    for (int i = 0; i < n; ++i)
      g[i] = -(r.dot(problem.phi.col(i)) * w_all(i)) / (m * fit.rmse);
    return g;
  };

  std::vector<double> theta(n, 0.0);
  const std::vector<double> zero_noise(n, 0.0);
  RngStream rng(mix_seed(seed, hash_tag("sparse-regress")));
  SparseRegressionResult result;
  result.trace.reserve(steps);

  for (int step = 0; step < steps; ++step) {
    const KSubsetParams params(theta, k);
    const GradientEstimate est = estimate_by_name(estimator, params, loss, rng);
    for (int i = 0; i < n; ++i) theta[i] -= lr * est.g[i];

    const SubsetMask map_now = pam_topk(KSubsetParams(theta, k), zero_noise);
    int hit = 0;
    for (int i : problem.support) hit += map_now[i];
    result.trace.push_back({step, *last_rmse, static_cast<double>(hit) / k});
  }

  result.map_subset = pam_topk(KSubsetParams(theta, k), zero_noise);
  result.final_rmse =
      least_squares(select_columns(problem.phi, selected_indices(mask_to_real(result.map_subset))),
                    problem.y)
          .rmse;
  return result;
}

std::string sparse_trace_to_csv(const std::vector<SparseTraceRow>& trace) {
  std::string out = "step,rmse,map_overlap_with_planted\n";
  char buf[128];
  for (const SparseTraceRow& row : trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", row.step, row.rmse, row.map_overlap);
    out += buf;
  }
  return out;
}

}  // namespace ksubset
