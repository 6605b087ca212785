#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ksubset/estimators.hpp"
#include "ksubset/inference.hpp"
#include "ksubset/params.hpp"
#include "ksubset/rng.hpp"
#include "ksubset/sampling.hpp"
#include "ksubset/sparse.hpp"
#include "ksubset/subset_dp.hpp"
#include "ksubset/synthetic.hpp"

namespace {

ksubset::KSubsetParams read_params_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("input: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("input: malformed JSON in '" + path + "': " + e.what());
  }
  if (!j.contains("theta") || !j["theta"].is_array())
    throw std::invalid_argument("theta: missing or not an array in '" + path + "'");
  if (!j.contains("k") || !j["k"].is_number_integer())
    throw std::invalid_argument("k: missing or not an integer in '" + path + "'");
  std::vector<double> theta;
  for (const auto& v : j["theta"]) {
    if (!v.is_number()) throw std::invalid_argument("theta: entries must be numbers");
    theta.push_back(v.get<double>());
  }
  return ksubset::KSubsetParams(std::move(theta), j["k"].get<int>());
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("out: cannot open '" + path + "' for writing");
  out << content;
}

int bench_threads_from_env() {
  const char* env = std::getenv("KSUBSET_THREADS");
  if (!env || !*env) return 0;  // machine default
  const int v = std::atoi(env);
  if (v < 1) throw std::invalid_argument("KSUBSET_THREADS: must be a positive integer");
  return v;
}

int cmd_marginals(const std::string& input) {
  const ksubset::KSubsetParams params = read_params_json(input);
  nlohmann::json out;
  out["pr"] = std::exp(ksubset::pr_exactly_k(params).first);
  out["mu"] = ksubset::conditional_marginals(params);
  out["entropy"] = ksubset::entropy(params);
  out["kl"] = ksubset::kl_to_uniform(params);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_sample(const std::string& input, long count, uint64_t seed) {
  const ksubset::KSubsetParams params = read_params_json(input);
  ksubset::RngStream rng(seed);
  std::string line(params.n(), '0');
  for (long i = 0; i < count; ++i) {
    const ksubset::SubsetMask z = ksubset::sample_exact(params, rng);
    for (int j = 0; j < params.n(); ++j) line[j] = z[j] ? '1' : '0';
    std::cout << line << "\n";
  }
  return 0;
}

int cmd_bench_synthetic(const ksubset::SyntheticConfig& config, const std::string& out_path,
                        const std::string& format) {
  const auto reports = ksubset::run_synthetic(config, bench_threads_from_env());
  const std::string payload = format == "json" ? ksubset::reports_to_json(reports, config)
                                               : ksubset::reports_to_csv(reports, config);
  if (out_path.empty())
    std::cout << payload;
  else
    write_file(out_path, payload);
  return 0;
}

int cmd_sparse_regress(int n, int k, int m, double rho, double sigma, int steps, double lr,
                       uint64_t seed, const std::string& out_path) {
  const ksubset::SparseRegressionProblem problem =
      ksubset::generate_sparse_problem(n, k, m, sigma, rho, seed);
  const ksubset::SparseRegressionResult result =
      ksubset::run_sparse_regression(problem, k, steps, lr, "simple", seed);
  if (!out_path.empty()) write_file(out_path, ksubset::sparse_trace_to_csv(result.trace));

  nlohmann::json summary;
  summary["map_subset"] = result.map_subset;
  summary["final_rmse"] = result.final_rmse;
  summary["planted_support"] = problem.support;
  int hit = 0;
  for (int i : problem.support) hit += result.map_subset[i];
  summary["map_overlap_with_planted"] = static_cast<double>(hit) / k;
  std::cout << summary.dump(2) << "\n";
  return 0;
}

// enumeration-oracle property sweep on small random instances
int cmd_selfcheck() {
  ksubset::RngStream rng(20240901);
  for (int round = 0; round < 40; ++round) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 8);
    const int k = static_cast<int>(rng.next_u64() % static_cast<uint64_t>(n + 1));
    std::vector<double> theta(n);
    for (double& v : theta) v = rng.normal();
    const ksubset::KSubsetParams params(theta, k);

    const auto states = ksubset::enumerate_distribution(params);
    double tot = 0.0;
    std::vector<double> mu_ref(n, 0.0);
    double ent_ref = 0.0;
    for (const auto& [z, p] : states) {
      tot += p;
      for (int i = 0; i < n; ++i) mu_ref[i] += p * z[i];
      if (p > 0.0) ent_ref -= p * std::log(p);
    }
    if (std::abs(tot - 1.0) > 1e-9) {
      std::cerr << "selfcheck: enumeration mass " << tot << " != 1\n";
      return 2;
    }
    const auto mu = ksubset::conditional_marginals(params);
    for (int i = 0; i < n; ++i)
      if (std::abs(mu[i] - mu_ref[i]) > 1e-9) {
        std::cerr << "selfcheck: marginal mismatch at n=" << n << " k=" << k << "\n";
        return 2;
      }
    if (std::abs(ksubset::entropy(params) - ent_ref) > 1e-9) {
      std::cerr << "selfcheck: entropy mismatch at n=" << n << " k=" << k << "\n";
      return 2;
    }
    if (std::abs(ksubset::pr_exactly_k_dc(params) - ksubset::pr_exactly_k(params).first) > 1e-12) {
      std::cerr << "selfcheck: divide-and-conquer mismatch at n=" << n << " k=" << k << "\n";
      return 2;
    }
    const ksubset::SubsetMask z = ksubset::sample_exact(params, rng);
    if (ksubset::mask_weight(z) != k) {
      std::cerr << "selfcheck: sample weight != k\n";
      return 2;
    }
  }
  std::cout << "selfcheck ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact inference, sampling, and gradient estimation for k-subset distributions"};
  app.require_subcommand(1);

  std::string input_path, out_path, format = "csv", estimators_csv = "simple,sfe,imle,softsub";
  long sample_count = 1;
  uint64_t seed = 0;
  long samples = 10000;
  int n = 10, k = 5, m = 200, steps = 500;
  double rho = 0.5, sigma = 0.1, lr = 0.5;
  bool random_theta = false;
  uint64_t theta_seed = 0;

  auto* marg = app.add_subcommand("marginals", "Exactly-k probability, marginals, entropy, KL (JSON)");
  marg->add_option("--input", input_path, "JSON file {\"theta\": [...], \"k\": K}")->required();

  auto* samp = app.add_subcommand("sample", "Draw exact samples, one 0/1 mask per line");
  samp->add_option("--input", input_path, "JSON file {\"theta\": [...], \"k\": K}")->required();
  samp->add_option("--count", sample_count, "number of draws")->check(CLI::PositiveNumber);
  samp->add_option("--seed", seed, "rng seed");

  auto* bench = app.add_subcommand("bench-synthetic", "Estimator bias/variance/error study");
  bench->add_option("--n", n, "number of variables")->check(CLI::PositiveNumber);
  bench->add_option("--k", k, "subset size");
  bench->add_option("--samples", samples, "estimates per estimator")->check(CLI::PositiveNumber);
  bench->add_option("--seed", seed, "master seed");
  bench->add_option("--estimators", estimators_csv,
                    "comma list of simple,simple-f,simple-b,sfe,imle,softsub");
  bench->add_option("--out", out_path, "output path (stdout when omitted)");
  bench->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  bench->add_flag("--random-theta", random_theta, "evaluate at random logits instead of zeros");
  bench->add_option("--theta-seed", theta_seed, "seed for --random-theta");

  auto* sparse = app.add_subcommand("sparse-regress", "Planted-support sparse regression");
  sparse->add_option("--n", n, "number of features")->check(CLI::PositiveNumber);
  sparse->add_option("--k", k, "subset size")->check(CLI::PositiveNumber);
  sparse->add_option("--m", m, "number of rows")->check(CLI::PositiveNumber);
  sparse->add_option("--rho", rho, "feature correlation");
  sparse->add_option("--sigma", sigma, "noise level");
  sparse->add_option("--steps", steps, "gradient steps")->check(CLI::PositiveNumber);
  sparse->add_option("--lr", lr, "learning rate");
  sparse->add_option("--seed", seed, "problem + optimizer seed");
  sparse->add_option("--out", out_path, "trace CSV path");

  app.add_subcommand("selfcheck", "Enumeration-oracle property sweep on small instances");

  try {
    app.parse(argc, argv);

    if (marg->parsed()) return cmd_marginals(input_path);
    if (samp->parsed()) return cmd_sample(input_path, sample_count, seed);
    if (bench->parsed()) {
      ksubset::SyntheticConfig config;
      config.n = n;
      config.k = k;
      config.num_estimates = samples;
      config.master_seed = seed;
      config.random_theta = random_theta;
      config.theta_seed = theta_seed;
      std::stringstream ss(estimators_csv);
      std::string name;
      while (std::getline(ss, name, ','))
        if (!name.empty()) config.estimators.push_back({name});
      if (config.estimators.empty())
        throw std::invalid_argument("estimators: list must be non-empty");
      // surface k/n and estimator-name errors before any computation
      (void)ksubset::KSubsetParams(std::vector<double>(n, 0.0), k);
      for (const auto& spec : config.estimators)
        if (spec.name != "simple" && spec.name != "simple-f" && spec.name != "simple-b" &&
            spec.name != "sfe" && spec.name != "imle" && spec.name != "softsub")
          throw std::invalid_argument("estimators: unknown name '" + spec.name + "'");
      return cmd_bench_synthetic(config, out_path, format);
    }
    if (sparse->parsed()) return cmd_sparse_regress(n, k, m, rho, sigma, steps, lr, seed, out_path);
    return cmd_selfcheck();
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
