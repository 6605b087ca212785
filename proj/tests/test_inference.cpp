#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "ksubset/inference.hpp"
#include "ksubset/params.hpp"
#include "ksubset/rng.hpp"

#include "oracle.hpp"

using ksubset::KSubsetParams;

namespace {

std::vector<double> logit(std::vector<double> p) {
  for (double& v : p) v = std::log(v / (1.0 - v));
  return p;
}

}  // namespace

TEST_CASE("marginals on a hand-solvable instance") {
  // p = (0.8, 0.5), k = 1: mu_1 = .8*.5 / (.8*.5 + .2*.5) = 0.8
  const KSubsetParams params(logit({0.8, 0.5}), 1);
  const auto mu = ksubset::conditional_marginals(params);
  CHECK(mu[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(mu[1] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("marginals match brute force on random instances up to n = 12") {
  ksubset::RngStream rng(4242);
  for (int round = 0; round < 100; ++round) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 12);
    const int k = static_cast<int>(rng.next_u64() % static_cast<uint64_t>(n + 1));
    const auto theta = oracle::random_theta(rng, n);
    const KSubsetParams params(theta, k);
    const auto mu = ksubset::conditional_marginals(params);
    const auto ref = oracle::conditional_marginals(theta, k);
    for (int i = 0; i < n; ++i) CHECK(std::abs(mu[i] - ref[i]) <= 1e-9);
  }
}

TEST_CASE("marginals sum to k and live in [0, 1]") {
  ksubset::RngStream rng(5151);
  for (int round = 0; round < 50; ++round) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 40);
    const int k = static_cast<int>(rng.next_u64() % static_cast<uint64_t>(n + 1));
    const KSubsetParams params(oracle::random_theta(rng, n), k);
    const auto mu = ksubset::conditional_marginals(params);
    double sum = 0.0;
    for (double m : mu) {
      REQUIRE(m >= 0.0);
      REQUIRE(m <= 1.0);
      sum += m;
    }
    CHECK(sum == doctest::Approx(static_cast<double>(k)).epsilon(1e-9));
  }
}

TEST_CASE("k = 1 marginals reduce to the softmax of the logits") {
  ksubset::RngStream rng(876);
  const auto theta = oracle::random_theta(rng, 9);
  const KSubsetParams params(theta, 1);
  const auto mu = ksubset::conditional_marginals(params);
  double zsum = 0.0;
  for (double v : theta) zsum += std::exp(v);
  for (int i = 0; i < 9; ++i)
    CHECK(std::abs(mu[i] - std::exp(theta[i]) / zsum) <= 1e-12);
}

TEST_CASE("marginals, entropy and jacobian are invariant to a constant logit shift") {
  // the conditioned family depends on theta only through exp(theta . z) / Z
  ksubset::RngStream rng(31337);
  const auto theta = oracle::random_theta(rng, 11);
  auto shifted = theta;
  for (double& v : shifted) v += 3.7;
  const KSubsetParams orig(theta, 4), moved(shifted, 4);
  const auto a = ksubset::conditional_marginals(orig);
  const auto b = ksubset::conditional_marginals(moved);
  for (int i = 0; i < 11; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-10);
  CHECK(std::abs(ksubset::entropy(orig) - ksubset::entropy(moved)) <= 1e-9);
  const auto ja = ksubset::marginal_jacobian(orig);
  const auto jb = ksubset::marginal_jacobian(moved);
  for (int p = 0; p < 11; ++p)
    for (int q = 0; q < 11; ++q) CHECK(std::abs(ja.at(p, q) - jb.at(p, q)) <= 1e-9);
}

TEST_CASE("k = 1 jacobian reduces to the softmax jacobian") {
  ksubset::RngStream rng(444);
  const auto theta = oracle::random_theta(rng, 7);
  const KSubsetParams params(theta, 1);
  const auto jac = ksubset::marginal_jacobian(params);
  std::vector<double> s(7);
  double zsum = 0.0;
  for (double v : theta) zsum += std::exp(v);
  for (int i = 0; i < 7; ++i) s[i] = std::exp(theta[i]) / zsum;
  for (int p = 0; p < 7; ++p)
    for (int q = 0; q < 7; ++q) {
      const double want = p == q ? s[p] * (1.0 - s[p]) : -s[p] * s[q];
      CHECK(std::abs(jac.at(p, q) - want) <= 1e-12);
    }
}

TEST_CASE("pairwise marginals match brute force, serial and parallel agree") {
  ksubset::RngStream rng(2718);
  for (int round = 0; round < 30; ++round) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 9);
    const int k = 1 + static_cast<int>(rng.next_u64() % static_cast<uint64_t>(n));
    const auto theta = oracle::random_theta(rng, n);
    const KSubsetParams params(theta, k);
    const auto pw = ksubset::pairwise_marginals(params);
    const auto pw_serial = ksubset::pairwise_marginals_serial(params);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        CHECK(pw.at(p, q) == pw_serial.at(p, q));  // bit-identical
        if (p != q) CHECK(std::abs(pw.at(p, q) - oracle::pairwise(theta, k, p, q)) <= 1e-9);
      }
  }
}

TEST_CASE("jacobian on a hand-solvable instance") {
  // p = (0.8, 0.5), k = 1: mu = (0.8, 0.2); J = [[.16, -.16], [-.16, .16]]
  const KSubsetParams params(logit({0.8, 0.5}), 1);
  const auto jac = ksubset::marginal_jacobian(params);
  CHECK(jac.at(0, 0) == doctest::Approx(0.16).epsilon(1e-12));
  CHECK(jac.at(1, 1) == doctest::Approx(0.16).epsilon(1e-12));
  CHECK(jac.at(0, 1) == doctest::Approx(-0.16).epsilon(1e-12));
  CHECK(jac.at(1, 0) == doctest::Approx(-0.16).epsilon(1e-12));
}

TEST_CASE("jacobian structural invariants on random instances") {
  ksubset::RngStream rng(1618);
  for (int round = 0; round < 50; ++round) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 31);
    const int k = 1 + static_cast<int>(rng.next_u64() % static_cast<uint64_t>(n));
    const KSubsetParams params(oracle::random_theta(rng, n), k);
    const auto mu = ksubset::conditional_marginals(params);
    const auto jac = ksubset::marginal_jacobian(params);
    for (int p = 0; p < n; ++p) {
      CHECK(std::abs(jac.at(p, p) - mu[p] * (1.0 - mu[p])) <= 1e-9);
      double row = 0.0;
      for (int q = 0; q < n; ++q) {
        row += jac.at(p, q);
        CHECK(std::abs(jac.at(p, q) - jac.at(q, p)) <= 1e-9);
      }
      CHECK(std::abs(row) <= 1e-9);  // shift invariance of the marginals
    }
  }
}

TEST_CASE("jacobian matches a central finite difference of the marginals") {
  ksubset::RngStream rng(9091);
  const double h = 1e-4;
  for (int round = 0; round < 10; ++round) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 15);
    const int k = 1 + static_cast<int>(rng.next_u64() % static_cast<uint64_t>(n));
    const auto theta = oracle::random_theta(rng, n);
    const auto jac = ksubset::marginal_jacobian(KSubsetParams(theta, k));
    for (int q = 0; q < n; ++q) {
      auto up = theta, dn = theta;
      up[q] += h;
      dn[q] -= h;
      const auto mu_up = ksubset::conditional_marginals(KSubsetParams(up, k));
      const auto mu_dn = ksubset::conditional_marginals(KSubsetParams(dn, k));
      for (int p = 0; p < n; ++p) {
        const double fd = (mu_up[p] - mu_dn[p]) / (2.0 * h);
        const double err = std::abs(jac.at(p, q) - fd);
        // relative check with an absolute floor where the derivative vanishes
        if (std::abs(fd) <= 1e-8)
          CHECK(err <= 1e-8);
        else
          CHECK(err / std::abs(fd) <= 1e-5);
      }
    }
  }
}

TEST_CASE("jacobian-vector products") {
  const KSubsetParams params(logit({0.8, 0.5}), 1);
  const auto jv = ksubset::jacobian_vector_product(params, {1.0, 0.0});
  CHECK(jv[0] == doctest::Approx(0.16).epsilon(1e-12));
  CHECK(jv[1] == doctest::Approx(-0.16).epsilon(1e-12));

  // products with basis vectors recover the matrix column by column
  ksubset::RngStream rng(606);
  const KSubsetParams big(oracle::random_theta(rng, 17), 6);
  const auto jac = ksubset::marginal_jacobian(big);
  for (int q = 0; q < 17; ++q) {
    std::vector<double> e(17, 0.0);
    e[q] = 1.0;
    const auto col = ksubset::jacobian_vector_product(big, e);
    for (int p = 0; p < 17; ++p) CHECK(std::abs(col[p] - jac.at(p, q)) <= 1e-12);
  }

  // J * 1 = 0 by shift invariance
  const auto zeros = ksubset::jacobian_vector_product(big, std::vector<double>(17, 1.0));
  for (double v : zeros) CHECK(std::abs(v) <= 1e-9);

  CHECK_THROWS_AS(ksubset::jacobian_vector_product(big, std::vector<double>(3, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("entropy and KL on hand-solvable instances") {
  // p = (0.8, 0.5), k = 1: q = (0.8, 0.2), H = -0.8 log .8 - 0.2 log .2
  const KSubsetParams params(logit({0.8, 0.5}), 1);
  const double expected = -(0.8 * std::log(0.8) + 0.2 * std::log(0.2));
  CHECK(ksubset::entropy(params) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(ksubset::kl_to_uniform(params) ==
        doctest::Approx(std::log(2.0) - expected).epsilon(1e-12));

  // uniform logits: H = log C(n,k), KL = 0
  const KSubsetParams unif(std::vector<double>(10, 0.0), 5);
  CHECK(ksubset::entropy(unif) == doctest::Approx(ksubset::log_binomial(10, 5)).epsilon(1e-12));
  CHECK(ksubset::kl_to_uniform(unif) == doctest::Approx(0.0));
  CHECK(ksubset::log_binomial(10, 5) == doctest::Approx(std::log(252.0)).epsilon(1e-12));
}

TEST_CASE("entropy matches brute force on random instances") {
  ksubset::RngStream rng(40004);
  for (int round = 0; round < 60; ++round) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 12);
    const int k = static_cast<int>(rng.next_u64() % static_cast<uint64_t>(n + 1));
    const auto theta = oracle::random_theta(rng, n);
    const KSubsetParams params(theta, k);
    CHECK(std::abs(ksubset::entropy(params) - oracle::entropy(theta, k)) <= 1e-9);
    CHECK(ksubset::kl_to_uniform(params) >= 0.0);
  }
}

TEST_CASE("log_prob and score agree with enumeration") {
  ksubset::RngStream rng(515);
  const auto theta = oracle::random_theta(rng, 8);
  const KSubsetParams params(theta, 3);
  const auto states = ksubset::enumerate_distribution(params);
  double mass = 0.0;
  for (const auto& [z, p] : states) {
    CHECK(std::exp(ksubset::log_prob(params, z)) == doctest::Approx(p).epsilon(1e-10));
    mass += p;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));

  const auto mu = ksubset::conditional_marginals(params);
  const auto& z0 = states.front().first;
  const auto s = ksubset::score(params, z0);
  for (int i = 0; i < 8; ++i) CHECK(s[i] == doctest::Approx(z0[i] - mu[i]).epsilon(1e-12));

  ksubset::SubsetMask bad(8, 0);
  bad[0] = 1;  // weight 1 != 3
  CHECK_THROWS_AS(ksubset::log_prob(params, bad), std::invalid_argument);
}

TEST_CASE("enumeration refuses blow-up instances") {
  const KSubsetParams params(std::vector<double>(64, 0.0), 32);
  CHECK_THROWS_AS(ksubset::enumerate_distribution(params), std::invalid_argument);
}

TEST_CASE("degenerate k values") {
  ksubset::RngStream rng(62);
  const auto theta = oracle::random_theta(rng, 6);
  const auto mu0 = ksubset::conditional_marginals(KSubsetParams(theta, 0));
  const auto mu6 = ksubset::conditional_marginals(KSubsetParams(theta, 6));
  for (int i = 0; i < 6; ++i) {
    CHECK(mu0[i] == 0.0);
    CHECK(mu6[i] == 1.0);
  }
  CHECK(ksubset::entropy(KSubsetParams(theta, 0)) == doctest::Approx(0.0));
  CHECK(ksubset::entropy(KSubsetParams(theta, 6)) == doctest::Approx(0.0));

  // deterministic distributions have a vanishing jacobian
  for (const int k : {0, 6}) {
    const auto jac = ksubset::marginal_jacobian(KSubsetParams(theta, k));
    for (int p = 0; p < 6; ++p)
      for (int q = 0; q < 6; ++q) CHECK(std::abs(jac.at(p, q)) <= 1e-12);
  }
}
