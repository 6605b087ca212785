#include <cmath>
#include <map>
#include <vector>

#include <doctest.h>

#include "ksubset/inference.hpp"
#include "ksubset/params.hpp"
#include "ksubset/rng.hpp"
#include "ksubset/sampling.hpp"

#include "oracle.hpp"

using ksubset::KSubsetParams;
using ksubset::SubsetMask;

namespace {

// total variation distance between an empirical histogram and exact probabilities
double empirical_tv(const std::map<SubsetMask, long>& counts,
                    const std::vector<std::pair<SubsetMask, double>>& states, long draws) {
  double tv = 0.0;
  for (const auto& [z, p] : states) {
    const auto it = counts.find(z);
    const double freq = it == counts.end() ? 0.0 : static_cast<double>(it->second) / draws;
    tv += std::abs(freq - p);
  }
  return 0.5 * tv;
}

}  // namespace

TEST_CASE("samples always have weight k") {
  ksubset::RngStream rng(8080);
  for (int round = 0; round < 60; ++round) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 30);
    const int k = static_cast<int>(rng.next_u64() % static_cast<uint64_t>(n + 1));
    const KSubsetParams params(oracle::random_theta(rng, n), k);
    CHECK(ksubset::mask_weight(ksubset::sample_exact(params, rng)) == k);
    CHECK(ksubset::mask_weight(ksubset::sample_exact_dc(params, rng)) == k);
  }
}

TEST_CASE("degenerate subset sizes sample deterministically") {
  ksubset::RngStream rng(17);
  const KSubsetParams none({1.0, -2.0, 0.3}, 0);
  const KSubsetParams all({1.0, -2.0, 0.3}, 3);
  CHECK(ksubset::sample_exact(none, rng) == SubsetMask{0, 0, 0});
  CHECK(ksubset::sample_exact(all, rng) == SubsetMask{1, 1, 1});
  CHECK(ksubset::sample_exact_dc(none, rng) == SubsetMask{0, 0, 0});
  CHECK(ksubset::sample_exact_dc(all, rng) == SubsetMask{1, 1, 1});
}

TEST_CASE("both samplers track the exact distribution at moderate draw counts") {
  ksubset::RngStream theta_rng(991);
  const auto theta = oracle::random_theta(theta_rng, 7);
  const KSubsetParams params(theta, 3);
  const auto states = ksubset::enumerate_distribution(params);
  const long draws = 50000;

  for (int which = 0; which < 2; ++which) {
    ksubset::RngStream rng(555 + which);
    std::map<SubsetMask, long> counts;
    for (long i = 0; i < draws; ++i)
      ++counts[which == 0 ? ksubset::sample_exact(params, rng)
                          : ksubset::sample_exact_dc(params, rng)];
    CHECK(empirical_tv(counts, states, draws) < 0.03);
  }
}

TEST_CASE("exact sampler is deterministic given the stream seed") {
  const KSubsetParams params({0.5, -0.2, 1.0, 0.0, -1.5}, 2);
  ksubset::RngStream a(99), b(99);
  for (int i = 0; i < 100; ++i)
    CHECK(ksubset::sample_exact(params, a) == ksubset::sample_exact(params, b));
}

TEST_CASE("gumbel noise has the right length and is finite") {
  ksubset::RngStream rng(3);
  const auto eps = ksubset::gumbel_noise(12, rng);
  REQUIRE(eps.size() == 12);
  for (double e : eps) CHECK(std::isfinite(e));
}

TEST_CASE("top-k map picks the k largest perturbed logits") {
  const KSubsetParams params({0.1, 2.0, -0.5, 1.0}, 2);
  const std::vector<double> zero(4, 0.0);
  CHECK(ksubset::pam_topk(params, zero) == SubsetMask{0, 1, 0, 1});
  // noise can flip the selection
  CHECK(ksubset::pam_topk(params, {5.0, 0.0, 0.0, 0.0}) == SubsetMask{1, 1, 0, 0});
  // ties break toward the lower index
  const KSubsetParams tied({1.0, 1.0, 1.0}, 2);
  CHECK(ksubset::pam_topk(tied, {0.0, 0.0, 0.0}) == SubsetMask{1, 1, 0});
  CHECK_THROWS_AS(ksubset::pam_topk(params, {0.0, 0.0, 0.0, std::nan("")}),
                  std::invalid_argument);
}

TEST_CASE("perturb-and-map with k = 1 reproduces softmax frequencies") {
  // Gumbel-max: argmax(theta + eps) ~ softmax(theta) exactly
  const std::vector<double> theta = {0.3, -0.7, 1.1};
  const KSubsetParams params(theta, 1);
  double zsum = 0.0;
  for (double v : theta) zsum += std::exp(v);

  ksubset::RngStream rng(2025);
  const long draws = 200000;
  std::vector<long> counts(3, 0);
  for (long i = 0; i < draws; ++i) {
    const auto z = ksubset::pam_topk(params, ksubset::gumbel_noise(3, rng));
    for (int j = 0; j < 3; ++j) counts[j] += z[j];
  }
  for (int j = 0; j < 3; ++j) {
    const double freq = static_cast<double>(counts[j]) / draws;
    CHECK(std::abs(freq - std::exp(theta[j]) / zsum) < 0.005);
  }
}

TEST_CASE("perturb-and-map is measurably biased for k >= 2 at skewed logits") {
  // this bias is the motivation for keeping an exact sampler around
  ksubset::RngStream theta_rng(46);
  const auto theta = oracle::random_theta(theta_rng, 7);
  const KSubsetParams params(theta, 3);
  const auto states = ksubset::enumerate_distribution(params);

  ksubset::RngStream rng(606);
  const long draws = 50000;
  std::map<SubsetMask, long> counts;
  for (long i = 0; i < draws; ++i)
    ++counts[ksubset::pam_topk(params, ksubset::gumbel_noise(7, rng))];
  CHECK(empirical_tv(counts, states, draws) > 0.03);
}
