/* Copyright 2026 The stmask Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "stmask/error.hpp"
#include "stmask/masking.hpp"
#include "stmask/parallel.hpp"

using namespace stmask;

namespace {

MaskConfig config(double ratio, DensityKernel kernel = DensityKernel::kGaussianNormalized,
                  std::uint64_t seed = 0) {
  MaskConfig cfg;
  cfg.mask_ratio = ratio;
  cfg.kernel = kernel;
  cfg.seed = seed;
  return cfg;
}

std::vector<std::uint8_t> frame_mask(const MaskTensor& m, std::size_t b, std::size_t t) {
  std::vector<std::uint8_t> out(m.dim(2));
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = m(b, t, n);
  return out;
}

}  // namespace

TEST_CASE("strategy names round-trip") {
  for (auto s : kAllStrategies) CHECK(parse_mask_strategy(to_string(s)) == s);
  CHECK(parse_mask_strategy("cluster-st") == MaskStrategy::kClusterST);
  CHECK_THROWS_AS(parse_mask_strategy("semantic"), DomainError);
}

TEST_CASE("config defaults") {
  CHECK(MaskConfig::video().mask_ratio == 0.9);
  CHECK(MaskConfig::image().mask_ratio == 0.75);
  CHECK(MaskConfig{}.dc_ratio == 0.2);
  CHECK(MaskConfig{}.kernel == DensityKernel::kGaussianNormalized);
}

TEST_CASE("crafted two-cluster video keeps the temporally matched token of each cluster") {
  const auto x = fixtures::crafted_two_cluster_video();
  const auto cfg = config(0.5);
  const auto clusters = cluster_frames(x, cfg);
  CHECK(oracle::adjusted_rand_index({clusters[0].labels.begin(), clusters[0].labels.end()},
                                    {0, 0, 1, 1}) == 1.0);
  for (auto k : {DensityKernel::kExponential, DensityKernel::kGaussianNormalized}) {
    const auto c = config(0.5, k);
    const auto fast = cluster_st_mask(x, c);
    CHECK(frame_mask(fast, 0, 0) == std::vector<std::uint8_t>{0, 1, 1, 0});
    CHECK(naive_cluster_st_mask(x, c) == fast);
    CHECK(retained_in_frame(fast, 0, 1) == 2);
  }
}

TEST_CASE("identical tokens with a single cluster keep index 0") {
  TokenTensor x({2, 3, 4, 3});
  std::fill(x.values().begin(), x.values().end(), 1.0f);
  const auto cfg = config(0.9);
  REQUIRE(cluster_count(4, 0.9) == 1);
  const auto m = cluster_st_mask(x, cfg);
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t t = 0; t < 3; ++t) CHECK(frame_mask(m, b, t) == std::vector<std::uint8_t>{0, 1, 1, 1});
  CHECK(naive_cluster_st_mask(x, cfg) == m);
}

TEST_CASE("fast cluster-st equals the naive loops bit for bit") {
  std::mt19937_64 gen(11);
  int instances = 0;
  for (int i = 0; i < 60; ++i) {
    const std::size_t B = 1 + i % 2, T = 2 + i % 3, N = 4 + (i * 7) % 29, C = 1 + i % 8;
    const auto x = oracle::random_tokens(B, T, N, C, gen(), i % 6 == 0 ? 2 : 0);
    const double r = 0.5 + 0.45 * static_cast<double>(i % 10) / 10.0;
    for (auto k : {DensityKernel::kExponential, DensityKernel::kGaussianNormalized}) {
      const auto cfg = config(r, k);
      const auto fast = cluster_st_mask(x, cfg);
      REQUIRE(naive_cluster_st_mask(x, cfg) == fast);
      ++instances;
    }
  }
  CHECK(instances >= 100);
}

TEST_CASE("cluster-st keeps the densest member of every cluster") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t T = 2 + seed % 3, N = 9 + seed % 17;
    const auto x = oracle::random_tokens(1, T, N, 4, seed, seed % 3 == 0 ? 2 : 0);
    const auto cfg = config(0.8);
    const auto clusters = cluster_frames(x, cfg);
    const auto rho = temporal_density(x, cfg.dc_ratio, cfg.kernel);
    const auto m = cluster_st_mask(x, cfg);
    for (std::size_t t = 0; t < T; ++t) {
      const auto& a = clusters[t];
      CHECK(retained_in_frame(m, 0, t) == a.n_clusters);
      for (std::size_t n = 0; n < N; ++n) {
        if (m(0, t, n) != 0) continue;
        for (std::size_t j = 0; j < N; ++j) {
          if (j == n || a.labels[j] != a.labels[n]) continue;
          CHECK(m(0, t, j) == 1);
          const bool dominates = rho(0, t, n) > rho(0, t, j) || (rho(0, t, n) == rho(0, t, j) && n < j);
          CHECK(dominates);
        }
      }
    }
  }
}

TEST_CASE("normalized and raw scoring give the same scatter argmax") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t B = 1 + seed % 2, T = 2 + seed % 3, N = 4 + seed % 22;
    const auto x = oracle::random_tokens(B, T, N, 3, seed, seed % 4 == 0 ? 2 : 0);
    const auto cfg = config(0.75);
    const auto clusters = cluster_frames(x, cfg);
    std::vector<std::int32_t> labels;
    for (const auto& a : clusters) labels.insert(labels.end(), a.labels.begin(), a.labels.end());
    const auto rho = temporal_density(x, cfg.dc_ratio, cfg.kernel);
    const FrameShape shape{B, T, N};
    const auto raw = scatter_cluster_argmax(shape, labels, rho, ClusterScoring::kRaw);
    CHECK(scatter_cluster_argmax(shape, labels, rho, ClusterScoring::kSumNormalized) == raw);
    CHECK(cluster_st_mask(x, cfg) == raw);
  }
}

TEST_CASE("scatter argmax on hand-made labels") {
  // Two frames of four tokens; frame 0 has clusters {0,2},{1,3}, frame 1 one cluster.
  DensityTensor rho({1, 2, 4});
  const float v[] = {0.5f, 0.2f, 0.5f, 0.9f, 0.1f, 0.3f, 0.3f, 0.2f};
  std::copy(std::begin(v), std::end(v), rho.values().begin());
  const std::vector<std::int32_t> labels = {0, 1, 0, 1, 0, 0, 0, 0};
  for (auto s : {ClusterScoring::kRaw, ClusterScoring::kSumNormalized}) {
    const auto m = scatter_cluster_argmax({1, 2, 4}, labels, rho, s);
    CHECK(frame_mask(m, 0, 0) == std::vector<std::uint8_t>{0, 1, 1, 0});  // tie 0 vs 2 -> 0
    CHECK(frame_mask(m, 0, 1) == std::vector<std::uint8_t>{1, 0, 1, 1});  // tie 1 vs 2 -> 1
  }
}

TEST_CASE("every strategy retains exactly N_c tokens per frame") {
  struct Case {
    std::size_t n;
    double r;
    std::size_t expected;
  };
  for (const Case& c : {Case{196, 0.75, 49}, Case{196, 0.9, 20}, Case{16, 0.5, 8}, Case{9, 0.9, 1},
                        Case{25, 0.9, 3}, Case{4, 0.1, 4}}) {
    CHECK(cluster_count(c.n, c.r) == c.expected);
    const auto x = oracle::random_tokens(1, 3, c.n, 6, c.n);
    for (auto s : {MaskStrategy::kClusterST, MaskStrategy::kClusterS, MaskStrategy::kRandom,
                   MaskStrategy::kTube}) {
      const auto m = make_mask(s, x, config(c.r, DensityKernel::kGaussianNormalized, 5));
      for (std::size_t t = 0; t < 3; ++t) CHECK(retained_in_frame(m, 0, t) == c.expected);
    }
  }
}

TEST_CASE("N_c = N masks nothing") {
  const auto x = oracle::random_tokens(2, 2, 4, 3, 8);
  const auto cfg = config(0.05);
  REQUIRE(cluster_count(4, 0.05) == 4);
  for (auto s : kAllStrategies) {
    if (s == MaskStrategy::kFrame) continue;
    const auto m = make_mask(s, x, cfg);
    CHECK(std::all_of(m.values().begin(), m.values().end(), [](auto v) { return v == 0; }));
  }
  CHECK(naive_cluster_st_mask(x, cfg) == cluster_st_mask(x, cfg));
}

TEST_CASE("cluster-s draws each cluster member uniformly") {
  const auto [x, truth] = fixtures::two_blob_frame(3, 5, 4, 21);
  const auto cfg0 = config(0.75);
  REQUIRE(cluster_count(8, 0.75) == 2);
  const auto clusters = cluster_frames(x, cfg0);
  REQUIRE(oracle::adjusted_rand_index({clusters[0].labels.begin(), clusters[0].labels.end()}, truth) == 1.0);
  constexpr int kDraws = 10000;
  std::vector<int> kept(8, 0);
  for (int s = 0; s < kDraws; ++s) {
    auto cfg = cfg0;
    cfg.seed = static_cast<std::uint64_t>(s);
    const auto m = cluster_s_mask(x, cfg);
    REQUIRE(retained_in_frame(m, 0, 0) == 2);
    for (std::size_t n = 0; n < 8; ++n) kept[n] += m(0, 0, n) == 0;
  }
  for (std::size_t n = 0; n < 8; ++n) {
    const double k = truth[n] == 0 ? 3.0 : 5.0;
    const double p = 1.0 / k, sigma = std::sqrt(kDraws * p * (1 - p));
    CHECK(std::fabs(kept[n] - kDraws * p) <= 3 * sigma);
  }
}

TEST_CASE("cluster-s works on images and cluster-st refuses them") {
  const auto image = oracle::random_tokens(2, 1, 16, 4, 3);
  const auto m = cluster_s_mask(image, MaskConfig::image());
  CHECK(retained_in_frame(m, 0, 0) == 4);
  CHECK(retained_in_frame(m, 1, 0) == 4);
  try {
    (void)cluster_st_mask(image, MaskConfig::image());
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("cluster_s_mask") != std::string::npos);
  }
  CHECK_THROWS_AS(naive_cluster_st_mask(image, MaskConfig::image()), DomainError);
}

TEST_CASE("tube mask repeats one spatial pattern over time") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto m = tube_mask({2, 5, 16}, config(0.75, DensityKernel::kGaussianNormalized, seed));
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t t = 1; t < 5; ++t) CHECK(frame_mask(m, b, t) == frame_mask(m, b, 0));
  }
}

TEST_CASE("frame-wise mask keeps whole frames") {
  CHECK(framewise_retained_frames(10, 0.9) == 1);
  CHECK(framewise_retained_frames(8, 0.9) == 1);
  CHECK(framewise_retained_frames(8, 0.75) == 2);
  CHECK(framewise_retained_frames(4, 0.5) == 2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto m = framewise_mask({2, 10, 9}, config(0.9, DensityKernel::kGaussianNormalized, seed));
    for (std::size_t b = 0; b < 2; ++b) {
      std::size_t full = 0;
      for (std::size_t t = 0; t < 10; ++t) {
        const auto kept = retained_in_frame(m, b, t);
        CHECK((kept == 0 || kept == 9));
        full += kept == 9;
      }
      CHECK(full == 1);
    }
  }
}

TEST_CASE("random masks differ between frames and seeds") {
  const auto a = random_mask({1, 4, 64}, config(0.75, DensityKernel::kGaussianNormalized, 1));
  const auto b = random_mask({1, 4, 64}, config(0.75, DensityKernel::kGaussianNormalized, 2));
  CHECK(a != b);
  CHECK(frame_mask(a, 0, 0) != frame_mask(a, 0, 1));
}

TEST_CASE("masks are identical across runs and thread counts") {
  const auto x = oracle::random_tokens(2, 4, 25, 6, 99);
  const auto cfg = config(0.8, DensityKernel::kGaussianNormalized, 1234);
  set_num_threads(1);
  std::vector<MaskTensor> ref;
  for (auto s : kAllStrategies) ref.push_back(make_mask(s, x, cfg));
  for (unsigned threads : {1u, 2u, 7u}) {
    set_num_threads(threads);
    std::size_t i = 0;
    for (auto s : kAllStrategies) CHECK(make_mask(s, x, cfg) == ref[i++]);
  }
  set_num_threads(0);
}

TEST_CASE("leakage score") {
  DensityTensor rho({1, 2, 2});
  const float v[] = {1.0f, 2.0f, 3.0f, 6.0f};
  std::copy(std::begin(v), std::end(v), rho.values().begin());
  MaskTensor all({1, 2, 2});
  CHECK(leakage_score(all, rho) == doctest::Approx(3.0));
  MaskTensor one({1, 2, 2});
  std::fill(one.values().begin(), one.values().end(), std::uint8_t{1});
  one(0, 1, 0) = 0;
  CHECK(leakage_score(one, rho) == 3.0);
  MaskTensor none({1, 2, 2});
  std::fill(none.values().begin(), none.values().end(), std::uint8_t{1});
  CHECK_THROWS_AS(leakage_score(none, rho), DomainError);
  CHECK_THROWS_AS(leakage_score(MaskTensor({1, 2, 3}), rho), ValidationError);
}

TEST_CASE("cluster-st leakage dominates cluster-s") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t T = 2 + seed % 3, N = 4 + seed % 20;
    const auto x = oracle::random_tokens(1 + seed % 2, T, N, 5, 300 + seed);
    const auto cfg = config(0.75, DensityKernel::kGaussianNormalized, seed);
    const auto rho = temporal_density(x, cfg.dc_ratio, cfg.kernel);
    CHECK(leakage_score(cluster_st_mask(x, cfg), rho) >= leakage_score(cluster_s_mask(x, cfg), rho));
  }
}

TEST_CASE("mask generators validate parameters") {
  CHECK_THROWS_AS(random_mask({1, 2, 4}, config(1.0)), DomainError);
  CHECK_THROWS_AS(tube_mask({1, 2, 4}, config(0.0)), DomainError);
  CHECK_THROWS_AS(framewise_mask({1, 2, 4}, config(-0.1)), DomainError);
}
