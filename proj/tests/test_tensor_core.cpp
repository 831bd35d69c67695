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

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "stmask/distance.hpp"
#include "stmask/io.hpp"
#include "test_util.hpp"

using namespace stmask;

TEST_CASE("semantic_distance on hand-computed vectors") {
  const float e1[] = {1, 0}, neg[] = {-1, 0}, diag[] = {1, 1};
  CHECK(semantic_distance(e1, e1) == doctest::Approx(0.0));
  CHECK(semantic_distance(e1, neg) == doctest::Approx(2.0));
  CHECK(semantic_distance(e1, diag) == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(semantic_distance(e1, diag) == doctest::Approx(0.2928932).epsilon(1e-6));
}

TEST_CASE("semantic_distance rejects zero-norm input naming the vector") {
  const float zero[] = {0, 0}, e1[] = {1, 0};
  CHECK_THROWS_WITH_AS(semantic_distance(zero, e1), doctest::Contains("vector u"), DomainError);
  CHECK_THROWS_WITH_AS(semantic_distance(e1, zero), doctest::Contains("vector v"), DomainError);
}

TEST_CASE("semantic_distance properties over random vectors") {
  std::mt19937 gen(7);
  std::uniform_real_distribution<float> uni(-1, 1);
  std::uniform_real_distribution<float> scale(0.01f, 100.0f);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t c = 1 + trial % 9;
    std::vector<float> u(c), v(c), su(c);
    for (auto& x : u) x = uni(gen);
    for (auto& x : v) x = uni(gen);
    const float alpha = scale(gen);
    for (std::size_t i = 0; i < c; ++i) su[i] = alpha * u[i];
    const double duv = semantic_distance(u, v);
    CHECK(semantic_distance(u, u) <= 1e-12);
    CHECK(duv == semantic_distance(v, u));
    CHECK(duv >= 0.0);
    CHECK(duv <= 2.0);
    CHECK(semantic_distance(su, v) == doctest::Approx(duv).epsilon(1e-6));
  }
}

TEST_CASE("pairwise_distance_matrix") {
  SUBCASE("identical rows give zeros") {
    const std::vector<float> rows = {0.3f, 0.4f, 0.3f, 0.4f};
    const auto d = pairwise_distance_matrix(MatrixView(rows, 2, 2));
    for (double v : d) CHECK(v == doctest::Approx(0.0).scale(1e-12));
  }
  SUBCASE("orthogonal rows give one off the diagonal") {
    const std::vector<float> rows = {1, 0, 0, 1};
    const auto d = pairwise_distance_matrix(MatrixView(rows, 2, 2));
    CHECK(d[0] == 0.0);
    CHECK(d[3] == 0.0);
    CHECK(d[1] == doctest::Approx(1.0));
    CHECK(d[2] == doctest::Approx(1.0));
  }
  SUBCASE("zero-norm row names its index") {
    const std::vector<float> rows = {1, 0, 0, 0, 0, 1};
    CHECK_THROWS_WITH_AS(pairwise_distance_matrix(MatrixView(rows, 3, 2)),
                         doctest::Contains("row 1"), DomainError);
  }
  SUBCASE("matches the elementwise oracle on random frames") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const std::size_t n = 1 + seed * 3 % 64;
      const std::size_t c = 1 + seed % 8;
      const auto x = oracle::random_tokens(1, 1, n, c, seed);
      const MatrixView m = frame_view(x, 0, 0);
      const auto d = pairwise_distance_matrix(m);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(d[i * n + i] == 0.0);
        for (std::size_t j = 0; j < n; ++j) {
          CHECK(d[i * n + j] == d[j * n + i]);
          CHECK(std::abs(d[i * n + j] -
                         static_cast<double>(oracle::cosine_distance(m.row(i).data(), m.row(j).data(), c))) <=
                1e-6);
        }
      }
    }
  }
}

TEST_CASE("quantile uses linear interpolation at rank q(n-1)") {
  CHECK(quantile({5}, 0.5) == 5.0);
  CHECK(quantile({0, 1, 2, 3, 4}, 0.2) == doctest::Approx(0.8));
  CHECK(quantile({1, 2}, 1.0) == 2.0);
  CHECK(quantile({3, 1, 2}, 0.0) == 1.0);
  CHECK_THROWS_AS(quantile({}, 0.5), DomainError);
  CHECK_THROWS_AS(quantile({1.0}, 1.5), DomainError);
}

TEST_CASE("quantile is monotone, bounded and agrees with quantile_select") {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> uni(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + trial % 37);
    for (auto& x : v) x = trial % 3 == 0 ? std::round(uni(gen)) : uni(gen);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    double prev = -INFINITY;
    for (int k = 0; k <= 20; ++k) {
      const double q = k / 20.0;
      const double value = quantile(v, q);
      std::vector<double> scratch = v;
      CHECK(quantile_select(scratch, q) == value);
      CHECK(value >= prev);
      CHECK(value >= *lo);
      CHECK(value <= *hi);
      prev = value;
    }
  }
}

TEST_CASE("cutoff_distance") {
  CHECK(cutoff_distance({0, 0, 0}, 0.2) == kMinCutoff);
  CHECK(cutoff_distance({0.1, 0.2, 0.3, 0.4, 0.5}, 0.2) == doctest::Approx(0.18));
  CHECK(cutoff_distance({0.7}, 0.2) == doctest::Approx(0.7));
  CHECK(cutoff_distance({0.7}, 1.0) == doctest::Approx(0.7));
  CHECK_THROWS_AS(cutoff_distance({}, 0.2), DomainError);
  CHECK_THROWS_AS(cutoff_distance({0.1}, 0.0), DomainError);
}

TEST_CASE("tensor construction validates dims") {
  CHECK_THROWS_AS(TokenTensor({0, 1, 1, 1}), ValidationError);
  CHECK_THROWS_AS(MaskTensor({1, 2, 2}, std::vector<std::uint8_t>(3)), ValidationError);
  const std::size_t huge = std::numeric_limits<std::size_t>::max() / 2;
  CHECK_THROWS_AS(TokenTensor({huge, huge, 1, 1}), DimensionOverflowError);
}

TEST_CASE("binary files round trip bit-exactly") {
  TempDir dir;
  std::mt19937 gen(3);
  std::uniform_real_distribution<float> uni(-1, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t B = 1 + trial % 2, T = 1 + trial % 3, N = 1 + trial % 5, C = 1 + trial % 4;
    TokenTensor x({B, T, N, C});
    for (auto& v : x.values()) v = uni(gen);
    x.values()[0] = -0.0f;  // sign of zero must survive
    save_token_tensor(x, dir / "x.vtok");
    const auto y = load_token_tensor(dir / "x.vtok");
    REQUIRE(y.shape() == x.shape());
    CHECK(std::memcmp(y.values().data(), x.values().data(), x.values().size_bytes()) == 0);

    MaskTensor m({B, T, N});
    for (auto& v : m.values()) v = gen() & 1;
    save_mask(m, dir / "m.vmsk");
    CHECK(load_mask(dir / "m.vmsk") == m);

    DensityTensor d({B, T, N});
    for (auto& v : d.values()) v = std::abs(uni(gen)) * 10;
    save_density(d, dir / "d.vden");
    CHECK(load_density(dir / "d.vden") == d);

    RelevanceTensor r({B, T, N});
    for (auto& v : r.values()) v = uni(gen);
    save_relevance(r, dir / "r.vrel");
    CHECK(load_relevance(dir / "r.vrel") == r);

    TextFeature t({B, C});
    for (auto& v : t.values()) v = uni(gen);
    save_text_feature(t, dir / "t.vtxt");
    CHECK(load_text_feature(dir / "t.vtxt") == t);
  }
}

TEST_CASE("file header layout is little-endian magic, version, rank, dims") {
  TempDir dir;
  MaskTensor m({1, 2, 3});
  m(0, 1, 2) = 1;
  save_mask(m, dir / "m.vmsk");
  const std::string bytes = read_file(dir / "m.vmsk");
  const std::string expected_header("VMSK\x01\0\0\0\x03\0\0\0\x01\0\0\0\x02\0\0\0\x03\0\0\0", 24);
  REQUIRE(bytes.size() == 24 + 6);
  CHECK(bytes.substr(0, 24) == expected_header);
  CHECK(bytes.back() == '\x01');
}

TEST_CASE("malformed files raise distinct errors") {
  TempDir dir;
  TokenTensor x({1, 2, 2, 2}, 0.5f);
  save_token_tensor(x, dir / "ok.vtok");
  std::string bytes = read_file(dir / "ok.vtok");

  SUBCASE("bad magic") {
    std::string bad = bytes;
    bad.replace(0, 4, "XXXX");
    write_file_atomic(dir / "bad.vtok", bad);
    CHECK_THROWS_AS(load_token_tensor(dir / "bad.vtok"), FormatError);
  }
  SUBCASE("wrong kind of file") {
    CHECK_THROWS_AS(load_mask(dir / "ok.vtok"), FormatError);
  }
  SUBCASE("truncated payload") {
    write_file_atomic(dir / "short.vtok", bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(load_token_tensor(dir / "short.vtok"), TruncationError);
  }
  SUBCASE("NaN payload") {
    std::string nan = bytes;
    const float q = std::numeric_limits<float>::quiet_NaN();
    std::memcpy(nan.data() + 28, &q, 4);
    write_file_atomic(dir / "nan.vtok", nan);
    CHECK_THROWS_AS(load_token_tensor(dir / "nan.vtok"), ValidationError);
  }
  SUBCASE("dim overflow") {
    std::string huge = bytes.substr(0, 28);
    for (int i = 12; i < 28; ++i) huge[i] = '\xff';
    write_file_atomic(dir / "huge.vtok", huge);
    CHECK_THROWS_AS(load_token_tensor(dir / "huge.vtok"), DimensionOverflowError);
  }
  SUBCASE("mask entries outside {0, 1}") {
    MaskTensor m({1, 1, 2});
    save_mask(m, dir / "m.vmsk");
    std::string mb = read_file(dir / "m.vmsk");
    mb.back() = 2;
    write_file_atomic(dir / "m2.vmsk", mb);
    CHECK_THROWS_AS(load_mask(dir / "m2.vmsk"), ValidationError);
  }
}

TEST_CASE("save validates before touching the filesystem") {
  TempDir dir;
  DensityTensor d({1, 1, 2});
  d(0, 0, 1) = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(save_density(d, dir / "d.vden"), ValidationError);
  CHECK_FALSE(std::filesystem::exists(dir / "d.vden"));
  CHECK(std::filesystem::is_empty(dir.path()));

  DensityTensor neg({1, 1, 1}, -1.0f);
  CHECK_THROWS_AS(save_density(neg, dir / "n.vden"), ValidationError);

  // B = 0 cannot even be constructed, so nothing can be written.
  CHECK_THROWS_AS(MaskTensor({0, 1, 1}), ValidationError);
  CHECK(std::filesystem::is_empty(dir.path()));
}

TEST_CASE("I/O failures surface the path") {
  MaskTensor m({1, 1, 1});
  CHECK_THROWS_WITH_AS(save_mask(m, "/nonexistent-dir/x.vmsk"), doctest::Contains("/nonexistent-dir/x.vmsk"),
                       IoError);
  CHECK_THROWS_WITH_AS(load_mask("/nonexistent-dir/x.vmsk"), doctest::Contains("/nonexistent-dir/x.vmsk"),
                       IoError);
}
