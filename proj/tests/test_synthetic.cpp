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

#include "oracles.hpp"
#include "stmask/error.hpp"
#include "stmask/synthetic.hpp"
#include "stmask/temporal_density.hpp"

using namespace stmask;

namespace {

SyntheticSpec small_spec(std::size_t motion, double noise) {
  SyntheticSpec s;
  s.batch = 2;
  s.frames = 4;
  s.tokens = 36;
  s.channels = 8;
  s.motion = motion;
  s.noise = noise;
  s.seed = 3;
  return s;
}

}  // namespace

TEST_CASE("blob geometry") {
  CHECK(blob_side_for(1) == 1);
  CHECK(blob_side_for(6) == 2);
  CHECK(blob_side_for(14) == 4);
  const auto s = small_spec(1, 0.0);
  std::size_t count = 0;
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 6; ++c) count += in_blob(s, 0, r, c);
  CHECK(count == 4);
  CHECK(in_blob(s, 0, 2, 0));
  CHECK(in_blob(s, 1, 2, 2));
  CHECK_FALSE(in_blob(s, 1, 2, 0));
  CHECK(in_blob(s, 5, 2, 0));  // wraps around
}

TEST_CASE("static noiseless video repeats frames and has two density levels") {
  const auto v = generate_synthetic(small_spec(0, 0.0));
  CHECK(v.grid == 6);
  CHECK(v.blob_side == 2);
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t t = 1; t < 4; ++t)
      for (std::size_t n = 0; n < 36; ++n)
        for (std::size_t c = 0; c < 8; ++c) CHECK(v.tokens(b, t, n, c) == v.tokens(b, 0, n, c));
  const auto rho = temporal_density(v.tokens, 0.2);
  const auto spec = small_spec(0, 0.0);
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t t = 0; t < 4; ++t)
      for (std::size_t n = 0; n < 36; ++n) {
        const bool blob = in_blob(spec, t, n / 6, n % 6);
        const std::size_t ref = blob ? 2 * 6 : 0;  // (2, 0) is in the static blob, (0, 0) is not
        CHECK(rho(b, t, n) == rho(b, t, ref));
      }
}

TEST_CASE("moving blob tokens are denser than a fresh random token would be") {
  const auto spec = small_spec(1, 0.0);
  const auto v = generate_synthetic(spec);
  // Noiseless blob tokens equal the text feature.
  const std::size_t cell = 2 * 6;
  REQUIRE(in_blob(spec, 0, 2, 0));
  for (std::size_t c = 0; c < 8; ++c) CHECK(v.tokens(0, 0, cell, c) == v.text(0, c));
  const auto rho = temporal_density(v.tokens, 0.2);
  auto fresh = v.tokens;
  const auto r = oracle::random_tokens(1, 1, 1, 8, 77);
  for (std::size_t c = 0; c < 8; ++c) fresh(0, 0, cell, c) = r(0, 0, 0, c);
  CHECK(rho(0, 0, cell) > temporal_density(fresh, 0.2)(0, 0, cell));
  for (std::size_t t = 0; t < 4; ++t) {
    std::size_t blob = 0;
    for (std::size_t n = 0; n < 36; ++n) blob += in_blob(spec, t, n / 6, n % 6);
    CHECK(blob == 4);
  }
}

TEST_CASE("synthetic generation is deterministic per seed") {
  const auto spec = small_spec(1, 0.1);
  const auto a = generate_synthetic(spec);
  const auto b = generate_synthetic(spec);
  CHECK(a.tokens == b.tokens);
  CHECK(a.text == b.text);
  auto other = spec;
  other.seed = 4;
  CHECK(generate_synthetic(other).tokens != a.tokens);
}

TEST_CASE("synthetic parameter validation") {
  auto s = small_spec(1, 0.0);
  s.tokens = 35;
  CHECK_THROWS_AS(generate_synthetic(s), DomainError);
  s = small_spec(6, 0.0);
  CHECK_THROWS_AS(generate_synthetic(s), DomainError);
  s = small_spec(1, -0.5);
  CHECK_THROWS_AS(generate_synthetic(s), DomainError);
  s = small_spec(1, 0.0);
  s.frames = 0;
  CHECK_THROWS_AS(generate_synthetic(s), DomainError);
}
