// Copyright 2026 The gpriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gpriv/rng.h"

#include <cmath>
#include <set>

#include <gtest/gtest.h>

namespace gpriv {
namespace {

TEST(RngTest, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int k = 0; k < 100; ++k) {
    EXPECT_EQ(a.Uniform(), b.Uniform());
    EXPECT_EQ(a.Laplace(2.0), b.Laplace(2.0));
  }
}

TEST(RngTest, UniformInUnitInterval) {
  Rng rng(1);
  for (int k = 0; k < 10000; ++k) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RngTest, LaplaceMomentsMatchScale) {
  Rng rng(7);
  const double b = 3.0;
  const int n = 200000;
  double sum = 0.0, sum_abs = 0.0;
  for (int k = 0; k < n; ++k) {
    const double v = rng.Laplace(b);
    sum += v;
    sum_abs += std::fabs(v);
  }
  // E|X| = b, sd(|X|) = b, so 5 standard errors is about 0.034.
  EXPECT_NEAR(sum_abs / n, b, 0.04);
  EXPECT_NEAR(sum / n, 0.0, 0.05);
}

TEST(RngTest, BetaMean) {
  Rng rng(9);
  const int n = 100000;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += rng.Beta(0.3, 1.5);
  EXPECT_NEAR(sum / n, 0.3 / 1.8, 0.005);
}

TEST(RngTest, DeriveSeedSeparatesComponents) {
  std::set<uint64_t> seen;
  for (uint64_t a = 0; a < 20; ++a) {
    for (uint64_t b = 0; b < 20; ++b) seen.insert(DeriveSeed(5, {a, b}));
  }
  EXPECT_EQ(seen.size(), 400u);
  EXPECT_NE(DeriveSeed(5, {1, 2}), DeriveSeed(5, {2, 1}));
  EXPECT_NE(DeriveSeed(5, {1}), DeriveSeed(6, {1}));
  EXPECT_EQ(DeriveSeed(5, {1, 2}), DeriveSeed(5, {1, 2}));
}

TEST(RngTest, HashNameIsFnv1a) {
  // Published FNV-1a 64 test vectors.
  EXPECT_EQ(HashName(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(HashName("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(HashName("foobar"), 0x85944171f73967e8ULL);
}

}  // namespace
}  // namespace gpriv
