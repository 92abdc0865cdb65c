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

#include "gpriv/dataset.h"

#include <cstdio>
#include <string>

#include <gtest/gtest.h>

#include "test_util.h"

namespace gpriv {
namespace {

using testing::FromRows;
using testing::MakePanel;

TEST(DatasetTest, CarriersAndFrequencies) {
  const GenotypePanel p = FromRows(ReleaseMode::kAaf, {{1, 0, 1}, {1, 0, 0}},
                                   {{0, 0, 1}, {1, 0, 1}, {0, 0, 0}, {0, 1, 0}});
  EXPECT_EQ(p.num_snvs(), 3);
  EXPECT_EQ(p.carrier_count(Population::kDataset, 0), 2);
  EXPECT_EQ(p.carrier_count(Population::kDataset, 1), 0);
  EXPECT_DOUBLE_EQ(p.aaf(Population::kDataset, 2), 0.5);
  EXPECT_DOUBLE_EQ(p.aaf(Population::kReference, 2), 0.5);
  EXPECT_DOUBLE_EQ(p.aaf(Population::kReference, 1), 0.25);
  EXPECT_TRUE(p.beacon_response(0));
  EXPECT_FALSE(p.beacon_response(1));
  const auto c = p.carriers(Population::kReference, 2);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], 0);
  EXPECT_EQ(c[1], 1);
}

TEST(DatasetTest, RejectsBadInput) {
  EXPECT_FALSE(GenotypePanel::Create(ReleaseMode::kAaf, 2, 1, 1, {0, 2}, {0, 0})
                   .ok());
  EXPECT_FALSE(
      GenotypePanel::Create(ReleaseMode::kAaf, 2, 1, 1, {0, 1, 1}, {0, 0}).ok());
  // Beacon mode needs reference frequencies below one half.
  EXPECT_FALSE(GenotypePanel::Create(ReleaseMode::kBeacon, 1, 1, 2, {1}, {1, 0})
                   .ok());
  EXPECT_TRUE(GenotypePanel::Create(ReleaseMode::kBeacon, 1, 1, 3, {1},
                                    {1, 0, 0})
                  .ok());
}

TEST(DatasetTest, GenerationIsDeterministic) {
  const GenotypePanel a = MakePanel(ReleaseMode::kBeacon, 300, 20, 30, 5);
  const GenotypePanel b = MakePanel(ReleaseMode::kBeacon, 300, 20, 30, 5);
  const GenotypePanel c = MakePanel(ReleaseMode::kBeacon, 300, 20, 30, 6);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == c);
  for (int j = 0; j < a.num_snvs(); ++j) {
    EXPECT_LT(a.aaf(Population::kReference, j), 0.5);
  }
}

TEST(DatasetTest, BlocksCorrelateNeighbors) {
  const GenotypePanel p =
      MakePanel(ReleaseMode::kBeacon, 200, 200, 50, 3, /*block_len=*/20, 0.95);
  // Within a block most rows repeat the block's first column.
  int same = 0, total = 0;
  for (int i = 0; i < p.num_individuals(); ++i) {
    for (int j = 1; j < 20; ++j) {
      same += p.carries(Population::kDataset, i, j) ==
              p.carries(Population::kDataset, i, 0);
      ++total;
    }
  }
  EXPECT_GT(static_cast<double>(same) / total, 0.85);
}

TEST(DatasetTest, FixedFrequenciesAreUsed) {
  DatasetConfig c;
  c.num_snvs = 2;
  c.num_individuals = 4000;
  c.num_reference = 10;
  c.frequencies = {0.0, 0.3};
  const GenotypePanel p = testing::Unwrap(GeneratePanel(c));
  EXPECT_EQ(p.carrier_count(Population::kDataset, 0), 0);
  EXPECT_NEAR(p.aaf(Population::kDataset, 1), 0.3, 0.03);
  c.frequencies = {0.6, 0.1};
  EXPECT_FALSE(GeneratePanel(c).ok());
}

TEST(DatasetTest, TextRoundTrip) {
  const GenotypePanel p = MakePanel(ReleaseMode::kAaf, 40, 7, 9, 11);
  const std::string text = FormatPanel(p);
  const GenotypePanel q = testing::Unwrap(ParsePanel(text));
  EXPECT_TRUE(p == q);
  EXPECT_EQ(FormatPanel(q), text);

  const std::string path = ::testing::TempDir() + "/panel.txt";
  ASSERT_TRUE(SavePanel(p, path).ok());
  EXPECT_TRUE(testing::Unwrap(LoadPanel(path)) == p);
  std::remove(path.c_str());
}

TEST(DatasetTest, ParseErrors) {
  EXPECT_FALSE(ParsePanel("").ok());
  EXPECT_FALSE(ParsePanel("2 1 1 aaf\n1,0\n").ok());        // missing row
  EXPECT_FALSE(ParsePanel("2 1 1 aaf\n1,0\n1,2\n").ok());   // bad value
  EXPECT_FALSE(ParsePanel("2 1 1 both\n1,0\n1,0\n").ok());  // bad mode
  EXPECT_TRUE(ParsePanel("2 1 1 aaf\n1,0\n1,0\n").ok());
  // The mode argument overrides the header.
  const auto p = ParsePanel("2 1 1 aaf\n1,0\n1,0\n", ReleaseMode::kAaf);
  ASSERT_TRUE(p.ok());
  EXPECT_EQ(p->mode(), ReleaseMode::kAaf);
}

}  // namespace
}  // namespace gpriv
