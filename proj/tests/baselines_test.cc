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

#include "gpriv/baselines.h"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "gpriv/ld.h"
#include "gpriv/spgb.h"
#include "test_util.h"

namespace gpriv {
namespace {

using testing::MakePanel;
using testing::Unwrap;

BaselineConfig Config(BaselineMethod method, ThreatModel model) {
  BaselineConfig c;
  c.method = method;
  c.model = model;
  c.alpha = 0.5;
  c.w = 1.0;
  return c;
}

int Covered(const GenotypePanel& p, const BeaconConstants& c,
            const ThreatModel& m, const std::vector<int>& flips) {
  DefenseSolution s;
  s.flips = flips;
  EXPECT_TRUE(EvaluateSolution(p, &c, m, s).ok());
  return static_cast<int>(s.covered.size());
}

TEST(SfTest, NothingToDoWhenCovered) {
  const GenotypePanel p = MakePanel(ReleaseMode::kBeacon, 100, 10, 10, 1);
  const BeaconConstants c = Unwrap(PrecomputeBeaconConstants(p));
  const DefenseSolution s = Unwrap(RunBaseline(
      p, &c, nullptr, Config(BaselineMethod::kSf, ThreatModel::Fixed(-1e9))));
  EXPECT_TRUE(s.flips.empty());
  EXPECT_DOUBLE_EQ(s.privacy_pct, 100.0);
}

TEST(SfTest, ReachesFullCoverageAndIsMinimal) {
  for (int seed = 0; seed < 8; ++seed) {
    const GenotypePanel p = MakePanel(ReleaseMode::kBeacon, 10, 4, 10, 30 + seed);
    const BeaconConstants c = Unwrap(PrecomputeBeaconConstants(p));
    const ThreatModel m = ThreatModel::Fixed(0.0);
    const DefenseSolution s =
        Unwrap(RunBaseline(p, &c, nullptr, Config(BaselineMethod::kSf, m)));
    const int covered = static_cast<int>(s.covered.size());
    // Removing any single flip loses coverage.
    for (size_t k = 0; k < s.flips.size(); ++k) {
      std::vector<int> fewer = s.flips;
      fewer.erase(fewer.begin() + k);
      EXPECT_LT(Covered(p, c, m, fewer), covered);
    }
  }
}

TEST(SfTest, SfmNeedsAdaptive) {
  const GenotypePanel p = MakePanel(ReleaseMode::kBeacon, 50, 10, 10, 1);
  const BeaconConstants c = Unwrap(PrecomputeBeaconConstants(p));
  EXPECT_FALSE(RunBaseline(p, &c, nullptr,
                           Config(BaselineMethod::kSfm, ThreatModel::Fixed(0)))
                   .ok());
  EXPECT_TRUE(RunBaseline(p, &c, nullptr,
                          Config(BaselineMethod::kSfm, ThreatModel::Adaptive(10)))
                  .ok());
}

int UniqueCandidates(const GenotypePanel& p, const BeaconConstants& c) {
  const auto cand = BeaconCandidates(p, c);
  int u = 0;
  for (int j = 0; j < p.num_snvs(); ++j) {
    u += cand[j] && p.carrier_count(Population::kDataset, j) == 1;
  }
  return u;
}

TEST(RfTest, ProbabilityExtremes) {
  const GenotypePanel p = MakePanel(ReleaseMode::kBeacon, 2000, 50, 50, 2);
  const BeaconConstants c = Unwrap(PrecomputeBeaconConstants(p));
  BaselineConfig cfg = Config(BaselineMethod::kRf, ThreatModel::Fixed(0));
  cfg.probability = 0.0;
  EXPECT_TRUE(Unwrap(RunBaseline(p, &c, nullptr, cfg)).flips.empty());
  cfg.probability = 1.0;
  EXPECT_EQ(static_cast<int>(Unwrap(RunBaseline(p, &c, nullptr, cfg)).flips.size()),
            UniqueCandidates(p, c));
  cfg.action = BaselineAction::kMask;
  const DefenseSolution m = Unwrap(RunBaseline(p, &c, nullptr, cfg));
  EXPECT_TRUE(m.flips.empty());
  EXPECT_EQ(static_cast<int>(m.masks.size()), UniqueCandidates(p, c));
}

TEST(RfTest, BinomialCount) {
  const GenotypePanel p = MakePanel(ReleaseMode::kBeacon, 3000, 60, 60, 3);
  const BeaconConstants c = Unwrap(PrecomputeBeaconConstants(p));
  const int u = UniqueCandidates(p, c);
  ASSERT_GT(u, 100);
  BaselineConfig cfg = Config(BaselineMethod::kRf, ThreatModel::Fixed(0));
  cfg.probability = 0.5;
  int within = 0;
  for (int seed = 0; seed < 40; ++seed) {
    cfg.seed = seed;
    const int k =
        static_cast<int>(Unwrap(RunBaseline(p, &c, nullptr, cfg)).flips.size());
    within += std::fabs(k - 0.5 * u) <= 4 * std::sqrt(u * 0.25);
  }
  EXPECT_GE(within, 38);
}

TEST(DpBeaconTest, FlipRate) {
  const GenotypePanel p = MakePanel(ReleaseMode::kBeacon, 20000, 100, 100, 4);
  const BeaconConstants c = Unwrap(PrecomputeBeaconConstants(p));
  double yes = 0;
  for (int j = 0; j < p.num_snvs(); ++j) yes += p.beacon_response(j);
  ASSERT_GT(yes, 5000);
  BaselineConfig cfg = Config(BaselineMethod::kDpBeacon, ThreatModel::Fixed(0));
  cfg.epsilon = 1.0;
  const double rate =
      Unwrap(RunBaseline(p, &c, nullptr, cfg)).flips.size() / yes;
  EXPECT_NEAR(rate, 1.0 / (1.0 + std::exp(1.0)), 0.015);
  cfg.epsilon = 0.0;
  EXPECT_NEAR(Unwrap(RunBaseline(p, &c, nullptr, cfg)).flips.size() / yes, 0.5,
              0.02);
  cfg.epsilon = 800.0;
  EXPECT_TRUE(Unwrap(RunBaseline(p, &c, nullptr, cfg)).flips.empty());
}

TEST(MigTest, FullPrivacyAndNoBetterThanSpgb) {
  for (int seed = 0; seed < 10; ++seed) {
    const GenotypePanel p = MakePanel(ReleaseMode::kBeacon, 8, 4, 10, 60 + seed);
    const BeaconConstants c = Unwrap(PrecomputeBeaconConstants(p));
    const ThreatModel m = ThreatModel::Fixed(-0.5);
    const DefenseSolution mig =
        Unwrap(RunBaseline(p, &c, nullptr, Config(BaselineMethod::kMig, m)));
    if (!mig.feasible) continue;
    EXPECT_DOUBLE_EQ(mig.privacy_pct, 100.0);
    SpgbConfig cfg;
    cfg.alpha = 0.5;
    cfg.model = m;
    cfg.restriction = ActionRestriction::kFlipOnly;
    // A large weight pushes SPG-B to full coverage too.
    cfg.w = 1e6;
    const DefenseSolution spgb = Unwrap(RunSpgb(p, c, cfg));
    if (spgb.privacy_pct == 100.0) {
      EXPECT_LE(mig.utility_pct, spgb.utility_pct + 1e-9);
    }
  }
}

TEST(MigTest, InfeasibleMaskOnly) {
  // Masking alone drives a carrier's score to at most 0.
  const GenotypePanel p = MakePanel(ReleaseMode::kBeacon, 50, 10, 10, 9);
  const BeaconConstants c = Unwrap(PrecomputeBeaconConstants(p));
  BaselineConfig cfg = Config(BaselineMethod::kMig, ThreatModel::Fixed(1.0));
  cfg.action = BaselineAction::kMask;
  const DefenseSolution s = Unwrap(RunBaseline(p, &c, nullptr, cfg));
  EXPECT_FALSE(s.feasible);
}

TEST(LinkageTest, UnlimitedBudgetReleasesAll) {
  const GenotypePanel p = MakePanel(ReleaseMode::kAaf, 50, 10, 10, 5);
  const LdIndex empty = EmptyLdIndex(50);
  BaselineConfig cfg = Config(BaselineMethod::kLinkage, ThreatModel::Fixed(0));
  cfg.privacy_budget = 0.0;
  const DefenseSolution s = Unwrap(RunBaseline(p, nullptr, &empty, cfg));
  EXPECT_TRUE(s.masks.empty());
}

TEST(LinkageTest, ReleasedSetIsLdFree) {
  const GenotypePanel p = MakePanel(ReleaseMode::kAaf, 100, 60, 60, 6, 10, 0.9);
  const LdIndex index = Unwrap(BuildLdIndex(p, 250, 0.2));
  BaselineConfig cfg = Config(BaselineMethod::kLinkage, ThreatModel::Fixed(0));
  cfg.privacy_budget = 0.0;
  const DefenseSolution s = Unwrap(RunBaseline(p, nullptr, &index, cfg));
  std::vector<int> released;
  for (int j = 0; j < 100; ++j) {
    if (!std::binary_search(s.masks.begin(), s.masks.end(), j)) {
      released.push_back(j);
    }
  }
  EXPECT_FALSE(released.empty());
  for (size_t a = 0; a < released.size(); ++a) {
    for (size_t b = a + 1; b < released.size(); ++b) {
      if (released[b] - released[a] > 250) continue;
      EXPECT_LE(LdCoefficient(p, released[a], released[b]), 0.2);
    }
  }
}

TEST(LinkageTest, BudgetIsRespected) {
  const GenotypePanel p = MakePanel(ReleaseMode::kAaf, 300, 40, 40, 7);
  const LdIndex empty = EmptyLdIndex(300);
  for (const double budget : {50.0, 90.0, 100.0}) {
    BaselineConfig cfg = Config(BaselineMethod::kLinkage, ThreatModel::Fixed(0));
    cfg.privacy_budget = budget;
    EXPECT_GE(Unwrap(RunBaseline(p, nullptr, &empty, cfg)).privacy_pct, budget);
  }
}

TEST(BaselineTest, ModeMismatchAndNames) {
  const GenotypePanel aaf = MakePanel(ReleaseMode::kAaf, 20, 5, 5, 1);
  EXPECT_FALSE(RunBaseline(aaf, nullptr, nullptr,
                           Config(BaselineMethod::kSf, ThreatModel::Fixed(0)))
                   .ok());
  EXPECT_EQ(Unwrap(ParseBaselineMethod("dpbeacon")), BaselineMethod::kDpBeacon);
  EXPECT_FALSE(ParseBaselineMethod("magic").ok());
  EXPECT_TRUE(IsBeaconBaseline(BaselineMethod::kRf));
  EXPECT_FALSE(IsBeaconBaseline(BaselineMethod::kLinkage));
}

}  // namespace
}  // namespace gpriv
