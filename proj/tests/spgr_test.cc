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

#include "gpriv/spgr.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <gtest/gtest.h>

#include "gpriv/baselines.h"
#include "test_util.h"

namespace gpriv {
namespace {

using testing::MakePanel;
using testing::Unwrap;

SpgrConfig Config(double alpha, double w, ThreatModel model) {
  SpgrConfig c;
  c.alpha = alpha;
  c.w = w;
  c.model = model;
  c.seed = 11;
  return c;
}

TEST(LaplaceTest, Scale) {
  EXPECT_DOUBLE_EQ(LaplaceScale(1000, 100, 10), 1.0);
  const NoiseDraw d =
      Unwrap(LaplaceNoise(1000, 100, 10, Sensitivity::kUnbounded, 0, 3));
  EXPECT_EQ(d.delta.size(), 1000u);
  EXPECT_DOUBLE_EQ(d.scale, 1.0);
  const NoiseDraw b =
      Unwrap(LaplaceNoise(1000, 100, 10, Sensitivity::kBounded, 250, 3));
  EXPECT_DOUBLE_EQ(b.scale, 0.25);
  EXPECT_FALSE(LaplaceNoise(10, 10, 0.0, Sensitivity::kUnbounded, 0, 1).ok());
}

TEST(LaplaceTest, ShrinksWithEpsilon) {
  double previous = 1e300;
  for (const double eps : {1.0, 10.0, 100.0}) {
    double sum = 0.0;
    const NoiseDraw d =
        Unwrap(LaplaceNoise(100000, 100, eps, Sensitivity::kUnbounded, 0, 5));
    for (const double v : d.delta) sum += std::fabs(v);
    const double mean = sum / d.delta.size();
    EXPECT_NEAR(mean, d.scale, 0.02 * d.scale);
    EXPECT_LT(mean, previous);
    previous = mean;
  }
}

TEST(AverageHammingTest, MatchesPairwiseDistances) {
  const GenotypePanel p = MakePanel(ReleaseMode::kAaf, 40, 7, 9, 3);
  double total = 0.0;
  for (int a = 0; a < p.num_individuals(); ++a) {
    for (int b = 0; b < p.num_reference(); ++b) {
      for (int j = 0; j < p.num_snvs(); ++j) {
        total += p.carries(Population::kDataset, a, j) !=
                 p.carries(Population::kReference, b, j);
      }
    }
  }
  EXPECT_NEAR(AverageHamming(p), total / (7 * 9), 1e-12);
}

TEST(SpgrTest, ZeroWeightReleasesLeastNoise) {
  const GenotypePanel p = MakePanel(ReleaseMode::kAaf, 60, 10, 10, 4);
  const SpgrResult r =
      Unwrap(RunSpgr(p, Config(0.5, 0.0, ThreatModel::Fixed(0.0))));
  EXPECT_TRUE(r.solution.masks.empty());
  // The noise-free trajectory makes "do nothing" a candidate.
  EXPECT_EQ(r.solution.noise_l1, 0.0);
  EXPECT_EQ(r.solution.objective, 0.0);

  SpgrConfig no_free = Config(0.5, 0.0, ThreatModel::Fixed(0.0));
  no_free.include_noise_free = false;
  const SpgrResult n = Unwrap(RunSpgr(p, no_free));
  EXPECT_TRUE(n.solution.masks.empty());
  EXPECT_EQ(r.log.size(), n.log.size() + n.log.size() / 7);
  for (const SpgrCandidate& c : n.log) {
    if (c.num_masked == 0) EXPECT_GE(c.noise_l1, n.solution.noise_l1);
  }
}

TEST(SpgrTest, OneEpochMasksEverything) {
  const int m = 30;
  const GenotypePanel p = MakePanel(ReleaseMode::kAaf, m, 8, 8, 9);
  SpgrConfig cfg = Config(0.7, 1.0, ThreatModel::Fixed(0.0));
  cfg.t = m;
  const SpgrResult r = Unwrap(RunSpgr(p, cfg));
  for (const double eps : cfg.epsilons) {
    int snapshots = 0;
    for (const SpgrCandidate& c : r.log) {
      if (c.epsilon != eps) continue;
      ++snapshots;
      if (c.epoch == 1) {
        EXPECT_EQ(c.num_masked, m);
        EXPECT_EQ(c.num_covered, 8);
      }
    }
    EXPECT_EQ(snapshots, 2);
  }
  DefenseSolution all;
  all.mode = ReleaseMode::kAaf;
  all.alpha = 0.7;
  all.w = 1.0;
  all.delta.assign(m, 0.0);
  for (int j = 0; j < m; ++j) all.masks.push_back(j);
  ASSERT_TRUE(EvaluateSolution(p, nullptr, ThreatModel::Fixed(0.0), all).ok());
  EXPECT_DOUBLE_EQ(all.privacy_pct, 100.0);
  EXPECT_NEAR(all.utility_pct, 70.0, 1e-9);
}

std::vector<std::tuple<double, int, double, int, int>> Sorted(
    const std::vector<SpgrCandidate>& log) {
  std::vector<std::tuple<double, int, double, int, int>> out;
  for (const SpgrCandidate& c : log) {
    out.emplace_back(c.epsilon, c.epoch, c.noise_l1, c.num_masked,
                     c.num_covered);
  }
  std::sort(out.begin(), out.end());
  return out;
}

TEST(SpgrTest, VariantsExploreTheSameTrajectories) {
  const GenotypePanel p = MakePanel(ReleaseMode::kAaf, 30, 8, 8, 10);
  for (const ThreatModel& m :
       {ThreatModel::Fixed(0.0), ThreatModel::Adaptive(25)}) {
    SpgrConfig cfg = Config(0.5, 2.0, m);
    cfg.t = 4;
    cfg.variant = SpgrVariant::kSequential;
    const SpgrResult seq = Unwrap(RunSpgr(p, cfg));
    cfg.variant = SpgrVariant::kParallel;
    cfg.threads = 3;
    const SpgrResult par = Unwrap(RunSpgr(p, cfg));
    EXPECT_EQ(Sorted(seq.log), Sorted(par.log));
    EXPECT_EQ(seq.solution.objective, par.solution.objective);
    EXPECT_EQ(seq.solution.masks, par.solution.masks);
    EXPECT_EQ(seq.solution.delta, par.solution.delta);
  }
}

TEST(SpgrTest, ResultIsBestCandidateAndRecomputes) {
  const GenotypePanel p = MakePanel(ReleaseMode::kAaf, 200, 30, 30, 12);
  for (const double w : {0.1, 10.0, 1000.0}) {
    SpgrConfig cfg = Config(0.75, w, ThreatModel::Adaptive(10));
    cfg.t = 20;
    const SpgrResult r = Unwrap(RunSpgr(p, cfg));
    EXPECT_EQ(r.best, BestCandidate(r.log, 0.75, w));
    const SpgrCandidate& best = r.log[r.best];
    EXPECT_EQ(static_cast<int>(r.solution.masks.size()), best.num_masked);
    DefenseSolution again = r.solution;
    ASSERT_TRUE(EvaluateSolution(p, nullptr, cfg.model, again).ok());
    EXPECT_NEAR(again.objective, r.solution.objective,
                1e-9 * std::max(1.0, std::fabs(again.objective)));
    EXPECT_EQ(static_cast<int>(again.covered.size()), best.num_covered);
  }
}

TEST(SpgrTest, NoiseReuseAndBinarySearchRun) {
  const GenotypePanel p = MakePanel(ReleaseMode::kAaf, 100, 20, 20, 13);
  SpgrConfig cfg = Config(0.5, 50.0, ThreatModel::Fixed(0.0));
  cfg.t = 10;
  cfg.noise_reuse = true;
  const SpgrResult reuse = Unwrap(RunSpgr(p, cfg));
  DefenseSolution again = reuse.solution;
  ASSERT_TRUE(EvaluateSolution(p, nullptr, cfg.model, again).ok());
  EXPECT_NEAR(again.objective, reuse.solution.objective, 1e-6);
  cfg.noise_reuse = false;
  cfg.variant = SpgrVariant::kBinarySearch;
  const SpgrResult bin = Unwrap(RunSpgr(p, cfg));
  EXPECT_FALSE(bin.log.empty());
}

TEST(SpgrTest, SupersetOfBaselines) {
  const GenotypePanel p = MakePanel(ReleaseMode::kAaf, 30, 8, 8, 14);
  for (const double w : {0.1, 1.0, 10.0, 100.0, 1000.0}) {
    BaselineConfig b;
    b.model = ThreatModel::Fixed(0.0);
    b.alpha = 0.5;
    b.w = w;
    b.spgr = Config(0.5, w, b.model);
    b.spgr.t = 3;
    const SpgrResult r = Unwrap(RunSpgr(p, b.spgr));
    b.method = BaselineMethod::kDpLaplace;
    const DefenseSolution dp = Unwrap(RunBaseline(p, nullptr, nullptr, b));
    b.method = BaselineMethod::kMaskOnly;
    const DefenseSolution mo = Unwrap(RunBaseline(p, nullptr, nullptr, b));
    EXPECT_LE(r.solution.objective,
              std::min(dp.objective, mo.objective) + 1e-9);
  }
}

TEST(SpgrTest, RejectsBadConfig) {
  const GenotypePanel p = MakePanel(ReleaseMode::kAaf, 10, 4, 4, 1);
  SpgrConfig cfg = Config(0.5, 1.0, ThreatModel::Fixed(0.0));
  cfg.epsilons = {};
  EXPECT_FALSE(RunSpgr(p, cfg).ok());
  cfg = Config(1.0, 1.0, ThreatModel::Fixed(0.0));
  EXPECT_FALSE(RunSpgr(p, cfg).ok());
  const GenotypePanel b = MakePanel(ReleaseMode::kBeacon, 10, 4, 4, 1);
  EXPECT_FALSE(RunSpgr(b, Config(0.5, 1.0, ThreatModel::Fixed(0.0))).ok());
  EXPECT_EQ(Unwrap(ParseSpgrVariant("binary")), SpgrVariant::kBinarySearch);
  EXPECT_EQ(Unwrap(ParseSensitivity("bounded")), Sensitivity::kBounded);
}

}  // namespace
}  // namespace gpriv
