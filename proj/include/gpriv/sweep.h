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

// Parameter sweeps over methods and the CSV they produce.
//
// Method names: spgb, spgb-flip, spgb-mask, spgld, mig-flip, mig-mask, sf,
// sf-mask, sfm, sfm-mask, rf, rf-mask, dpbeacon, dpbeacon-mask (beacon
// panels) and spgr, dplaplace, maskonly, linkage (AAF panels).
//
// Seeds: the randomness of a record comes from
//   DeriveSeed(master, {HashName(family), bits(param), run})
// where the family groups methods that must see the same draws (spgr,
// dplaplace and maskonly share "spgr") and param is the method parameter
// (p, epsilon, budget, or 0). Records that differ only in alpha, w or the
// attacker therefore reuse the same draws.

#ifndef GPRIV_SWEEP_H_
#define GPRIV_SWEEP_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "gpriv/dataset.h"
#include "gpriv/ld.h"
#include "gpriv/lrt.h"
#include "gpriv/spgr.h"
#include "gpriv/threat.h"

namespace gpriv {

// n log-spaced values from lo to hi inclusive.
std::vector<double> LogSpace(double lo, double hi, int n);
// Defaults: beacon w in [0.01, 10], AAF w in [0.1, 10000], 13 points each.
std::vector<double> DefaultWeights(ReleaseMode mode);
std::vector<double> DefaultAlphas();
// Fixed thetas {-750, -250, 0, 1000} and adaptive K {5, 10}.
std::vector<ThreatModel> DefaultThreats();

struct SweepSpec {
  std::vector<std::string> methods;
  std::vector<double> alphas = DefaultAlphas();
  std::vector<double> weights;  // empty: DefaultWeights(panel mode)
  std::vector<ThreatModel> threats = DefaultThreats();
  std::vector<double> rf_probabilities = {0.1, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> dp_epsilons = {0.5, 1, 2, 3, 5, 8};
  std::vector<double> linkage_budgets = {50, 75, 90, 100};
  uint64_t seed = 1;
  // Repetitions averaged for randomized methods.
  int runs = 5;
  // Trajectory settings for spgr, dplaplace and maskonly.
  SpgrConfig spgr;
  int threads = 1;
};

struct SweepRecord {
  std::string method;
  std::string mode;  // both, flip, mask, or aaf
  double alpha = 0.0;
  double w = 0.0;
  std::string threat;  // fixed or adaptive
  double threshold_param = 0.0;
  std::optional<double> param;
  uint64_t seed = 0;
  int runs = 1;
  double utility_pct = 0.0;
  double privacy_pct = 0.0;
  double objective = 0.0;
  double num_masked = 0.0;
  double num_flipped = 0.0;
  double noise_l1 = 0.0;
  bool feasible = true;
  // Not part of the CSV, so identical sweeps give identical bytes.
  double wall_seconds = 0.0;
};

struct SweepResult {
  std::vector<SweepRecord> records;  // grid order
  std::vector<std::string> skipped;  // reasons
};

// `consts` is needed for beacon panels, `ld_index` for spgld and linkage.
absl::StatusOr<SweepResult> RunSweep(const SweepSpec& spec,
                                     const GenotypePanel& panel,
                                     const BeaconConstants* consts,
                                     const LdIndex* ld_index);

std::string CsvHeader();
std::string CsvRow(const SweepRecord& record);
std::string FormatCsv(std::span<const SweepRecord> records);
std::string FormatTimings(std::span<const SweepRecord> records);

struct FrontierPoint {
  double privacy = 0.0;
  double utility = 0.0;
};

std::vector<FrontierPoint> PointsOf(
    std::span<const SweepRecord> records,
    const std::function<bool(const SweepRecord&)>& keep);

struct DominanceReport {
  int checked = 0;
  int dominated = 0;
  std::vector<FrontierPoint> failures;  // points of B nothing in A matches

  double fraction() const {
    return checked == 0 ? 1.0 : static_cast<double>(dominated) / checked;
  }
  bool all() const { return dominated == checked; }
};

// kPoints: A is the set of its points. kSegments: A also reaches every
// point on a segment between two of its points, which is what choosing
// between two solutions at random achieves on average. Averaged records of a
// randomized method are such mixtures themselves.
enum class FrontierShape { kPoints, kSegments };

// For every point of B: does A reach at least its privacy with at least its
// utility? `tolerance` absorbs rounding in the percentages.
DominanceReport ParetoCheck(std::span<const FrontierPoint> a,
                            std::span<const FrontierPoint> b,
                            double tolerance = 1e-9,
                            FrontierShape shape = FrontierShape::kPoints);

}  // namespace gpriv

#endif  // GPRIV_SWEEP_H_
