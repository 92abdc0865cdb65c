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

// Defense output and the one metrics path every method reports through.
//
//   U        = alpha * ||delta||_1 + (1 - alpha) * |M| - w * |Z|
//   utility% = 100 * (1 - (alpha * ||delta||_1 + (1 - alpha) * |M|) / m)
//   privacy% = 100 * |Z| / n
//
// For beacons ||delta||_1 is the number of flips.

#ifndef GPRIV_SOLUTION_H_
#define GPRIV_SOLUTION_H_

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "gpriv/dataset.h"
#include "gpriv/ld.h"
#include "gpriv/lrt.h"
#include "gpriv/threat.h"

namespace gpriv {

struct DefenseSolution {
  std::string method;
  ReleaseMode mode = ReleaseMode::kBeacon;
  double alpha = 0.5;
  double w = 1.0;
  std::vector<int> flips;     // ascending
  std::vector<int> masks;     // ascending
  std::vector<double> delta;  // AAF: length m, 0 on masked SNVs; else empty
  // False when a method that must reach full coverage could not.
  bool feasible = true;

  // Filled by EvaluateSolution.
  double noise_l1 = 0.0;
  double objective = 0.0;
  double utility_pct = 100.0;
  double privacy_pct = 0.0;
  double threshold = 0.0;
  std::vector<int> covered;
  std::string attack_label = "standard";
};

double Objective(double alpha, double w, double noise_l1, int num_masked,
                 int num_covered);
double UtilityPct(double alpha, double noise_l1, int num_masked, int num_snvs);

// Builds the release a solution describes and checks its invariants.
absl::StatusOr<ReleaseState> ApplySolution(const GenotypePanel& panel,
                                           const DefenseSolution& solution);

// Recomputes scores from scratch under `model` and fills the metric fields.
absl::Status EvaluateSolution(const GenotypePanel& panel,
                              const BeaconConstants* consts,
                              const ThreatModel& model, DefenseSolution& sol,
                              const LdIndex* ld_index = nullptr);

// Fills the sets of `sol` from a release.
void CaptureState(const ReleaseState& state, DefenseSolution& sol);

std::string SolutionToJson(const DefenseSolution& sol);
absl::StatusOr<DefenseSolution> SolutionFromJson(const std::string& text);
absl::Status SaveSolution(const DefenseSolution& sol, const std::string& path);
absl::StatusOr<DefenseSolution> LoadSolution(const std::string& path);

}  // namespace gpriv

#endif  // GPRIV_SOLUTION_H_
