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

// Comparison defenses. Every one of them reports through EvaluateSolution.

#ifndef GPRIV_BASELINES_H_
#define GPRIV_BASELINES_H_

#include <cstdint>
#include <string_view>

#include "absl/status/statusor.h"
#include "gpriv/dataset.h"
#include "gpriv/ld.h"
#include "gpriv/lrt.h"
#include "gpriv/solution.h"
#include "gpriv/spgr.h"
#include "gpriv/threat.h"

namespace gpriv {

enum class BaselineMethod {
  kSf,         // strongest-first with local search
  kSfm,        // kSf against the adaptive attacker
  kRf,         // random action on unique alleles
  kDpBeacon,   // randomized response
  kMig,        // greedy to full coverage
  kMaskOnly,   // SPG-R without noise
  kLinkage,    // LD-independent subset release
  kDpLaplace,  // SPG-R without masking
};

absl::StatusOr<BaselineMethod> ParseBaselineMethod(std::string_view name);
std::string_view BaselineMethodName(BaselineMethod method);
bool IsBeaconBaseline(BaselineMethod method);

enum class BaselineAction { kFlip, kMask };
absl::StatusOr<BaselineAction> ParseBaselineAction(std::string_view name);

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::kSf;
  BaselineAction action = BaselineAction::kFlip;
  ThreatModel model;
  // Only used for the reported objective, except by the SPG-R based methods
  // which pick their best point for this (alpha, w).
  double alpha = 0.5;
  double w = 1.0;
  double probability = 0.5;  // RF
  double epsilon = 1.0;      // DP-beacon
  // Linkage: minimum privacy% the released subset must keep.
  double privacy_budget = 100.0;
  uint64_t seed = 1;
  // DPLaplace / MaskOnly trajectory settings (epsilons, t, sensitivity).
  SpgrConfig spgr;
};

// Dispatches on config.method. Beacon methods need `consts`; Linkage needs
// `ld_index`.
absl::StatusOr<DefenseSolution> RunBaseline(const GenotypePanel& panel,
                                            const BeaconConstants* consts,
                                            const LdIndex* ld_index,
                                            const BaselineConfig& config);

absl::StatusOr<DefenseSolution> RunSf(const GenotypePanel& panel,
                                      const BeaconConstants& consts,
                                      const BaselineConfig& config);
absl::StatusOr<DefenseSolution> RunRf(const GenotypePanel& panel,
                                      const BeaconConstants& consts,
                                      const BaselineConfig& config);
// Each yes response is actioned with probability 1 / (1 + e^epsilon).
absl::StatusOr<DefenseSolution> RunDpBeacon(const GenotypePanel& panel,
                                            const BeaconConstants& consts,
                                            const BaselineConfig& config);
absl::StatusOr<DefenseSolution> RunMig(const GenotypePanel& panel,
                                       const BeaconConstants& consts,
                                       const BaselineConfig& config);
absl::StatusOr<DefenseSolution> RunLinkage(const GenotypePanel& panel,
                                           const LdIndex& ld_index,
                                           const BaselineConfig& config);
absl::StatusOr<DefenseSolution> RunDpLaplace(const GenotypePanel& panel,
                                             const BaselineConfig& config);
absl::StatusOr<DefenseSolution> RunMaskOnly(const GenotypePanel& panel,
                                            const BaselineConfig& config);

}  // namespace gpriv

#endif  // GPRIV_BASELINES_H_
