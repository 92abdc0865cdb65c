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

// Likelihood-ratio membership scores for Beacon and allele-frequency
// releases.
//
// Beacon score of individual i, with released responses x' (after flips):
//
//   L_i = sum_{j unmasked} d_ij * (x'_j * A_j + (1 - x'_j) * B_j)
//   A_j = log((1 - R_n) / (1 - gamma * R_{n-1}))
//   B_j = log(R_n / (gamma * R_{n-1}))
//   R_k = (1 - p̄_j)^(2k)
//
// AAF score, with released frequencies x'_j = x_j + delta_j:
//
//   L_i = sum_{j unmasked} d_ij * log(p̄_j / x'_j)
//                        + (1 - d_ij) * log((1 - p̄_j) / (1 - x'_j))
//
// A low score means the individual looks like a member of the dataset.

#ifndef GPRIV_LRT_H_
#define GPRIV_LRT_H_

#include <cmath>
#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "gpriv/dataset.h"

namespace gpriv {

inline constexpr double kDefaultSequencingError = 1e-6;

struct BeaconConstants {
  double gamma = kDefaultSequencingError;
  int num_individuals = 0;
  std::vector<double> r_n;   // (1 - p̄_j)^(2n)
  std::vector<double> r_n1;  // (1 - p̄_j)^(2(n-1))
  std::vector<double> a;     // A_j; 0 where degenerate
  std::vector<double> b;     // B_j
  // p̄_j = 0 makes A_j = log 0. Such SNVs never enter a flip or mask
  // candidate set and score through the B term only.
  std::vector<uint8_t> degenerate;

  int num_snvs() const { return static_cast<int>(a.size()); }
  // Per-carrier score change for flipping / masking a yes response.
  double flip_gain(int j) const { return b[j] - a[j]; }
  double mask_gain(int j) const { return -a[j]; }
};

// Requires 0 < gamma < 0.25 and a beacon-mode panel.
absl::StatusOr<BeaconConstants> PrecomputeBeaconConstants(
    const GenotypePanel& panel, double gamma = kDefaultSequencingError);

// SNVs a beacon defense may flip or mask: yes responses with finite A_j.
std::vector<uint8_t> BeaconCandidates(const GenotypePanel& panel,
                                      const BeaconConstants& consts);

// Current summary release plus the defense applied to it. Sets are stored as
// per-SNV indicators.
struct ReleaseState {
  ReleaseMode mode = ReleaseMode::kBeacon;
  // Original release: beacon responses (0/1) or AAFs clipped to
  // [kMinAaf, kMaxAaf].
  std::vector<double> x;
  std::vector<uint8_t> masked;
  std::vector<uint8_t> flipped;  // beacon only
  std::vector<double> delta;     // aaf only; 0 on masked SNVs

  static ReleaseState Initial(const GenotypePanel& panel);

  int num_snvs() const { return static_cast<int>(x.size()); }
  // Value the attacker sees for an unmasked SNV.
  double released(int j) const {
    if (mode == ReleaseMode::kBeacon) return flipped[j] ? 0.0 : x[j];
    return x[j] + delta[j];
  }
  std::vector<int> MaskSet() const;
  std::vector<int> FlipSet() const;
  int num_masked() const;
  int num_flipped() const;
  // ||delta||_1 over unmasked SNVs; the flip count for beacons.
  double NoiseL1() const;
};

// Structural checks: sizes match the panel, M and F are disjoint, only yes
// responses are flipped, and (AAF) unmasked released values lie inside
// [kMinAaf, kMaxAaf].
absl::Status ValidateState(const GenotypePanel& panel,
                           const ReleaseState& state);

absl::StatusOr<std::vector<double>> BeaconScores(const GenotypePanel& panel,
                                                 const BeaconConstants& consts,
                                                 const ReleaseState& state,
                                                 Population who);

absl::StatusOr<std::vector<double>> AafScores(const GenotypePanel& panel,
                                              const ReleaseState& state,
                                              Population who);

// Dispatches on state.mode; `consts` may be null in AAF mode.
absl::StatusOr<std::vector<double>> Scores(const GenotypePanel& panel,
                                           const BeaconConstants* consts,
                                           const ReleaseState& state,
                                           Population who);

// p̄_j as used by the AAF test, clipped to [kMinAaf, kMaxAaf].
double ClampedReferenceAaf(const GenotypePanel& panel, int j);

// A(x) = log(p̄/x) and B(x) = log((1-p̄)/(1-x)).
inline double AafCarrierTerm(double ref_aaf, double released) {
  return std::log(ref_aaf / released);
}
inline double AafNonCarrierTerm(double ref_aaf, double released) {
  return std::log((1.0 - ref_aaf) / (1.0 - released));
}

enum class MarginalKind { kFlip, kMask };

// Change in L_i from applying one more flip or mask to SNV j of the current
// state: carrier[j] when d_ij = 1, non_carrier[j] when d_ij = 0. Entries are
// 0 for SNVs where the action does not apply (already masked, or a flip of a
// response that is not a released yes).
struct MarginalTable {
  MarginalKind kind = MarginalKind::kMask;
  std::vector<double> carrier;
  std::vector<double> non_carrier;

  double at(bool carries, int j) const {
    return carries ? carrier[j] : non_carrier[j];
  }
  // (1/|who|) * sum_i Delta_ij over the chosen population.
  std::vector<double> Average(const GenotypePanel& panel, Population who) const;
};

// Beacon: Delta^F_ij = d_ij (B_j - A_j), Delta^M_ij = -d_ij A_j on yes
// responses. AAF masks: -d_ij A(x'_j) - (1 - d_ij) B(x'_j). Flips are
// rejected in AAF mode.
absl::StatusOr<MarginalTable> MarginalContributions(
    const GenotypePanel& panel, const BeaconConstants* consts,
    const ReleaseState& state, MarginalKind kind);

}  // namespace gpriv

#endif  // GPRIV_LRT_H_
