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

// Alternating mask + Laplace noise defense for allele-frequency releases.
//
// Every epsilon in the candidate set owns one trajectory. At epoch 0 the
// worker noises every SNV, scores the release and fixes its masking order
// (descending average mask marginal, measured on its own noised release).
// Each later epoch masks the next t SNVs of that order and re-noises the rest
// with scale |Q \ M| / (n epsilon), or avg_hamming / (n epsilon) under
// bounded sensitivity. Every (epsilon, epoch) point is a candidate; the
// lowest objective wins, ties going to the larger epsilon and then to fewer
// masks.

#ifndef GPRIV_SPGR_H_
#define GPRIV_SPGR_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "gpriv/dataset.h"
#include "gpriv/solution.h"
#include "gpriv/threat.h"

namespace gpriv {

inline const std::vector<double>& DefaultEpsilons() {
  static const std::vector<double> kEpsilons = {1e4, 5e4, 1e5, 5e5,
                                                1e6, 5e6, 1e7};
  return kEpsilons;
}
inline constexpr int kDefaultMaskStep = 1000;
inline constexpr double kNoiseFree = std::numeric_limits<double>::infinity();

enum class Sensitivity { kUnbounded, kBounded };
absl::StatusOr<Sensitivity> ParseSensitivity(std::string_view name);

enum class SpgrVariant { kSequential, kBinarySearch, kParallel };
absl::StatusOr<SpgrVariant> ParseSpgrVariant(std::string_view name);

// Average Hamming distance between dataset and reference genomes,
// restricted to the SNVs with active[j] != 0 (all SNVs when empty).
double AverageHamming(const GenotypePanel& panel,
                      std::span<const uint8_t> active = {});

// sensitivity / (n * epsilon).
double LaplaceScale(double sensitivity, int num_individuals, double epsilon);

struct NoiseDraw {
  double epsilon = 0.0;
  double scale = 0.0;
  std::vector<double> delta;  // raw Laplace(0, scale) samples, not clipped
};

// m_active i.i.d. Laplace draws. `sensitivity` is m_active when unbounded,
// else `avg_hamming`.
absl::StatusOr<NoiseDraw> LaplaceNoise(int m_active, int num_individuals,
                                       double epsilon, Sensitivity mode,
                                       double avg_hamming, uint64_t seed);

struct SpgrConfig {
  double alpha = 0.5;
  double w = 1.0;
  ThreatModel model;
  int t = kDefaultMaskStep;
  std::vector<double> epsilons = DefaultEpsilons();
  Sensitivity sensitivity = Sensitivity::kUnbounded;
  // Bounded numerator; computed from the panel when unset.
  std::optional<double> avg_hamming;
  SpgrVariant variant = SpgrVariant::kParallel;
  uint64_t seed = 1;
  int run = 0;
  // DPLaplace turns masking off; MaskOnly turns noise off.
  bool enable_noise = true;
  bool enable_masking = true;
  // Also run the noise-free trajectory, so the candidates include the pure
  // masking points.
  bool include_noise_free = true;
  // Keep the epoch-0 draw for the whole trajectory instead of redrawing.
  // The unmasked noise then corresponds to a proportionally smaller
  // epsilon, and scores can be updated incrementally.
  bool noise_reuse = false;
  // Worker threads for the parallel variant; 0 = one per trajectory.
  int threads = 0;
  // Binary search stops when hi / lo falls below this.
  double binary_ratio = 1.05;
  // Stop each trajectory after this many epochs (for timing probes).
  std::optional<int> max_epochs;
};

struct SpgrCandidate {
  double epsilon = 0.0;  // trajectory epsilon; kNoiseFree for none
  int epoch = 0;
  double noise_l1 = 0.0;
  int num_masked = 0;
  int num_covered = 0;
};

struct SpgrResult {
  DefenseSolution solution;
  // Every point explored, ordered by trajectory and epoch.
  std::vector<SpgrCandidate> log;
  size_t best = 0;  // index into log
};

absl::StatusOr<SpgrResult> RunSpgr(const GenotypePanel& panel,
                                   const SpgrConfig& config);

// Index of the candidate minimizing the objective for (alpha, w), with the
// same tie order RunSpgr uses.
size_t BestCandidate(std::span<const SpgrCandidate> log, double alpha,
                     double w);

}  // namespace gpriv

#endif  // GPRIV_SPGR_H_
