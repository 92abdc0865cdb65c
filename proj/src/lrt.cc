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

#include "gpriv/lrt.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace gpriv {

absl::StatusOr<BeaconConstants> PrecomputeBeaconConstants(
    const GenotypePanel& panel, double gamma) {
  if (panel.mode() != ReleaseMode::kBeacon) {
    return absl::FailedPreconditionError("beacon constants need a beacon panel");
  }
  if (!(gamma > 0.0 && gamma < 0.25)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sequencing error rate must lie in (0, 0.25), got ", gamma));
  }
  const int m = panel.num_snvs();
  const int n = panel.num_individuals();
  BeaconConstants c;
  c.gamma = gamma;
  c.num_individuals = n;
  c.r_n.resize(m);
  c.r_n1.resize(m);
  c.a.resize(m);
  c.b.resize(m);
  c.degenerate.assign(m, 0);
  const double log_gamma = std::log(gamma);
  for (int j = 0; j < m; ++j) {
    const double ref = panel.aaf(Population::kReference, j);
    const double log_keep = std::log1p(-ref);  // log(1 - p̄)
    const double log_rn = 2.0 * n * log_keep;
    const double log_rn1 = 2.0 * (n - 1) * log_keep;
    c.r_n[j] = std::exp(log_rn);
    c.r_n1[j] = std::exp(log_rn1);
    c.b[j] = log_rn - log_gamma - log_rn1;
    if (ref <= 0.0) {
      c.degenerate[j] = 1;
      c.a[j] = 0.0;
    } else {
      c.a[j] = std::log(-std::expm1(log_rn)) - std::log1p(-gamma * c.r_n1[j]);
    }
  }
  return c;
}

std::vector<uint8_t> BeaconCandidates(const GenotypePanel& panel,
                                      const BeaconConstants& consts) {
  std::vector<uint8_t> out(panel.num_snvs(), 0);
  for (int j = 0; j < panel.num_snvs(); ++j) {
    out[j] = panel.beacon_response(j) && !consts.degenerate[j];
  }
  return out;
}

ReleaseState ReleaseState::Initial(const GenotypePanel& panel) {
  ReleaseState s;
  const int m = panel.num_snvs();
  s.mode = panel.mode();
  s.x.resize(m);
  s.masked.assign(m, 0);
  s.flipped.assign(m, 0);
  s.delta.assign(m, 0.0);
  for (int j = 0; j < m; ++j) {
    s.x[j] = s.mode == ReleaseMode::kBeacon
                 ? (panel.beacon_response(j) ? 1.0 : 0.0)
                 : std::clamp(panel.aaf(Population::kDataset, j), kMinAaf,
                              kMaxAaf);
  }
  return s;
}

std::vector<int> ReleaseState::MaskSet() const {
  std::vector<int> out;
  for (int j = 0; j < num_snvs(); ++j) {
    if (masked[j]) out.push_back(j);
  }
  return out;
}

std::vector<int> ReleaseState::FlipSet() const {
  std::vector<int> out;
  for (int j = 0; j < num_snvs(); ++j) {
    if (flipped[j]) out.push_back(j);
  }
  return out;
}

int ReleaseState::num_masked() const {
  return static_cast<int>(std::count(masked.begin(), masked.end(), 1));
}

int ReleaseState::num_flipped() const {
  return static_cast<int>(std::count(flipped.begin(), flipped.end(), 1));
}

double ReleaseState::NoiseL1() const {
  if (mode == ReleaseMode::kBeacon) return num_flipped();
  double sum = 0.0;
  for (int j = 0; j < num_snvs(); ++j) {
    if (!masked[j]) sum += std::fabs(delta[j]);
  }
  return sum;
}

absl::Status ValidateState(const GenotypePanel& panel,
                           const ReleaseState& state) {
  const size_t m = panel.num_snvs();
  if (state.mode != panel.mode()) {
    return absl::InvalidArgumentError("release mode does not match the panel");
  }
  if (state.x.size() != m || state.masked.size() != m ||
      state.flipped.size() != m || state.delta.size() != m) {
    return absl::InvalidArgumentError("release state size mismatch");
  }
  for (size_t j = 0; j < m; ++j) {
    if (state.masked[j] && state.flipped[j]) {
      return absl::InvalidArgumentError(
          absl::StrCat("SNV ", j, " is both masked and flipped"));
    }
    if (state.mode == ReleaseMode::kBeacon) {
      if (state.flipped[j] && state.x[j] != 1.0) {
        return absl::InvalidArgumentError(
            absl::StrCat("SNV ", j, " flipped without a yes response"));
      }
    } else {
      if (state.flipped[j]) {
        return absl::InvalidArgumentError("flips are beacon-only");
      }
      if (!state.masked[j]) {
        const double v = state.released(j);
        // x + (clip(x + n) - x) can land one ulp outside the clip range.
        if (!(v >= kMinAaf - 1e-12 && v <= kMaxAaf + 1e-12)) {
          return absl::OutOfRangeError(absl::StrCat(
              "released AAF ", v, " at SNV ", j, " outside [", kMinAaf, ", ",
              kMaxAaf, "]"));
        }
      }
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<double>> BeaconScores(const GenotypePanel& panel,
                                                 const BeaconConstants& consts,
                                                 const ReleaseState& state,
                                                 Population who) {
  if (state.mode != ReleaseMode::kBeacon) {
    return absl::InvalidArgumentError("beacon scores need a beacon release");
  }
  if (absl::Status s = ValidateState(panel, state); !s.ok()) return s;
  const int m = panel.num_snvs();
  // Per-SNV term for a carrier.
  std::vector<double> term(m, 0.0);
  for (int j = 0; j < m; ++j) {
    if (state.masked[j]) continue;
    term[j] = state.released(j) == 1.0 ? consts.a[j] : consts.b[j];
  }
  std::vector<double> scores(panel.size(who), 0.0);
  for (int i = 0; i < panel.size(who); ++i) {
    const auto row = panel.row(who, i);
    double sum = 0.0;
    for (int j = 0; j < m; ++j) {
      if (row[j]) sum += term[j];
    }
    scores[i] = sum;
  }
  return scores;
}

double ClampedReferenceAaf(const GenotypePanel& panel, int j) {
  return std::clamp(panel.aaf(Population::kReference, j), kMinAaf, kMaxAaf);
}

absl::StatusOr<std::vector<double>> AafScores(const GenotypePanel& panel,
                                              const ReleaseState& state,
                                              Population who) {
  if (state.mode != ReleaseMode::kAaf) {
    return absl::InvalidArgumentError("AAF scores need an AAF release");
  }
  if (absl::Status s = ValidateState(panel, state); !s.ok()) return s;
  const int m = panel.num_snvs();
  std::vector<double> carrier(m, 0.0);
  std::vector<double> non_carrier(m, 0.0);
  for (int j = 0; j < m; ++j) {
    if (state.masked[j]) continue;
    const double ref = ClampedReferenceAaf(panel, j);
    carrier[j] = AafCarrierTerm(ref, state.released(j));
    non_carrier[j] = AafNonCarrierTerm(ref, state.released(j));
  }
  std::vector<double> scores(panel.size(who), 0.0);
  for (int i = 0; i < panel.size(who); ++i) {
    const auto row = panel.row(who, i);
    double sum = 0.0;
    for (int j = 0; j < m; ++j) sum += row[j] ? carrier[j] : non_carrier[j];
    scores[i] = sum;
  }
  return scores;
}

absl::StatusOr<std::vector<double>> Scores(const GenotypePanel& panel,
                                           const BeaconConstants* consts,
                                           const ReleaseState& state,
                                           Population who) {
  if (state.mode == ReleaseMode::kBeacon) {
    if (consts == nullptr) {
      return absl::InvalidArgumentError("beacon scoring needs constants");
    }
    return BeaconScores(panel, *consts, state, who);
  }
  return AafScores(panel, state, who);
}

std::vector<double> MarginalTable::Average(const GenotypePanel& panel,
                                           Population who) const {
  const int size = panel.size(who);
  std::vector<double> avg(carrier.size());
  for (size_t j = 0; j < carrier.size(); ++j) {
    const int c = panel.carrier_count(who, static_cast<int>(j));
    avg[j] = (c * carrier[j] + (size - c) * non_carrier[j]) / size;
  }
  return avg;
}

absl::StatusOr<MarginalTable> MarginalContributions(
    const GenotypePanel& panel, const BeaconConstants* consts,
    const ReleaseState& state, MarginalKind kind) {
  if (absl::Status s = ValidateState(panel, state); !s.ok()) return s;
  const int m = panel.num_snvs();
  MarginalTable table;
  table.kind = kind;
  table.carrier.assign(m, 0.0);
  table.non_carrier.assign(m, 0.0);
  if (state.mode == ReleaseMode::kBeacon) {
    if (consts == nullptr) {
      return absl::InvalidArgumentError("beacon marginals need constants");
    }
    for (int j = 0; j < m; ++j) {
      if (state.masked[j]) continue;
      const bool yes = state.released(j) == 1.0;
      if (kind == MarginalKind::kFlip) {
        if (yes) table.carrier[j] = consts->b[j] - consts->a[j];
      } else {
        table.carrier[j] = -(yes ? consts->a[j] : consts->b[j]);
      }
    }
    return table;
  }
  if (kind == MarginalKind::kFlip) {
    return absl::InvalidArgumentError("flip marginals are beacon-only");
  }
  for (int j = 0; j < m; ++j) {
    if (state.masked[j]) continue;
    const double ref = ClampedReferenceAaf(panel, j);
    table.carrier[j] = -AafCarrierTerm(ref, state.released(j));
    table.non_carrier[j] = -AafNonCarrierTerm(ref, state.released(j));
  }
  return table;
}

}  // namespace gpriv
