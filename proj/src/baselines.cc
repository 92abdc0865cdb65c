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
#include <numeric>

#include "absl/strings/str_cat.h"
#include "gpriv/rng.h"
#include "gpriv/spgb.h"

namespace gpriv {

absl::StatusOr<BaselineMethod> ParseBaselineMethod(std::string_view name) {
  if (name == "sf") return BaselineMethod::kSf;
  if (name == "sfm") return BaselineMethod::kSfm;
  if (name == "rf") return BaselineMethod::kRf;
  if (name == "dpbeacon") return BaselineMethod::kDpBeacon;
  if (name == "mig") return BaselineMethod::kMig;
  if (name == "maskonly") return BaselineMethod::kMaskOnly;
  if (name == "linkage") return BaselineMethod::kLinkage;
  if (name == "dplaplace") return BaselineMethod::kDpLaplace;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown baseline '", std::string(name),
      "' (sf|sfm|rf|dpbeacon|mig|maskonly|linkage|dplaplace)"));
}

std::string_view BaselineMethodName(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::kSf:
      return "sf";
    case BaselineMethod::kSfm:
      return "sfm";
    case BaselineMethod::kRf:
      return "rf";
    case BaselineMethod::kDpBeacon:
      return "dpbeacon";
    case BaselineMethod::kMig:
      return "mig";
    case BaselineMethod::kMaskOnly:
      return "maskonly";
    case BaselineMethod::kLinkage:
      return "linkage";
    case BaselineMethod::kDpLaplace:
      return "dplaplace";
  }
  return "unknown";
}

bool IsBeaconBaseline(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::kSf:
    case BaselineMethod::kSfm:
    case BaselineMethod::kRf:
    case BaselineMethod::kDpBeacon:
    case BaselineMethod::kMig:
      return true;
    default:
      return false;
  }
}

absl::StatusOr<BaselineAction> ParseBaselineAction(std::string_view name) {
  if (name == "flip") return BaselineAction::kFlip;
  if (name == "mask") return BaselineAction::kMask;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown action '", std::string(name), "' (flip|mask)"));
}

namespace {

absl::Status CheckBeacon(const GenotypePanel& panel,
                         const BeaconConstants& consts) {
  if (panel.mode() != ReleaseMode::kBeacon) {
    return absl::InvalidArgumentError("this baseline needs a beacon panel");
  }
  if (consts.num_snvs() != panel.num_snvs()) {
    return absl::InvalidArgumentError("beacon constants do not fit the panel");
  }
  return absl::OkStatus();
}

double ActionGain(const BeaconConstants& consts, BaselineAction action,
                  int j) {
  return action == BaselineAction::kFlip ? consts.flip_gain(j)
                                         : consts.mask_gain(j);
}

absl::StatusOr<DefenseSolution> Finish(const GenotypePanel& panel,
                                       const BeaconConstants* consts,
                                       const BaselineConfig& config,
                                       std::vector<int> actioned,
                                       BaselineAction action) {
  DefenseSolution sol;
  sol.method = std::string(BaselineMethodName(config.method));
  sol.mode = panel.mode();
  sol.alpha = config.alpha;
  sol.w = config.w;
  std::sort(actioned.begin(), actioned.end());
  (action == BaselineAction::kFlip ? sol.flips : sol.masks) =
      std::move(actioned);
  if (absl::Status s = EvaluateSolution(panel, consts, config.model, sol);
      !s.ok()) {
    return s;
  }
  return sol;
}

// Dataset and reference scores under incremental per-SNV updates, with
// coverage evaluated against either attacker.
class ScoreBook {
 public:
  ScoreBook(const GenotypePanel& panel, const ThreatModel& model,
            std::vector<double> scores, std::vector<double> ref_scores)
      : panel_(panel),
        model_(model),
        scores_(std::move(scores)),
        ref_scores_(std::move(ref_scores)) {}

  // Adds carrier / non-carrier terms of SNV j to every score.
  void Add(int j, double carrier, double non_carrier) {
    Update(Population::kDataset, scores_, j, carrier, non_carrier);
    if (model_.adaptive()) {
      Update(Population::kReference, ref_scores_, j, carrier, non_carrier);
    }
  }

  double Threshold() const {
    return model_.adaptive()
               ? *AdaptiveThreshold(ref_scores_, model_.k_percentile)
               : model_.theta;
  }

  std::vector<uint8_t> Covered() const {
    const double threshold = Threshold();
    std::vector<uint8_t> out(scores_.size());
    for (size_t i = 0; i < scores_.size(); ++i) {
      out[i] = scores_[i] - threshold >= 0.0;
    }
    return out;
  }

  int NumCovered() const {
    const std::vector<uint8_t> c = Covered();
    return static_cast<int>(std::count(c.begin(), c.end(), 1));
  }

 private:
  void Update(Population who, std::vector<double>& scores, int j,
              double carrier, double non_carrier) {
    if (non_carrier == 0.0) {
      for (const int i : panel_.carriers(who, j)) scores[i] += carrier;
      return;
    }
    for (int i = 0; i < panel_.size(who); ++i) {
      scores[i] += panel_.carries(who, i, j) ? carrier : non_carrier;
    }
  }

  const GenotypePanel& panel_;
  const ThreatModel& model_;
  std::vector<double> scores_;
  std::vector<double> ref_scores_;
};

bool Contains(const std::vector<uint8_t>& cover,
              const std::vector<uint8_t>& target) {
  for (size_t i = 0; i < target.size(); ++i) {
    if (target[i] && !cover[i]) return false;
  }
  return true;
}

}  // namespace

absl::StatusOr<DefenseSolution> RunSf(const GenotypePanel& panel,
                                      const BeaconConstants& consts,
                                      const BaselineConfig& config) {
  if (absl::Status s = CheckBeacon(panel, consts); !s.ok()) return s;
  if (config.method == BaselineMethod::kSfm && !config.model.adaptive()) {
    return absl::InvalidArgumentError("SFM needs the adaptive attacker");
  }
  const int m = panel.num_snvs();
  const int n = panel.num_individuals();
  const BaselineAction action = config.action;
  const ReleaseState initial = ReleaseState::Initial(panel);
  absl::StatusOr<std::vector<double>> d =
      BeaconScores(panel, consts, initial, Population::kDataset);
  if (!d.ok()) return d.status();
  absl::StatusOr<std::vector<double>> r =
      BeaconScores(panel, consts, initial, Population::kReference);
  if (!r.ok()) return r.status();
  ScoreBook book(panel, config.model, *std::move(d), *std::move(r));

  // Total lift over D, strongest first.
  const std::vector<uint8_t> candidates = BeaconCandidates(panel, consts);
  std::vector<int> order;
  std::vector<double> power(m, 0.0);
  for (int j = 0; j < m; ++j) {
    if (!candidates[j]) continue;
    order.push_back(j);
    power[j] = ActionGain(consts, action, j) *
               panel.carrier_count(Population::kDataset, j);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return power[a] > power[b]; });

  std::vector<int> actioned;
  for (const int j : order) {
    if (book.NumCovered() == n) break;
    book.Add(j, ActionGain(consts, action, j), 0.0);
    actioned.push_back(j);
  }

  // Drop actions whose removal keeps everyone covered so far covered.
  const std::vector<uint8_t> target = book.Covered();
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t a = actioned.size(); a-- > 0;) {
      const int j = actioned[a];
      const double gain = ActionGain(consts, action, j);
      book.Add(j, -gain, 0.0);
      if (Contains(book.Covered(), target)) {
        actioned.erase(actioned.begin() + a);
        changed = true;
      } else {
        book.Add(j, gain, 0.0);
      }
    }
  }
  return Finish(panel, &consts, config, std::move(actioned), action);
}

absl::StatusOr<DefenseSolution> RunRf(const GenotypePanel& panel,
                                      const BeaconConstants& consts,
                                      const BaselineConfig& config) {
  if (absl::Status s = CheckBeacon(panel, consts); !s.ok()) return s;
  if (!(config.probability >= 0.0 && config.probability <= 1.0)) {
    return absl::InvalidArgumentError("RF probability must lie in [0, 1]");
  }
  const std::vector<uint8_t> candidates = BeaconCandidates(panel, consts);
  Rng rng(config.seed);
  std::vector<int> actioned;
  for (int j = 0; j < panel.num_snvs(); ++j) {
    if (!candidates[j] || panel.carrier_count(Population::kDataset, j) != 1) {
      continue;
    }
    if (rng.Bernoulli(config.probability)) actioned.push_back(j);
  }
  return Finish(panel, &consts, config, std::move(actioned), config.action);
}

absl::StatusOr<DefenseSolution> RunDpBeacon(const GenotypePanel& panel,
                                            const BeaconConstants& consts,
                                            const BaselineConfig& config) {
  if (absl::Status s = CheckBeacon(panel, consts); !s.ok()) return s;
  if (!(config.epsilon >= 0.0)) {
    return absl::InvalidArgumentError("epsilon must be >= 0");
  }
  // 1 / (1 + e^eps), written to stay finite for large epsilon.
  const double p = std::exp(-config.epsilon) / (1.0 + std::exp(-config.epsilon));
  Rng rng(config.seed);
  std::vector<int> actioned;
  for (int j = 0; j < panel.num_snvs(); ++j) {
    if (!panel.beacon_response(j)) continue;
    if (rng.Bernoulli(p)) actioned.push_back(j);
  }
  return Finish(panel, &consts, config, std::move(actioned), config.action);
}

absl::StatusOr<DefenseSolution> RunMig(const GenotypePanel& panel,
                                       const BeaconConstants& consts,
                                       const BaselineConfig& config) {
  SpgbConfig spgb;
  spgb.alpha = config.alpha;
  spgb.w = config.w;
  spgb.model = config.model;
  spgb.restriction = config.action == BaselineAction::kFlip
                         ? ActionRestriction::kFlipOnly
                         : ActionRestriction::kMaskOnly;
  spgb.run_to_full_coverage = true;
  return RunSpgb(panel, consts, spgb);
}

absl::StatusOr<DefenseSolution> RunLinkage(const GenotypePanel& panel,
                                           const LdIndex& ld_index,
                                           const BaselineConfig& config) {
  if (panel.mode() != ReleaseMode::kAaf) {
    return absl::InvalidArgumentError("Linkage needs an AAF panel");
  }
  const int m = panel.num_snvs();
  if (ld_index.num_snvs() != m) {
    return absl::InvalidArgumentError("LD index does not fit the panel");
  }
  if (absl::Status s = ValidateThreatModel(config.model); !s.ok()) return s;
  const ReleaseState initial = ReleaseState::Initial(panel);
  absl::StatusOr<MarginalTable> marginals =
      MarginalContributions(panel, nullptr, initial, MarginalKind::kMask);
  if (!marginals.ok()) return marginals.status();
  const std::vector<double> avg =
      marginals->Average(panel, Population::kDataset);
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::fabs(avg[a]) < std::fabs(avg[b]);
  });

  // Everything starts masked, so every score starts at 0.
  ScoreBook book(panel, config.model,
                 std::vector<double>(panel.num_individuals(), 0.0),
                 std::vector<double>(panel.num_reference(), 0.0));
  const int n = panel.num_individuals();
  std::vector<uint8_t> released(m, 0);
  for (const int j : order) {
    bool linked = false;
    for (const int k : ld_index.of(j)) linked = linked || released[k];
    if (linked) continue;
    // Releasing j adds back the negated mask marginal.
    const double carrier = -marginals->carrier[j];
    const double non_carrier = -marginals->non_carrier[j];
    book.Add(j, carrier, non_carrier);
    if (100.0 * book.NumCovered() / n >= config.privacy_budget) {
      released[j] = 1;
    } else {
      book.Add(j, -carrier, -non_carrier);
    }
  }
  std::vector<int> masked;
  for (int j = 0; j < m; ++j) {
    if (!released[j]) masked.push_back(j);
  }
  return Finish(panel, nullptr, config, std::move(masked),
                BaselineAction::kMask);
}

absl::StatusOr<DefenseSolution> RunDpLaplace(const GenotypePanel& panel,
                                             const BaselineConfig& config) {
  SpgrConfig spgr = config.spgr;
  spgr.alpha = config.alpha;
  spgr.w = config.w;
  spgr.model = config.model;
  spgr.enable_masking = false;
  spgr.enable_noise = true;
  spgr.include_noise_free = false;
  absl::StatusOr<SpgrResult> result = RunSpgr(panel, spgr);
  if (!result.ok()) return result.status();
  return std::move(result->solution);
}

absl::StatusOr<DefenseSolution> RunMaskOnly(const GenotypePanel& panel,
                                            const BaselineConfig& config) {
  SpgrConfig spgr = config.spgr;
  spgr.alpha = config.alpha;
  spgr.w = config.w;
  spgr.model = config.model;
  spgr.enable_masking = true;
  spgr.enable_noise = false;
  absl::StatusOr<SpgrResult> result = RunSpgr(panel, spgr);
  if (!result.ok()) return result.status();
  return std::move(result->solution);
}

absl::StatusOr<DefenseSolution> RunBaseline(const GenotypePanel& panel,
                                            const BeaconConstants* consts,
                                            const LdIndex* ld_index,
                                            const BaselineConfig& config) {
  if (IsBeaconBaseline(config.method) && consts == nullptr) {
    return absl::InvalidArgumentError("beacon baselines need constants");
  }
  switch (config.method) {
    case BaselineMethod::kSf:
    case BaselineMethod::kSfm:
      return RunSf(panel, *consts, config);
    case BaselineMethod::kRf:
      return RunRf(panel, *consts, config);
    case BaselineMethod::kDpBeacon:
      return RunDpBeacon(panel, *consts, config);
    case BaselineMethod::kMig:
      return RunMig(panel, *consts, config);
    case BaselineMethod::kLinkage:
      if (ld_index == nullptr) {
        return absl::InvalidArgumentError("Linkage needs an LD index");
      }
      return RunLinkage(panel, *ld_index, config);
    case BaselineMethod::kDpLaplace:
      return RunDpLaplace(panel, config);
    case BaselineMethod::kMaskOnly:
      return RunMaskOnly(panel, config);
  }
  return absl::InvalidArgumentError("unknown baseline");
}

}  // namespace gpriv
