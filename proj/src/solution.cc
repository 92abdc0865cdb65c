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

#include "gpriv/solution.h"

#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace gpriv {

using nlohmann::json;

double Objective(double alpha, double w, double noise_l1, int num_masked,
                 int num_covered) {
  return alpha * noise_l1 + (1.0 - alpha) * num_masked - w * num_covered;
}

double UtilityPct(double alpha, double noise_l1, int num_masked, int num_snvs) {
  return 100.0 *
         (1.0 - (alpha * noise_l1 + (1.0 - alpha) * num_masked) / num_snvs);
}

absl::StatusOr<ReleaseState> ApplySolution(const GenotypePanel& panel,
                                           const DefenseSolution& solution) {
  if (solution.mode != panel.mode()) {
    return absl::InvalidArgumentError("solution mode does not match panel");
  }
  ReleaseState state = ReleaseState::Initial(panel);
  const int m = panel.num_snvs();
  for (const int j : solution.masks) {
    if (j < 0 || j >= m) return absl::OutOfRangeError("mask index");
    state.masked[j] = 1;
  }
  for (const int j : solution.flips) {
    if (j < 0 || j >= m) return absl::OutOfRangeError("flip index");
    state.flipped[j] = 1;
  }
  if (!solution.delta.empty()) {
    if (static_cast<int>(solution.delta.size()) != m) {
      return absl::InvalidArgumentError("noise vector length");
    }
    for (int j = 0; j < m; ++j) {
      state.delta[j] = state.masked[j] ? 0.0 : solution.delta[j];
    }
  }
  if (absl::Status s = ValidateState(panel, state); !s.ok()) return s;
  return state;
}

void CaptureState(const ReleaseState& state, DefenseSolution& sol) {
  sol.mode = state.mode;
  sol.masks = state.MaskSet();
  sol.flips = state.FlipSet();
  if (state.mode == ReleaseMode::kAaf) {
    sol.delta = state.delta;
    for (const int j : sol.masks) sol.delta[j] = 0.0;
  } else {
    sol.delta.clear();
  }
}

absl::Status EvaluateSolution(const GenotypePanel& panel,
                              const BeaconConstants* consts,
                              const ThreatModel& model, DefenseSolution& sol,
                              const LdIndex* ld_index) {
  absl::StatusOr<ReleaseState> state = ApplySolution(panel, sol);
  if (!state.ok()) return state.status();
  absl::StatusOr<AttackResult> attack =
      RunAttack(panel, consts, *state, model, ld_index);
  if (!attack.ok()) return attack.status();
  sol.noise_l1 = state->NoiseL1();
  const int num_masked = static_cast<int>(sol.masks.size());
  sol.covered = attack->coverage.covered;
  sol.threshold = attack->coverage.threshold;
  sol.objective = Objective(sol.alpha, sol.w, sol.noise_l1, num_masked,
                            attack->coverage.size());
  sol.utility_pct =
      UtilityPct(sol.alpha, sol.noise_l1, num_masked, panel.num_snvs());
  sol.privacy_pct = attack->coverage.privacy_pct();
  sol.attack_label = attack->label;
  return absl::OkStatus();
}

std::string SolutionToJson(const DefenseSolution& sol) {
  json j;
  j["method"] = sol.method;
  j["mode"] = std::string(ReleaseModeName(sol.mode));
  j["alpha"] = sol.alpha;
  j["w"] = sol.w;
  j["flips"] = sol.flips;
  j["masks"] = sol.masks;
  j["delta"] = sol.delta;
  j["feasible"] = sol.feasible;
  j["noise_l1"] = sol.noise_l1;
  j["objective"] = sol.objective;
  j["utility_pct"] = sol.utility_pct;
  j["privacy_pct"] = sol.privacy_pct;
  j["threshold"] = sol.threshold;
  j["covered"] = sol.covered;
  j["attack"] = sol.attack_label;
  return j.dump(1);
}

absl::StatusOr<DefenseSolution> SolutionFromJson(const std::string& text) {
  try {
    const json j = json::parse(text);
    DefenseSolution sol;
    sol.method = j.at("method").get<std::string>();
    absl::StatusOr<ReleaseMode> mode =
        ParseReleaseMode(j.at("mode").get<std::string>());
    if (!mode.ok()) return mode.status();
    sol.mode = *mode;
    sol.alpha = j.at("alpha").get<double>();
    sol.w = j.at("w").get<double>();
    sol.flips = j.at("flips").get<std::vector<int>>();
    sol.masks = j.at("masks").get<std::vector<int>>();
    sol.delta = j.at("delta").get<std::vector<double>>();
    sol.feasible = j.value("feasible", true);
    sol.noise_l1 = j.value("noise_l1", 0.0);
    sol.objective = j.value("objective", 0.0);
    sol.utility_pct = j.value("utility_pct", 0.0);
    sol.privacy_pct = j.value("privacy_pct", 0.0);
    sol.threshold = j.value("threshold", 0.0);
    sol.covered = j.value("covered", std::vector<int>{});
    sol.attack_label = j.value("attack", std::string("standard"));
    return sol;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad solution file: ", e.what()));
  }
}

absl::Status SaveSolution(const DefenseSolution& sol, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out << SolutionToJson(sol) << "\n";
  return out ? absl::OkStatus()
             : absl::DataLossError(absl::StrCat("write failed: ", path));
}

absl::StatusOr<DefenseSolution> LoadSolution(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return SolutionFromJson(buffer.str());
}

}  // namespace gpriv
