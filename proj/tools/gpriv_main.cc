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

// Command-line front end: data generation, LD indexing, attacks, defenses,
// sweeps, exact solves and solution verification.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "gpriv/baselines.h"
#include "gpriv/dataset.h"
#include "gpriv/ld.h"
#include "gpriv/lrt.h"
#include "gpriv/oracle.h"
#include "gpriv/solution.h"
#include "gpriv/spgb.h"
#include "gpriv/spgr.h"
#include "gpriv/sweep.h"
#include "gpriv/threat.h"

namespace gpriv {
namespace {

struct ThreatFlags {
  std::string model = "fixed";
  double theta = 0.0;
  double k = 10.0;
  bool ld_aware = false;
  double quorum = 0.75;

  void Add(CLI::App* app) {
    app->add_option("--model", model, "Attacker: fixed or adaptive")
        ->check(CLI::IsMember({"fixed", "adaptive"}));
    app->add_option("--theta", theta, "Fixed LRT threshold");
    app->add_option("--k", k, "Adaptive lowest-percentile size K");
    app->add_flag("--ld-aware", ld_aware,
                  "Attacker runs correlation inference (needs --ld)");
    app->add_option("--quorum", quorum, "Correlation inference quorum");
  }

  ThreatModel Build(const LdIndex* index) const {
    ThreatModel m =
        model == "adaptive" ? ThreatModel::Adaptive(k) : ThreatModel::Fixed(theta);
    m.ld_aware = ld_aware;
    m.ld.quorum = quorum;
    if (index != nullptr) {
      m.ld.window = index->window;
      m.ld.threshold = index->threshold;
    }
    return m;
  }
};

// Inputs most subcommands share.
struct Inputs {
  std::string panel_path;
  std::string ld_path;
  double gamma = kDefaultSequencingError;

  std::optional<GenotypePanel> panel;
  std::optional<BeaconConstants> consts;
  std::optional<LdIndex> ld;

  absl::Status Load() {
    absl::StatusOr<GenotypePanel> p = LoadPanel(panel_path);
    if (!p.ok()) return p.status();
    panel = *std::move(p);
    if (panel->mode() == ReleaseMode::kBeacon) {
      absl::StatusOr<BeaconConstants> c = PrecomputeBeaconConstants(*panel, gamma);
      if (!c.ok()) return c.status();
      consts = *std::move(c);
    }
    if (!ld_path.empty()) {
      absl::StatusOr<LdIndex> l = LoadLdIndex(ld_path);
      if (!l.ok()) return l.status();
      if (l->num_snvs() != panel->num_snvs()) {
        return absl::InvalidArgumentError("LD index does not match the panel");
      }
      ld = *std::move(l);
    }
    return absl::OkStatus();
  }
  const BeaconConstants* consts_ptr() const {
    return consts ? &*consts : nullptr;
  }
  const LdIndex* ld_ptr() const { return ld ? &*ld : nullptr; }
};

void AddInputs(CLI::App* app, Inputs& in, bool want_ld = true) {
  app->add_option("--panel", in.panel_path, "Panel file")->required();
  if (want_ld) app->add_option("--ld", in.ld_path, "LD index file");
  app->add_option("--gamma", in.gamma, "Sequencing error rate (beacon)");
}

absl::Status WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot write ", path));
  out << text;
  return out ? absl::OkStatus()
             : absl::DataLossError(absl::StrCat("write failed: ", path));
}

void PrintSummary(const DefenseSolution& sol) {
  std::printf(
      "method=%s utility_pct=%.6f privacy_pct=%.6f objective=%.6f "
      "flips=%zu masks=%zu noise_l1=%.6f feasible=%d attack=%s\n",
      sol.method.c_str(), sol.utility_pct, sol.privacy_pct, sol.objective,
      sol.flips.size(), sol.masks.size(), sol.noise_l1, sol.feasible ? 1 : 0,
      sol.attack_label.c_str());
}

absl::Status Emit(const DefenseSolution& sol, const std::string& out) {
  PrintSummary(sol);
  return out.empty() ? absl::OkStatus() : SaveSolution(sol, out);
}

// ---- gen-data ---------------------------------------------------------

struct GenFlags {
  DatasetConfig config;
  std::string mode = "beacon";
  std::string out;
};

absl::Status GenData(GenFlags& f) {
  absl::StatusOr<ReleaseMode> mode = ParseReleaseMode(f.mode);
  if (!mode.ok()) return mode.status();
  f.config.mode = *mode;
  absl::StatusOr<GenotypePanel> panel = GeneratePanel(f.config);
  if (!panel.ok()) return panel.status();
  std::printf("m=%d n=%d n_ref=%d mode=%s\n", panel->num_snvs(),
              panel->num_individuals(), panel->num_reference(), f.mode.c_str());
  return SavePanel(*panel, f.out);
}

// ---- ld ---------------------------------------------------------------

struct LdFlags {
  std::string panel_path;
  int window = kDefaultLdWindow;
  double threshold = kDefaultLdThreshold;
  std::string source = "dataset";
  std::string out;
};

absl::Status Ld(const LdFlags& f, int threads) {
  absl::StatusOr<GenotypePanel> panel = LoadPanel(f.panel_path);
  if (!panel.ok()) return panel.status();
  absl::StatusOr<LdSource> source = ParseLdSource(f.source);
  if (!source.ok()) return source.status();
  absl::StatusOr<LdIndex> index =
      BuildLdIndex(*panel, f.window, f.threshold, *source, threads);
  if (!index.ok()) return index.status();
  std::printf("pairs=%zu\n", index->num_pairs());
  return SaveLdIndex(*index, f.out);
}

// ---- attack -----------------------------------------------------------

struct AttackFlags {
  Inputs in;
  ThreatFlags threat;
  std::string solution_path;
  std::string margins_out;
};

absl::Status Attack(AttackFlags& f) {
  if (absl::Status s = f.in.Load(); !s.ok()) return s;
  const GenotypePanel& panel = *f.in.panel;
  ReleaseState state = ReleaseState::Initial(panel);
  if (!f.solution_path.empty()) {
    absl::StatusOr<DefenseSolution> sol = LoadSolution(f.solution_path);
    if (!sol.ok()) return sol.status();
    absl::StatusOr<ReleaseState> applied = ApplySolution(panel, *sol);
    if (!applied.ok()) return applied.status();
    state = *std::move(applied);
  }
  const ThreatModel model = f.threat.Build(f.in.ld_ptr());
  absl::StatusOr<AttackResult> result =
      RunAttack(panel, f.in.consts_ptr(), state, model, f.in.ld_ptr());
  if (!result.ok()) return result.status();
  std::printf("attack=%s threshold=%.6f covered=%d/%zu privacy_pct=%.6f "
              "recovered=%zu\n",
              result->label.c_str(), result->coverage.threshold,
              result->coverage.size(), result->coverage.margins.size(),
              result->coverage.privacy_pct(),
              result->inference.recovered().size());
  if (f.margins_out.empty()) return absl::OkStatus();
  std::string csv = "individual,score,margin,covered\n";
  for (size_t i = 0; i < result->coverage.margins.size(); ++i) {
    const double margin = result->coverage.margins[i];
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%zu,%.9f,%.9f,%d\n", i,
                  result->dataset_scores[i], margin, margin >= 0.0 ? 1 : 0);
    csv += buf;
  }
  return WriteFile(f.margins_out, csv);
}

// ---- defend -----------------------------------------------------------

struct DefendFlags {
  Inputs in;
  ThreatFlags threat;
  std::string method = "spgb";
  double alpha = 0.5;
  double w = 1.0;
  std::string restriction = "both";
  std::string action = "flip";
  double probability = 0.5;
  double epsilon = 1.0;
  double budget = 100.0;
  bool force_ld = false;
  // Trajectory settings.
  std::vector<double> epsilons = DefaultEpsilons();
  int t = kDefaultMaskStep;
  std::string variant = "parallel";
  std::string sensitivity = "unbounded";
  bool noise_reuse = false;
  bool no_noise_free = false;
  int run = 0;
  std::string out;
};

absl::StatusOr<SpgrConfig> TrajectoryConfig(const DefendFlags& f,
                                            const ThreatModel& model,
                                            uint64_t seed, int threads) {
  SpgrConfig cfg;
  cfg.alpha = f.alpha;
  cfg.w = f.w;
  cfg.model = model;
  cfg.t = f.t;
  cfg.epsilons = f.epsilons;
  absl::StatusOr<SpgrVariant> variant = ParseSpgrVariant(f.variant);
  if (!variant.ok()) return variant.status();
  cfg.variant = *variant;
  absl::StatusOr<Sensitivity> sens = ParseSensitivity(f.sensitivity);
  if (!sens.ok()) return sens.status();
  cfg.sensitivity = *sens;
  cfg.noise_reuse = f.noise_reuse;
  cfg.include_noise_free = !f.no_noise_free;
  cfg.seed = seed;
  cfg.run = f.run;
  cfg.threads = threads;
  return cfg;
}

absl::Status Defend(DefendFlags& f, uint64_t seed, int threads) {
  if (absl::Status s = f.in.Load(); !s.ok()) return s;
  const GenotypePanel& panel = *f.in.panel;
  const ThreatModel model = f.threat.Build(f.in.ld_ptr());
  absl::StatusOr<SpgrConfig> traj = TrajectoryConfig(f, model, seed, threads);
  if (!traj.ok()) return traj.status();

  if (f.method == "spgb" || f.method == "spgld") {
    if (!f.in.consts) return absl::InvalidArgumentError("needs a beacon panel");
    SpgbConfig cfg;
    cfg.alpha = f.alpha;
    cfg.w = f.w;
    cfg.model = model;
    absl::StatusOr<ActionRestriction> r = ParseActionRestriction(f.restriction);
    if (!r.ok()) return r.status();
    cfg.restriction = *r;
    if (f.method == "spgld") {
      if (!f.in.ld) return absl::InvalidArgumentError("spgld needs --ld");
      cfg.ld_index = f.in.ld_ptr();
      cfg.force_ld_propagation = f.force_ld;
    }
    if (model.ld_aware && !f.in.ld) {
      return absl::InvalidArgumentError("--ld-aware needs --ld");
    }
    // Plain SPG-B ignores LD, but its answer is still scored against the
    // attacker that was asked for.
    const bool rescore = model.ld_aware && cfg.ld_index == nullptr;
    if (rescore) cfg.model.ld_aware = false;
    absl::StatusOr<DefenseSolution> sol = RunSpgb(panel, *f.in.consts, cfg);
    if (!sol.ok()) return sol.status();
    if (rescore) {
      if (absl::Status s = EvaluateSolution(panel, f.in.consts_ptr(), model,
                                            *sol, f.in.ld_ptr());
          !s.ok()) {
        return s;
      }
    }
    return Emit(*sol, f.out);
  }
  if (f.method == "spgr") {
    absl::StatusOr<SpgrResult> result = RunSpgr(panel, *traj);
    if (!result.ok()) return result.status();
    const SpgrCandidate& best = result->log[result->best];
    std::printf("best_epsilon=%g best_epoch=%d candidates=%zu\n", best.epsilon,
                best.epoch, result->log.size());
    return Emit(result->solution, f.out);
  }

  absl::StatusOr<BaselineMethod> method = ParseBaselineMethod(f.method);
  if (!method.ok()) return method.status();
  BaselineConfig cfg;
  cfg.method = *method;
  absl::StatusOr<BaselineAction> action = ParseBaselineAction(f.action);
  if (!action.ok()) return action.status();
  cfg.action = *action;
  cfg.model = model;
  cfg.alpha = f.alpha;
  cfg.w = f.w;
  cfg.probability = f.probability;
  cfg.epsilon = f.epsilon;
  cfg.privacy_budget = f.budget;
  cfg.seed = seed;
  cfg.spgr = *traj;
  absl::StatusOr<DefenseSolution> sol =
      RunBaseline(panel, f.in.consts_ptr(), f.in.ld_ptr(), cfg);
  if (!sol.ok()) return sol.status();
  return Emit(*sol, f.out);
}

// ---- sweep ------------------------------------------------------------

struct SweepFlags {
  Inputs in;
  std::vector<std::string> methods;
  std::vector<double> alphas = DefaultAlphas();
  std::vector<double> weights;
  std::vector<double> thetas = {-750, -250, 0, 1000};
  std::vector<double> ks = {5, 10};
  bool ld_aware = false;
  int runs = 5;
  std::vector<double> epsilons = DefaultEpsilons();
  int t = kDefaultMaskStep;
  bool noise_reuse = false;
  std::string out;
  std::string timings_out;
};

absl::Status Sweep(SweepFlags& f, uint64_t seed, int threads) {
  if (absl::Status s = f.in.Load(); !s.ok()) return s;
  SweepSpec spec;
  spec.methods = f.methods;
  spec.alphas = f.alphas;
  spec.weights = f.weights;
  spec.threats.clear();
  for (const double theta : f.thetas) {
    spec.threats.push_back(ThreatModel::Fixed(theta));
  }
  for (const double k : f.ks) spec.threats.push_back(ThreatModel::Adaptive(k));
  for (ThreatModel& m : spec.threats) {
    m.ld_aware = f.ld_aware;
    if (f.in.ld) {
      m.ld.window = f.in.ld->window;
      m.ld.threshold = f.in.ld->threshold;
    }
  }
  if (f.ld_aware && !f.in.ld) {
    return absl::InvalidArgumentError("--ld-aware needs --ld");
  }
  spec.seed = seed;
  spec.runs = f.runs;
  spec.threads = threads;
  spec.spgr.epsilons = f.epsilons;
  spec.spgr.t = f.t;
  spec.spgr.noise_reuse = f.noise_reuse;
  // Parallelism goes to the grid, not to the trajectories.
  spec.spgr.threads = 1;
  absl::StatusOr<SweepResult> result =
      RunSweep(spec, *f.in.panel, f.in.consts_ptr(), f.in.ld_ptr());
  if (!result.ok()) return result.status();
  for (const std::string& why : result->skipped) {
    std::fprintf(stderr, "skipped %s\n", why.c_str());
  }
  const std::string csv = FormatCsv(result->records);
  if (f.out.empty()) {
    std::fwrite(csv.data(), 1, csv.size(), stdout);
  } else if (absl::Status s = WriteFile(f.out, csv); !s.ok()) {
    return s;
  }
  if (!f.timings_out.empty()) {
    return WriteFile(f.timings_out, FormatTimings(result->records));
  }
  return absl::OkStatus();
}

// ---- oracle -----------------------------------------------------------

struct OracleFlags {
  Inputs in;
  ThreatFlags threat;
  double alpha = 0.5;
  double w = 1.0;
  OracleLimits limits;
  std::string out;
};

absl::Status Oracle(OracleFlags& f, int threads) {
  if (absl::Status s = f.in.Load(); !s.ok()) return s;
  const ThreatModel model = f.threat.Build(nullptr);
  absl::StatusOr<DefenseSolution> sol =
      f.in.consts ? SolveBeaconExact(*f.in.panel, *f.in.consts, f.alpha, f.w,
                                     model, f.limits, threads)
                  : SolveAafExact(*f.in.panel, f.alpha, f.w, model, f.limits,
                                  threads);
  if (!sol.ok()) return sol.status();
  return Emit(*sol, f.out);
}

// ---- verify -----------------------------------------------------------

struct VerifyFlags {
  Inputs in;
  ThreatFlags threat;
  std::string solution_path;
  double tolerance = 1e-9;
};

// Recomputes the metrics of a stored solution and compares.
absl::Status Verify(VerifyFlags& f) {
  if (absl::Status s = f.in.Load(); !s.ok()) return s;
  absl::StatusOr<DefenseSolution> stored = LoadSolution(f.solution_path);
  if (!stored.ok()) return stored.status();
  DefenseSolution fresh = *stored;
  const ThreatModel model = f.threat.Build(f.in.ld_ptr());
  if (absl::Status s = EvaluateSolution(*f.in.panel, f.in.consts_ptr(), model,
                                        fresh, f.in.ld_ptr());
      !s.ok()) {
    return s;
  }
  PrintSummary(fresh);
  auto close = [&](double a, double b) {
    return std::fabs(a - b) <= f.tolerance * std::max(1.0, std::fabs(a));
  };
  if (!close(fresh.objective, stored->objective) ||
      !close(fresh.privacy_pct, stored->privacy_pct) ||
      !close(fresh.utility_pct, stored->utility_pct) ||
      fresh.covered != stored->covered) {
    return absl::FailedPreconditionError(absl::StrCat(
        "stored metrics disagree: objective ", stored->objective, " vs ",
        fresh.objective, ", privacy ", stored->privacy_pct, " vs ",
        fresh.privacy_pct));
  }
  std::printf("verified\n");
  return absl::OkStatus();
}

int Main(int argc, char** argv) {
  CLI::App app{"Genomic summary-statistic release defenses"};
  app.require_subcommand(1);
  uint64_t seed = 1;
  int threads = 1;
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--threads", threads, "Worker threads")
      ->check(CLI::PositiveNumber);

  GenFlags gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-data", "Generate a panel");
  gen_cmd->add_option("--m", gen.config.num_snvs, "SNVs")->required();
  gen_cmd->add_option("--n", gen.config.num_individuals, "Dataset size")
      ->required();
  gen_cmd->add_option("--n-ref", gen.config.num_reference, "Reference size")
      ->required();
  gen_cmd->add_option("--mode", gen.mode, "beacon or aaf");
  gen_cmd->add_option("--beta-a", gen.config.beta_a, "Frequency prior a");
  gen_cmd->add_option("--beta-b", gen.config.beta_b, "Frequency prior b");
  gen_cmd->add_option("--block-len", gen.config.blocks.length,
                      "Correlated block length (0 = independent)");
  gen_cmd->add_option("--block-rho", gen.config.blocks.copy_probability,
                      "Within-block copy probability");
  gen_cmd->add_option("--out", gen.out, "Output panel")->required();

  LdFlags ld;
  CLI::App* ld_cmd = app.add_subcommand("ld", "Build an LD neighbor index");
  ld_cmd->add_option("--panel", ld.panel_path, "Panel file")->required();
  ld_cmd->add_option("--window", ld.window, "SNV window");
  ld_cmd->add_option("--threshold", ld.threshold, "LD threshold");
  ld_cmd->add_option("--source", ld.source, "dataset, reference or both");
  ld_cmd->add_option("--out", ld.out, "Output index")->required();

  AttackFlags attack;
  CLI::App* attack_cmd =
      app.add_subcommand("attack", "Score a release as an attacker");
  AddInputs(attack_cmd, attack.in);
  attack.threat.Add(attack_cmd);
  attack_cmd->add_option("--solution", attack.solution_path,
                         "Defense to apply first");
  attack_cmd->add_option("--margins", attack.margins_out, "Per-person CSV");

  DefendFlags defend;
  CLI::App* defend_cmd = app.add_subcommand("defend", "Run one defense");
  AddInputs(defend_cmd, defend.in);
  defend.threat.Add(defend_cmd);
  defend_cmd->add_option(
      "method,--method", defend.method,
      "spgb, spgld, spgr, sf, sfm, rf, dpbeacon, mig, linkage, dplaplace, "
      "maskonly");
  defend_cmd->add_option("--alpha", defend.alpha, "Utility trade-off");
  defend_cmd->add_option("--w", defend.w, "Privacy weight");
  defend_cmd->add_option("--restriction", defend.restriction,
                         "SPG-B actions: both, flip or mask");
  defend_cmd->add_option("--action", defend.action,
                         "Baseline action: flip or mask");
  defend_cmd->add_option("--p", defend.probability, "RF probability");
  defend_cmd->add_option("--epsilon", defend.epsilon, "DP-beacon epsilon");
  defend_cmd->add_option("--budget", defend.budget,
                         "Linkage minimum privacy percent");
  defend_cmd->add_flag("--force-ld", defend.force_ld,
                       "Propagate to every LD neighbor");
  defend_cmd->add_option("--epsilons", defend.epsilons, "Trajectory epsilons")
      ->delimiter(',');
  defend_cmd->add_option("--t", defend.t, "SNVs masked per epoch");
  defend_cmd->add_option("--variant", defend.variant,
                         "sequential, binary or parallel");
  defend_cmd->add_option("--sensitivity", defend.sensitivity,
                         "unbounded or bounded");
  defend_cmd->add_flag("--noise-reuse", defend.noise_reuse,
                       "Keep the first noise draw across epochs");
  defend_cmd->add_flag("--no-noise-free", defend.no_noise_free,
                       "Drop the noise-free trajectory");
  defend_cmd->add_option("--run", defend.run, "Run index");
  defend_cmd->add_option("--out", defend.out, "Solution JSON");

  SweepFlags sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a parameter grid");
  AddInputs(sweep_cmd, sweep.in);
  sweep_cmd->add_option("--methods", sweep.methods, "Comma-separated methods")
      ->delimiter(',')
      ->required();
  sweep_cmd->add_option("--alphas", sweep.alphas)->delimiter(',');
  sweep_cmd->add_option("--weights", sweep.weights)->delimiter(',');
  sweep_cmd->add_option("--thetas", sweep.thetas)->delimiter(',');
  sweep_cmd->add_option("--ks", sweep.ks)->delimiter(',');
  sweep_cmd->add_flag("--ld-aware", sweep.ld_aware);
  sweep_cmd->add_option("--runs", sweep.runs, "Runs per randomized record");
  sweep_cmd->add_option("--epsilons", sweep.epsilons)->delimiter(',');
  sweep_cmd->add_option("--t", sweep.t);
  sweep_cmd->add_flag("--noise-reuse", sweep.noise_reuse);
  sweep_cmd->add_option("--out", sweep.out, "CSV (default stdout)");
  sweep_cmd->add_option("--timings", sweep.timings_out, "Wall-time CSV");

  OracleFlags oracle;
  CLI::App* oracle_cmd = app.add_subcommand("oracle", "Exact solve");
  AddInputs(oracle_cmd, oracle.in, /*want_ld=*/false);
  oracle.threat.Add(oracle_cmd);
  oracle_cmd->add_option("--alpha", oracle.alpha);
  oracle_cmd->add_option("--w", oracle.w);
  oracle_cmd->add_option("--levels", oracle.limits.aaf_levels,
                         "AAF grid levels");
  oracle_cmd->add_option("--out", oracle.out, "Solution JSON");

  VerifyFlags verify;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Recompute a solution's metrics");
  AddInputs(verify_cmd, verify.in);
  verify.threat.Add(verify_cmd);
  verify_cmd->add_option("--solution", verify.solution_path)->required();
  verify_cmd->add_option("--tolerance", verify.tolerance);

  CLI11_PARSE(app, argc, argv);

  gen.config.seed = seed;
  absl::Status status;
  if (*gen_cmd) status = GenData(gen);
  if (*ld_cmd) status = Ld(ld, threads);
  if (*attack_cmd) status = Attack(attack);
  if (*defend_cmd) status = Defend(defend, seed, threads);
  if (*sweep_cmd) status = Sweep(sweep, seed, threads);
  if (*oracle_cmd) status = Oracle(oracle, threads);
  if (*verify_cmd) status = Verify(verify);
  if (!status.ok()) {
    std::cerr << "error: " << status << "\n";
    return 1;
  }
  return 0;
}

}  // namespace
}  // namespace gpriv

int main(int argc, char** argv) { return gpriv::Main(argc, argv); }
