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

#include "gpriv/sweep.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "absl/strings/str_cat.h"
#include "gpriv/baselines.h"
#include "gpriv/rng.h"
#include "gpriv/spgb.h"

namespace gpriv {

std::vector<double> LogSpace(double lo, double hi, int n) {
  if (n <= 1) return {lo};
  std::vector<double> out(n);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int k = 0; k < n; ++k) out[k] = std::pow(10.0, a + (b - a) * k / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> DefaultWeights(ReleaseMode mode) {
  return mode == ReleaseMode::kBeacon ? LogSpace(0.01, 10.0, 13)
                                      : LogSpace(0.1, 10000.0, 13);
}

std::vector<double> DefaultAlphas() { return {0.5, 0.75, 0.9}; }

std::vector<ThreatModel> DefaultThreats() {
  return {ThreatModel::Fixed(-750), ThreatModel::Fixed(-250),
          ThreatModel::Fixed(0),    ThreatModel::Fixed(1000),
          ThreatModel::Adaptive(5), ThreatModel::Adaptive(10)};
}

namespace {

enum class Kind {
  kSpgb, kSpgld, kMig, kSf, kRf, kDpBeacon, kSpgr, kDpLaplace, kMaskOnly,
  kLinkage,
};

enum class Param { kNone, kProbability, kEpsilon, kBudget };

struct MethodInfo {
  std::string name;
  Kind kind = Kind::kSpgb;
  bool beacon = true;
  ActionRestriction restriction = ActionRestriction::kBoth;
  BaselineAction action = BaselineAction::kFlip;
  std::string mode = "both";
  Param param = Param::kNone;
  bool randomized = false;
  bool uses_w = false;
  std::string family;
  // Attacker the method is defined for; nullopt = either.
  std::optional<bool> adaptive_only;
};

absl::StatusOr<MethodInfo> Describe(const std::string& name) {
  MethodInfo info;
  info.name = name;
  info.family = name;
  auto action = [&](bool mask) {
    info.action = mask ? BaselineAction::kMask : BaselineAction::kFlip;
    info.mode = mask ? "mask" : "flip";
  };
  if (name == "spgb" || name == "spgb-flip" || name == "spgb-mask") {
    info.kind = Kind::kSpgb;
    info.uses_w = true;
    if (name == "spgb-flip") {
      info.restriction = ActionRestriction::kFlipOnly;
      info.mode = "flip";
    } else if (name == "spgb-mask") {
      info.restriction = ActionRestriction::kMaskOnly;
      info.mode = "mask";
    }
  } else if (name == "spgld") {
    info.kind = Kind::kSpgld;
    info.uses_w = true;
  } else if (name == "mig-flip" || name == "mig-mask") {
    info.kind = Kind::kMig;
    action(name == "mig-mask");
  } else if (name == "sf" || name == "sf-mask" || name == "sfm" ||
             name == "sfm-mask") {
    info.kind = Kind::kSf;
    action(name.ends_with("-mask"));
    info.adaptive_only = name.starts_with("sfm");
  } else if (name == "rf" || name == "rf-mask") {
    info.kind = Kind::kRf;
    action(name == "rf-mask");
    info.param = Param::kProbability;
    info.randomized = true;
  } else if (name == "dpbeacon" || name == "dpbeacon-mask") {
    info.kind = Kind::kDpBeacon;
    action(name == "dpbeacon-mask");
    info.param = Param::kEpsilon;
    info.randomized = true;
  } else if (name == "spgr" || name == "dplaplace" || name == "maskonly") {
    info.kind = name == "spgr"        ? Kind::kSpgr
                : name == "dplaplace" ? Kind::kDpLaplace
                                      : Kind::kMaskOnly;
    info.beacon = false;
    info.mode = "aaf";
    info.uses_w = true;
    info.randomized = name != "maskonly";
    info.family = "spgr";
  } else if (name == "linkage") {
    info.kind = Kind::kLinkage;
    info.beacon = false;
    info.mode = "aaf";
    info.param = Param::kBudget;
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown sweep method '", name, "'"));
  }
  return info;
}

struct Job {
  const MethodInfo* info;
  ThreatModel threat;
  double alpha;
  double w;
  std::optional<double> param;
};

uint64_t Bits(double v) { return std::bit_cast<uint64_t>(v); }

uint64_t RecordSeed(uint64_t master, const MethodInfo& info,
                    const std::optional<double>& param, int run) {
  return DeriveSeed(master, {HashName(info.family), Bits(param.value_or(0.0)),
                             static_cast<uint64_t>(run)});
}

absl::StatusOr<DefenseSolution> RunOnce(const Job& job, uint64_t seed,
                                        const SweepSpec& spec,
                                        const GenotypePanel& panel,
                                        const BeaconConstants* consts,
                                        const LdIndex* ld_index) {
  const MethodInfo& info = *job.info;
  switch (info.kind) {
    case Kind::kSpgb:
    case Kind::kSpgld: {
      SpgbConfig cfg;
      cfg.alpha = job.alpha;
      cfg.w = job.w;
      cfg.model = job.threat;
      cfg.restriction = info.restriction;
      if (info.kind == Kind::kSpgld) cfg.ld_index = ld_index;
      return RunSpgb(panel, *consts, cfg);
    }
    case Kind::kSpgr: {
      SpgrConfig cfg = spec.spgr;
      cfg.alpha = job.alpha;
      cfg.w = job.w;
      cfg.model = job.threat;
      cfg.seed = seed;
      cfg.run = 0;
      absl::StatusOr<SpgrResult> result = RunSpgr(panel, cfg);
      if (!result.ok()) return result.status();
      return std::move(result->solution);
    }
    default:
      break;
  }
  BaselineConfig cfg;
  cfg.action = info.action;
  cfg.model = job.threat;
  cfg.alpha = job.alpha;
  cfg.w = job.w;
  cfg.seed = seed;
  cfg.spgr = spec.spgr;
  cfg.spgr.seed = seed;
  cfg.spgr.run = 0;
  switch (info.kind) {
    case Kind::kMig:
      cfg.method = BaselineMethod::kMig;
      break;
    case Kind::kSf:
      cfg.method = job.threat.adaptive() ? BaselineMethod::kSfm
                                         : BaselineMethod::kSf;
      break;
    case Kind::kRf:
      cfg.method = BaselineMethod::kRf;
      cfg.probability = *job.param;
      break;
    case Kind::kDpBeacon:
      cfg.method = BaselineMethod::kDpBeacon;
      cfg.epsilon = *job.param;
      break;
    case Kind::kDpLaplace:
      cfg.method = BaselineMethod::kDpLaplace;
      break;
    case Kind::kMaskOnly:
      cfg.method = BaselineMethod::kMaskOnly;
      break;
    case Kind::kLinkage:
      cfg.method = BaselineMethod::kLinkage;
      cfg.privacy_budget = *job.param;
      break;
    default:
      return absl::InternalError("unhandled method kind");
  }
  return RunBaseline(panel, consts, ld_index, cfg);
}

absl::StatusOr<SweepRecord> RunJob(const Job& job, const SweepSpec& spec,
                                   const GenotypePanel& panel,
                                   const BeaconConstants* consts,
                                   const LdIndex* ld_index) {
  const auto start = std::chrono::steady_clock::now();
  const MethodInfo& info = *job.info;
  SweepRecord rec;
  rec.method = info.name;
  rec.mode = info.mode;
  rec.alpha = job.alpha;
  rec.w = job.w;
  rec.threat = job.threat.KindName();
  rec.threshold_param = job.threat.parameter();
  rec.param = job.param;
  rec.seed = RecordSeed(spec.seed, info, job.param, 0);
  rec.runs = info.randomized ? spec.runs : 1;
  for (int r = 0; r < rec.runs; ++r) {
    absl::StatusOr<DefenseSolution> sol =
        RunOnce(job, RecordSeed(spec.seed, info, job.param, r), spec, panel,
                consts, ld_index);
    if (!sol.ok()) return sol.status();
    rec.utility_pct += sol->utility_pct;
    rec.privacy_pct += sol->privacy_pct;
    rec.objective += sol->objective;
    rec.num_masked += sol->masks.size();
    rec.num_flipped += sol->flips.size();
    rec.noise_l1 += sol->noise_l1;
    rec.feasible = rec.feasible && sol->feasible;
  }
  for (double* v : {&rec.utility_pct, &rec.privacy_pct, &rec.objective,
                    &rec.num_masked, &rec.num_flipped, &rec.noise_l1}) {
    *v /= rec.runs;
  }
  rec.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  return rec;
}

std::string Fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  // Avoid "-0.000000".
  if (std::string_view(buf).find_first_not_of("-0.") == std::string::npos) {
    std::snprintf(buf, sizeof(buf), "%.*f", digits, 0.0);
  }
  return buf;
}

}  // namespace

absl::StatusOr<SweepResult> RunSweep(const SweepSpec& spec,
                                     const GenotypePanel& panel,
                                     const BeaconConstants* consts,
                                     const LdIndex* ld_index) {
  if (spec.methods.empty() || spec.alphas.empty() || spec.threats.empty()) {
    return absl::InvalidArgumentError("sweep grids must be non-empty");
  }
  if (spec.runs < 1) return absl::InvalidArgumentError("runs must be >= 1");
  const std::vector<double> weights =
      spec.weights.empty() ? DefaultWeights(panel.mode()) : spec.weights;
  const bool beacon = panel.mode() == ReleaseMode::kBeacon;

  SweepResult result;
  std::vector<MethodInfo> infos;
  infos.reserve(spec.methods.size());
  for (const std::string& name : spec.methods) {
    absl::StatusOr<MethodInfo> info = Describe(name);
    if (!info.ok()) return info.status();
    if (info->beacon != beacon) {
      result.skipped.push_back(absl::StrCat(
          name, ": needs ", info->beacon ? "a beacon" : "an AAF", " panel"));
      continue;
    }
    if (beacon && consts == nullptr) {
      return absl::InvalidArgumentError("beacon sweeps need constants");
    }
    if ((info->kind == Kind::kSpgld || info->kind == Kind::kLinkage) &&
        ld_index == nullptr) {
      result.skipped.push_back(absl::StrCat(name, ": needs an LD index"));
      continue;
    }
    infos.push_back(*std::move(info));
  }

  std::vector<Job> jobs;
  for (const MethodInfo& info : infos) {
    std::vector<std::optional<double>> params = {std::nullopt};
    if (info.param == Param::kProbability) {
      params.assign(spec.rf_probabilities.begin(), spec.rf_probabilities.end());
    } else if (info.param == Param::kEpsilon) {
      params.assign(spec.dp_epsilons.begin(), spec.dp_epsilons.end());
    } else if (info.param == Param::kBudget) {
      params.assign(spec.linkage_budgets.begin(), spec.linkage_budgets.end());
    }
    // Methods whose solution ignores w are recorded once, at w = 0.
    const std::vector<double> ws =
        info.uses_w ? weights : std::vector<double>{0.0};
    for (const ThreatModel& threat : spec.threats) {
      if (info.adaptive_only.has_value() &&
          *info.adaptive_only != threat.adaptive()) {
        result.skipped.push_back(absl::StrCat(
            info.name, ": not defined for the ", threat.KindName(),
            " attacker"));
        continue;
      }
      for (const double alpha : spec.alphas) {
        for (const auto& param : params) {
          for (const double w : ws) {
            jobs.push_back({&info, threat, alpha, w, param});
          }
        }
      }
    }
  }

  std::vector<absl::StatusOr<SweepRecord>> out(
      jobs.size(), absl::UnknownError("not run"));
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t k = next++; k < jobs.size(); k = next++) {
      out[k] = RunJob(jobs[k], spec, panel, consts, ld_index);
    }
  };
  const int threads =
      std::max(1, std::min<int>(spec.threads, static_cast<int>(jobs.size())));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  for (auto& rec : out) {
    if (!rec.ok()) return rec.status();
    result.records.push_back(*std::move(rec));
  }
  return result;
}

std::string CsvHeader() {
  return "method,mode,alpha,w,threat,threshold_param,param,seed,runs,"
         "utility_pct,privacy_pct,objective,num_masked,num_flipped,noise_l1,"
         "feasible\n";
}

std::string CsvRow(const SweepRecord& r) {
  return absl::StrCat(r.method, ",", r.mode, ",", Fixed(r.alpha), ",",
                      Fixed(r.w), ",", r.threat, ",", Fixed(r.threshold_param),
                      ",", r.param.has_value() ? Fixed(*r.param) : "", ",",
                      r.seed, ",", r.runs, ",", Fixed(r.utility_pct), ",",
                      Fixed(r.privacy_pct), ",", Fixed(r.objective), ",",
                      Fixed(r.num_masked, 4), ",", Fixed(r.num_flipped, 4),
                      ",", Fixed(r.noise_l1), ",", r.feasible ? 1 : 0, "\n");
}

std::string FormatCsv(std::span<const SweepRecord> records) {
  std::string out = CsvHeader();
  for (const SweepRecord& r : records) out += CsvRow(r);
  return out;
}

std::string FormatTimings(std::span<const SweepRecord> records) {
  std::string out = "index,method,wall_seconds\n";
  for (size_t k = 0; k < records.size(); ++k) {
    out += absl::StrCat(k, ",", records[k].method, ",",
                        Fixed(records[k].wall_seconds), "\n");
  }
  return out;
}

std::vector<FrontierPoint> PointsOf(
    std::span<const SweepRecord> records,
    const std::function<bool(const SweepRecord&)>& keep) {
  std::vector<FrontierPoint> out;
  for (const SweepRecord& r : records) {
    if (keep(r)) out.push_back({r.privacy_pct, r.utility_pct});
  }
  return out;
}

namespace {

// Best utility A offers at privacy >= `privacy`: its own points, plus the
// segments between them when `segments` is set.
double FrontierUtility(std::span<const FrontierPoint> a, double privacy,
                       double tolerance, bool segments) {
  double best = -std::numeric_limits<double>::infinity();
  for (const FrontierPoint& p : a) {
    if (p.privacy >= privacy - tolerance) best = std::max(best, p.utility);
  }
  if (!segments) return best;
  for (const FrontierPoint& lo : a) {
    for (const FrontierPoint& hi : a) {
      if (!(lo.privacy < privacy && privacy < hi.privacy)) continue;
      const double t = (privacy - lo.privacy) / (hi.privacy - lo.privacy);
      best = std::max(best, lo.utility + t * (hi.utility - lo.utility));
    }
  }
  return best;
}

}  // namespace

DominanceReport ParetoCheck(std::span<const FrontierPoint> a,
                            std::span<const FrontierPoint> b,
                            double tolerance, FrontierShape shape) {
  DominanceReport report;
  for (const FrontierPoint& q : b) {
    ++report.checked;
    const double u = FrontierUtility(a, q.privacy, tolerance,
                                     shape == FrontierShape::kSegments);
    if (u >= q.utility - tolerance) {
      ++report.dominated;
    } else {
      report.failures.push_back(q);
    }
  }
  return report;
}

}  // namespace gpriv
