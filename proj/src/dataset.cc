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

#include "gpriv/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "gpriv/rng.h"

namespace gpriv {

absl::StatusOr<ReleaseMode> ParseReleaseMode(std::string_view name) {
  if (name == "beacon") return ReleaseMode::kBeacon;
  if (name == "aaf") return ReleaseMode::kAaf;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown release mode '", std::string(name), "' (beacon|aaf)"));
}

std::string_view ReleaseModeName(ReleaseMode mode) {
  return mode == ReleaseMode::kBeacon ? "beacon" : "aaf";
}

GenotypePanel::CarrierIndex GenotypePanel::BuildIndex(
    const std::vector<uint8_t>& matrix, int rows, int cols) {
  CarrierIndex index;
  index.offsets.assign(cols + 1, 0);
  for (int i = 0; i < rows; ++i) {
    const uint8_t* row = matrix.data() + static_cast<size_t>(i) * cols;
    for (int j = 0; j < cols; ++j) index.offsets[j + 1] += row[j];
  }
  for (int j = 0; j < cols; ++j) index.offsets[j + 1] += index.offsets[j];
  index.members.resize(index.offsets[cols]);
  std::vector<int> cursor(index.offsets.begin(), index.offsets.end() - 1);
  for (int i = 0; i < rows; ++i) {
    const uint8_t* row = matrix.data() + static_cast<size_t>(i) * cols;
    for (int j = 0; j < cols; ++j) {
      if (row[j]) index.members[cursor[j]++] = i;
    }
  }
  return index;
}

absl::StatusOr<GenotypePanel> GenotypePanel::Create(
    ReleaseMode mode, int num_snvs, int num_individuals, int num_reference,
    std::vector<uint8_t> dataset, std::vector<uint8_t> reference) {
  if (num_snvs < 1 || num_individuals < 1 || num_reference < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("panel dimensions must be positive, got m=", num_snvs,
                     " n=", num_individuals, " n_ref=", num_reference));
  }
  if (dataset.size() != static_cast<size_t>(num_snvs) * num_individuals ||
      reference.size() != static_cast<size_t>(num_snvs) * num_reference) {
    return absl::InvalidArgumentError("genotype matrix size mismatch");
  }
  for (const auto* matrix : {&dataset, &reference}) {
    for (const uint8_t v : *matrix) {
      if (v > 1) {
        return absl::InvalidArgumentError("genotype entries must be 0 or 1");
      }
    }
  }

  GenotypePanel panel;
  panel.mode_ = mode;
  panel.num_snvs_ = num_snvs;
  panel.num_individuals_ = num_individuals;
  panel.num_reference_ = num_reference;
  panel.dataset_ = std::move(dataset);
  panel.reference_ = std::move(reference);
  panel.dataset_index_ =
      BuildIndex(panel.dataset_, num_individuals, num_snvs);
  panel.reference_index_ =
      BuildIndex(panel.reference_, num_reference, num_snvs);
  panel.dataset_aaf_.resize(num_snvs);
  panel.reference_aaf_.resize(num_snvs);
  for (int j = 0; j < num_snvs; ++j) {
    panel.dataset_aaf_[j] =
        static_cast<double>(panel.carrier_count(Population::kDataset, j)) /
        num_individuals;
    panel.reference_aaf_[j] =
        static_cast<double>(panel.carrier_count(Population::kReference, j)) /
        num_reference;
  }
  if (mode == ReleaseMode::kBeacon) {
    for (int j = 0; j < num_snvs; ++j) {
      if (panel.reference_aaf_[j] >= 0.5) {
        return absl::InvalidArgumentError(absl::StrCat(
            "minor-allele violation at SNV ", j, ": reference frequency ",
            panel.reference_aaf_[j], " >= 0.5"));
      }
    }
  }
  return panel;
}

std::span<const int> GenotypePanel::carriers(Population who, int j) const {
  const CarrierIndex& index =
      who == Population::kDataset ? dataset_index_ : reference_index_;
  return std::span<const int>(index.members)
      .subspan(index.offsets[j], index.offsets[j + 1] - index.offsets[j]);
}

namespace {

absl::Status ValidateConfig(const DatasetConfig& config) {
  if (config.num_snvs < 1 || config.num_individuals < 1 ||
      config.num_reference < 1) {
    return absl::InvalidArgumentError("m, n and n_ref must be >= 1");
  }
  if (config.frequencies.empty()) {
    if (!(config.beta_a > 0.0) || !(config.beta_b > 0.0) ||
        !std::isfinite(config.beta_a) || !std::isfinite(config.beta_b)) {
      return absl::InvalidArgumentError(
          absl::StrCat("beta shape parameters must be positive, got (",
                       config.beta_a, ", ", config.beta_b, ")"));
    }
  } else {
    if (config.frequencies.size() != static_cast<size_t>(config.num_snvs)) {
      return absl::InvalidArgumentError(
          "explicit frequency vector length must equal m");
    }
    for (const double q : config.frequencies) {
      if (!(q >= 0.0 && q <= 1.0)) {
        return absl::InvalidArgumentError(
            absl::StrCat("frequency ", q, " outside [0, 1]"));
      }
      if (config.mode == ReleaseMode::kBeacon && q >= 0.5) {
        return absl::InvalidArgumentError(
            absl::StrCat("beacon frequency ", q, " is not a minor allele"));
      }
    }
  }
  if (config.blocks.length > 1 && !(config.blocks.copy_probability >= 0.0 &&
                                    config.blocks.copy_probability <= 1.0)) {
    return absl::InvalidArgumentError("block copy probability outside [0, 1]");
  }
  return absl::OkStatus();
}

// Fills column j of a rows x cols matrix.
void DrawColumn(std::vector<uint8_t>& matrix, int rows, int cols, int j,
                double q, bool continue_block, double copy_probability,
                Rng& rng) {
  for (int i = 0; i < rows; ++i) {
    const size_t at = static_cast<size_t>(i) * cols + j;
    if (continue_block && rng.Bernoulli(copy_probability)) {
      matrix[at] = matrix[at - 1];
    } else {
      matrix[at] = rng.Bernoulli(q) ? 1 : 0;
    }
  }
}

constexpr int kMaxColumnRedraws = 10000;

}  // namespace

absl::StatusOr<std::vector<double>> GenerateFrequencies(
    const DatasetConfig& config) {
  if (absl::Status s = ValidateConfig(config); !s.ok()) return s;
  if (!config.frequencies.empty()) return config.frequencies;
  Rng rng(DeriveSeed(config.seed, {0}));
  const double hi =
      config.mode == ReleaseMode::kBeacon ? kMaxBeaconFrequency : kMaxAaf;
  std::vector<double> q(config.num_snvs);
  for (double& v : q) {
    v = std::clamp(rng.Beta(config.beta_a, config.beta_b), kMinAaf, hi);
  }
  return q;
}

absl::StatusOr<GenotypePanel> GeneratePanel(const DatasetConfig& config) {
  absl::StatusOr<std::vector<double>> q = GenerateFrequencies(config);
  if (!q.ok()) return q.status();
  const int m = config.num_snvs;
  const int n = config.num_individuals;
  const int n_ref = config.num_reference;
  const bool blocked = config.blocks.length > 1;
  const double rho = config.blocks.copy_probability;

  std::vector<uint8_t> dataset(static_cast<size_t>(n) * m);
  std::vector<uint8_t> reference(static_cast<size_t>(n_ref) * m);
  Rng dataset_rng(DeriveSeed(config.seed, {1}));
  Rng reference_rng(DeriveSeed(config.seed, {2}));
  for (int j = 0; j < m; ++j) {
    const bool continue_block = blocked && j % config.blocks.length != 0;
    DrawColumn(dataset, n, m, j, (*q)[j], continue_block, rho, dataset_rng);
    for (int attempt = 0;; ++attempt) {
      DrawColumn(reference, n_ref, m, j, (*q)[j], continue_block, rho,
                 reference_rng);
      if (config.mode != ReleaseMode::kBeacon) break;
      int count = 0;
      for (int k = 0; k < n_ref; ++k) {
        count += reference[static_cast<size_t>(k) * m + j];
      }
      if (2 * count < n_ref) break;
      if (attempt == kMaxColumnRedraws) {
        return absl::InvalidArgumentError(absl::StrCat(
            "could not draw a minor-allele reference column for SNV ", j));
      }
    }
  }
  return GenotypePanel::Create(config.mode, m, n, n_ref, std::move(dataset),
                               std::move(reference));
}

absl::StatusOr<GenotypePanel> ParsePanel(std::string_view text,
                                         std::optional<ReleaseMode> mode) {
  std::vector<absl::string_view> lines = absl::StrSplit(absl::string_view(text.data(), text.size()), '\n');
  while (!lines.empty() && absl::StripAsciiWhitespace(lines.back()).empty()) {
    lines.pop_back();
  }
  if (lines.empty()) {
    return absl::InvalidArgumentError(
        "dimension error: panel file is empty (expected header 'm n n_ref "
        "mode')");
  }
  std::vector<absl::string_view> header = absl::StrSplit(
      absl::StripAsciiWhitespace(lines[0]), ' ', absl::SkipEmpty());
  int m = 0;
  int n = 0;
  int n_ref = 0;
  if (header.size() != 4 || !absl::SimpleAtoi(header[0], &m) ||
      !absl::SimpleAtoi(header[1], &n) ||
      !absl::SimpleAtoi(header[2], &n_ref)) {
    return absl::InvalidArgumentError(
        "dimension error: malformed header, expected 'm n n_ref mode'");
  }
  absl::StatusOr<ReleaseMode> declared = ParseReleaseMode(
      std::string_view(header[3].data(), header[3].size()));
  if (!declared.ok()) return declared.status();
  if (m < 1 || n < 1 || n_ref < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension error: m, n, n_ref must be >= 1, got ", m, " ", n, " ",
        n_ref));
  }
  if (lines.size() - 1 != static_cast<size_t>(n) + n_ref) {
    return absl::InvalidArgumentError(
        absl::StrCat("dimension error: expected ", n + n_ref,
                     " genotype rows, found ", lines.size() - 1));
  }

  std::vector<uint8_t> dataset(static_cast<size_t>(n) * m);
  std::vector<uint8_t> reference(static_cast<size_t>(n_ref) * m);
  for (int r = 0; r < n + n_ref; ++r) {
    std::vector<absl::string_view> fields =
        absl::StrSplit(absl::StripAsciiWhitespace(lines[r + 1]), ',');
    if (fields.size() != static_cast<size_t>(m)) {
      return absl::InvalidArgumentError(
          absl::StrCat("malformed row width at line ", r + 2, ": expected ", m,
                       " fields, found ", fields.size()));
    }
    uint8_t* out = r < n ? dataset.data() + static_cast<size_t>(r) * m
                         : reference.data() + static_cast<size_t>(r - n) * m;
    for (int j = 0; j < m; ++j) {
      const absl::string_view f = absl::StripAsciiWhitespace(fields[j]);
      if (f == "0") {
        out[j] = 0;
      } else if (f == "1") {
        out[j] = 1;
      } else {
        return absl::InvalidArgumentError(
            absl::StrCat("non-binary genotype symbol '", f, "' at line ",
                         r + 2, ", SNV ", j));
      }
    }
  }
  return GenotypePanel::Create(mode.value_or(*declared), m, n, n_ref,
                               std::move(dataset), std::move(reference));
}

absl::StatusOr<GenotypePanel> LoadPanel(const std::string& path,
                                        std::optional<ReleaseMode> mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParsePanel(buffer.str(), mode);
}

std::string FormatPanel(const GenotypePanel& panel) {
  const int m = panel.num_snvs();
  std::string out = absl::StrCat(m, " ", panel.num_individuals(), " ",
                                 panel.num_reference(), " ",
                                 std::string(ReleaseModeName(panel.mode())), "\n");
  out.reserve(out.size() +
              static_cast<size_t>(2 * m) *
                  (panel.num_individuals() + panel.num_reference()));
  for (const Population who : {Population::kDataset, Population::kReference}) {
    for (int i = 0; i < panel.size(who); ++i) {
      const auto row = panel.row(who, i);
      for (int j = 0; j < m; ++j) {
        out.push_back(row[j] ? '1' : '0');
        out.push_back(j + 1 == m ? '\n' : ',');
      }
    }
  }
  return out;
}

absl::Status SavePanel(const GenotypePanel& panel, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out << FormatPanel(panel);
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

}  // namespace gpriv
