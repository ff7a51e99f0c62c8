// Copyright 2026 The fpsketch Authors
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

#include "fpsketch/sketch.h"

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "fpsketch/random.h"
#include "fpsketch/stable.h"
#include "fpsketch/status_macros.h"

namespace fpsketch {

absl::Status ValidateSketchConfig(const SketchConfig& config) {
  if (!(config.p > 0.0 && config.p <= 2.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("p must lie in (0, 1], got ", config.p));
  }
  if (config.p > 1.0 && !config.non_private) {
    return absl::InvalidArgumentError(absl::StrCat(
        "p = ", config.p,
        " > 1 carries no privacy guarantee; it needs the non-private flag"));
  }
  if (config.r < 1 || config.r > kMaxSketchWidth) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sketch width r must lie in [1, ", kMaxSketchWidth, "], got ", config.r));
  }
  if (!(config.q > 0.0 && config.q <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("subsampling rate q must lie in (0, 1], got ", config.q));
  }
  if (config.m < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("key domain size m must be at least 2, got ", config.m));
  }
  if (config.max_value < 1) {
    return absl::InvalidArgumentError("max value M must be at least 1");
  }
  if (config.subsample_mode != SubsampleMode::kPerRow &&
      config.subsample_mode != SubsampleMode::kPerItem) {
    return absl::InvalidArgumentError("unknown subsampling mode");
  }
  return absl::OkStatus();
}

absl::Status ValidateStreamItem(const SketchConfig& config,
                                const StreamItem& item) {
  if (item.key < 1 || item.key > config.m) {
    return absl::OutOfRangeError(absl::StrCat(
        "key ", item.key, " outside the key domain [1, ", config.m, "]"));
  }
  if (item.value < 1 || item.value > config.max_value) {
    return absl::OutOfRangeError(absl::StrCat(
        "value ", item.value, " outside [1, ", config.max_value, "]"));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> ProjectionEntry(const SketchConfig& config,
                                       uint32_t row, uint64_t key) {
  FPSKETCH_RETURN_IF_ERROR(ValidateSketchConfig(config));
  if (row >= config.r) {
    return absl::OutOfRangeError(
        absl::StrCat("row ", row, " outside [0, ", config.r, ")"));
  }
  if (key < 1 || key > config.m) {
    return absl::OutOfRangeError(
        absl::StrCat("key ", key, " outside [1, ", config.m, "]"));
  }
  FPSKETCH_ASSIGN_OR_RETURN(FpSketch sketch, FpSketch::Create(config));
  return sketch.ProjectionEntryUnchecked(row, key);
}

FpSketch::FpSketch(const SketchConfig& config, StableSampler sampler,
                   uint64_t stream_offset)
    : config_(config),
      sampler_(sampler),
      log_keep_complement_(config.q < 1.0
                               ? std::log1p(-config.q)
                               : -std::numeric_limits<double>::infinity()),
      accumulator_(config.r, 0.0),
      stream_offset_(stream_offset) {}

absl::StatusOr<FpSketch> FpSketch::Create(const SketchConfig& config,
                                          uint64_t stream_offset) {
  FPSKETCH_RETURN_IF_ERROR(ValidateSketchConfig(config));
  FPSKETCH_ASSIGN_OR_RETURN(StableSampler sampler,
                            StableSampler::Create(config.p));
  return FpSketch(config, sampler, stream_offset);
}

double FpSketch::ProjectionEntryUnchecked(uint32_t row, uint64_t key) const {
  SplitMix64 gen(HashCombine(config_.seed ^ kProjectionDomain, row, key));
  return sampler_(gen);
}

absl::Status FpSketch::Update(const StreamItem& item) {
  FPSKETCH_RETURN_IF_ERROR(ValidateStreamItem(config_, item));
  const uint64_t index = stream_offset_ + items_seen_;
  ++items_seen_;
  const auto value = static_cast<double>(item.value);
  const uint32_t r = config_.r;

  if (config_.q >= 1.0) {
    for (uint32_t row = 0; row < r; ++row) {
      accumulator_[row] += value * ProjectionEntryUnchecked(row, item.key);
    }
    return absl::OkStatus();
  }

  SplitMix64 coins(HashCombine(config_.seed ^ kCoinDomain, index));
  if (config_.subsample_mode == SubsampleMode::kPerItem) {
    if (UniformOpen(coins()) < config_.q) {
      for (uint32_t row = 0; row < r; ++row) {
        accumulator_[row] += value * ProjectionEntryUnchecked(row, item.key);
      }
    }
    return absl::OkStatus();
  }

  // Independent Bernoulli(q) per row, realised by jumping over the rejected
  // rows with Geometric(q) gaps.
  auto gap = [&]() -> double {
    return std::floor(std::log(UniformOpen(coins())) / log_keep_complement_);
  };
  double row = gap();
  while (row < static_cast<double>(r)) {
    const auto j = static_cast<uint32_t>(row);
    accumulator_[j] += value * ProjectionEntryUnchecked(j, item.key);
    row += 1.0 + gap();
  }
  return absl::OkStatus();
}

absl::Status FpSketch::Update(std::span<const StreamItem> items) {
  for (const StreamItem& item : items) {
    FPSKETCH_RETURN_IF_ERROR(Update(item));
  }
  return absl::OkStatus();
}

absl::StatusOr<FpSketch> Merge(const FpSketch& left, const FpSketch& right) {
  if (!(left.config() == right.config())) {
    return absl::InvalidArgumentError(
        "cannot merge sketches with different configurations");
  }
  FpSketch merged = left;
  for (size_t j = 0; j < merged.accumulator_.size(); ++j) {
    merged.accumulator_[j] += right.accumulator_[j];
  }
  merged.items_seen_ = left.items_seen_ + right.items_seen_;
  merged.stream_offset_ = std::min(left.stream_offset_, right.stream_offset_);
  return merged;
}

}  // namespace fpsketch
