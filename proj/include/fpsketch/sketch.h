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

// The F_p sketch: r accumulators a_j = sum_i b_ij v_i P[j, k_i], where P is a
// virtual r x m matrix of standard p-stable draws and b_ij are Bernoulli(q)
// subsampling coins. Each a_j is distributed D_{p, F_p} over the kept items.
//
// P is never stored. Entry (j, k) is regenerated on demand from
// hash(seed, j, k), so a sketch occupies O(r) words whatever m and n are.
// Coins are a function of (seed, global item index), which makes replays and
// merges of contiguous stream partitions reproduce the whole-stream sketch.

#ifndef FPSKETCH_SKETCH_H_
#define FPSKETCH_SKETCH_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fpsketch/stable.h"

namespace fpsketch {

struct StreamItem {
  uint64_t key = 1;    // in [1, m]
  uint64_t value = 1;  // in [1, M]

  bool operator==(const StreamItem&) const = default;
};

enum class SubsampleMode : uint8_t {
  // Every (item, row) pair gets its own coin.
  kPerRow = 0,
  // One coin per item decides all rows at once.
  kPerItem = 1,
};

inline constexpr uint32_t kMaxSketchWidth = uint32_t{1} << 24;

struct SketchConfig {
  double p = 1.0;
  uint32_t r = 50;
  double q = 1.0;
  uint64_t seed = 0;
  uint64_t m = uint64_t{1} << 32;
  uint64_t max_value = uint64_t{1} << 32;
  // Allows p in (1, 2]. No privacy guarantee holds for such sketches.
  bool non_private = false;
  SubsampleMode subsample_mode = SubsampleMode::kPerRow;

  bool operator==(const SketchConfig&) const = default;
};

absl::Status ValidateSketchConfig(const SketchConfig& config);

// Checks 1 <= key <= m and 1 <= value <= M.
absl::Status ValidateStreamItem(const SketchConfig& config,
                                const StreamItem& item);

// Entry (row, key) of the virtual projection matrix.
absl::StatusOr<double> ProjectionEntry(const SketchConfig& config,
                                       uint32_t row, uint64_t key);

class FpSketch {
 public:
  // A fresh all-zero sketch. `stream_offset` is the global index of the
  // first item this sketch will see; partitions of one stream built in
  // parallel pass their starting position so their coins line up with a
  // sequential build.
  static absl::StatusOr<FpSketch> Create(const SketchConfig& config,
                                         uint64_t stream_offset = 0);

  absl::Status Update(const StreamItem& item);
  absl::Status Update(std::span<const StreamItem> items);

  const SketchConfig& config() const { return config_; }
  std::span<const double> accumulator() const { return accumulator_; }
  uint64_t items_seen() const { return items_seen_; }
  uint64_t stream_offset() const { return stream_offset_; }

  // Entry (row, key) without range checks; the caller guarantees
  // row < r and 1 <= key <= m.
  double ProjectionEntryUnchecked(uint32_t row, uint64_t key) const;

  bool operator==(const FpSketch& other) const {
    return config_ == other.config_ && accumulator_ == other.accumulator_ &&
           items_seen_ == other.items_seen_ &&
           stream_offset_ == other.stream_offset_;
  }

 private:
  FpSketch(const SketchConfig& config, StableSampler sampler,
           uint64_t stream_offset);

  friend absl::StatusOr<FpSketch> Merge(const FpSketch& left,
                                        const FpSketch& right);
  friend absl::StatusOr<FpSketch> Deserialize(std::string_view bytes);

  SketchConfig config_;
  StableSampler sampler_;
  double log_keep_complement_;  // log(1 - q); -inf when q == 1
  std::vector<double> accumulator_;
  uint64_t items_seen_ = 0;
  uint64_t stream_offset_ = 0;
};

// Element-wise sum. Requires identical configs. The result continues the
// stream at min(offsets) + total items, which is correct when the inputs
// cover adjacent stream ranges.
absl::StatusOr<FpSketch> Merge(const FpSketch& left, const FpSketch& right);

// Versioned little-endian binary encoding:
//
//   0   char[4]  magic "FPSK"
//   4   u16      format version (1)
//   6   u16      flags: bit 0 non-private, bit 1 per-item subsampling
//   8   f64      p
//   16  f64      q
//   24  u64      seed
//   32  u64      m
//   40  u64      M
//   48  u64      stream offset
//   56  u64      items seen
//   64  u32      r
//   68  u32      accumulator length (must equal r)
//   72  f64[r]   accumulator
inline constexpr uint16_t kSketchFormatVersion = 1;
inline constexpr size_t kSketchHeaderBytes = 72;

std::string Serialize(const FpSketch& sketch);

// Fails with kDataLoss on bad magic, truncation, inconsistent lengths or an
// invalid config, and with kFailedPrecondition on an unknown version.
absl::StatusOr<FpSketch> Deserialize(std::string_view bytes);

}  // namespace fpsketch

#endif  // FPSKETCH_SKETCH_H_
