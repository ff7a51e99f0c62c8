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

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "fpsketch/sketch.h"
#include "fpsketch/status_macros.h"

namespace fpsketch {
namespace {

constexpr char kMagic[4] = {'F', 'P', 'S', 'K'};
constexpr uint16_t kFlagNonPrivate = 1u << 0;
constexpr uint16_t kFlagPerItemSubsampling = 1u << 1;
constexpr uint16_t kKnownFlags = kFlagNonPrivate | kFlagPerItemSubsampling;

template <class T>
void PutLittleEndian(std::string& out, T value) {
  for (size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

void PutDouble(std::string& out, double value) {
  PutLittleEndian(out, std::bit_cast<uint64_t>(value));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <class T>
  T Get() {
    T value = 0;
    for (size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i]))
               << (8 * i);
    }
    pos_ += sizeof(T);
    return value;
  }

  double GetDouble() { return std::bit_cast<double>(Get<uint64_t>()); }

 private:
  std::string_view bytes_;
  size_t pos_ = 0;
};

}  // namespace

std::string Serialize(const FpSketch& sketch) {
  const SketchConfig& config = sketch.config();
  std::string out;
  out.reserve(kSketchHeaderBytes + 8 * sketch.accumulator().size());
  out.append(kMagic, sizeof(kMagic));
  PutLittleEndian<uint16_t>(out, kSketchFormatVersion);
  uint16_t flags = 0;
  if (config.non_private) flags |= kFlagNonPrivate;
  if (config.subsample_mode == SubsampleMode::kPerItem) {
    flags |= kFlagPerItemSubsampling;
  }
  PutLittleEndian<uint16_t>(out, flags);
  PutDouble(out, config.p);
  PutDouble(out, config.q);
  PutLittleEndian<uint64_t>(out, config.seed);
  PutLittleEndian<uint64_t>(out, config.m);
  PutLittleEndian<uint64_t>(out, config.max_value);
  PutLittleEndian<uint64_t>(out, sketch.stream_offset());
  PutLittleEndian<uint64_t>(out, sketch.items_seen());
  PutLittleEndian<uint32_t>(out, config.r);
  PutLittleEndian<uint32_t>(out,
                            static_cast<uint32_t>(sketch.accumulator().size()));
  for (double a : sketch.accumulator()) PutDouble(out, a);
  return out;
}

absl::StatusOr<FpSketch> Deserialize(std::string_view bytes) {
  if (bytes.size() < kSketchHeaderBytes) {
    return absl::DataLossError(absl::StrCat("sketch truncated: ", bytes.size(),
                                            " bytes, header needs ",
                                            kSketchHeaderBytes));
  }
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    return absl::DataLossError("not an F_p sketch: bad magic");
  }
  Reader reader(bytes.substr(sizeof(kMagic)));
  const auto version = reader.Get<uint16_t>();
  if (version != kSketchFormatVersion) {
    return absl::FailedPreconditionError(
        absl::StrCat("unsupported sketch format version ", version,
                     " (this build reads version ", kSketchFormatVersion, ")"));
  }
  const auto flags = reader.Get<uint16_t>();
  if ((flags & ~kKnownFlags) != 0) {
    return absl::DataLossError(absl::StrCat("unknown sketch flags ", flags));
  }
  SketchConfig config;
  config.non_private = (flags & kFlagNonPrivate) != 0;
  config.subsample_mode = (flags & kFlagPerItemSubsampling) != 0
                              ? SubsampleMode::kPerItem
                              : SubsampleMode::kPerRow;
  config.p = reader.GetDouble();
  config.q = reader.GetDouble();
  config.seed = reader.Get<uint64_t>();
  config.m = reader.Get<uint64_t>();
  config.max_value = reader.Get<uint64_t>();
  const auto stream_offset = reader.Get<uint64_t>();
  const auto items_seen = reader.Get<uint64_t>();
  config.r = reader.Get<uint32_t>();
  const auto length = reader.Get<uint32_t>();
  if (length != config.r) {
    return absl::DataLossError(absl::StrCat(
        "accumulator length ", length, " does not match sketch width ", config.r));
  }
  const size_t expected = kSketchHeaderBytes + size_t{8} * length;
  if (bytes.size() != expected) {
    return absl::DataLossError(absl::StrCat("sketch body has ", bytes.size(),
                                            " bytes, expected ", expected));
  }
  if (absl::Status valid = ValidateSketchConfig(config); !valid.ok()) {
    return absl::DataLossError(
        absl::StrCat("corrupt sketch config: ", valid.message()));
  }
  FPSKETCH_ASSIGN_OR_RETURN(FpSketch sketch,
                            FpSketch::Create(config, stream_offset));
  Reader body(bytes.substr(kSketchHeaderBytes));
  for (uint32_t j = 0; j < length; ++j) {
    sketch.accumulator_[j] = body.GetDouble();
  }
  sketch.items_seen_ = items_seen;
  return sketch;
}

}  // namespace fpsketch
