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

#include "fpsketch/estimators.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "absl/strings/strip.h"
#include "absl/synchronization/mutex.h"
#include "fpsketch/stable.h"
#include "fpsketch/status_macros.h"

namespace fpsketch {
namespace {

constexpr double kPi = std::numbers::pi;

// log E|X|^l for standard symmetric p-stable X, valid for -1 < l < p.
double LogAbsMoment(double p, double l) {
  return std::log(2.0 / kPi) + std::lgamma(1.0 - l / p) + std::lgamma(l) +
         std::log(std::sin(kPi * l / 2.0));
}

absl::Status CheckMinimumWidth(EstimatorVariant variant, uint32_t r) {
  if (variant == EstimatorVariant::kGeometricMean && r < 3) {
    return absl::InvalidArgumentError(absl::StrCat(
        "the geometric-mean estimator needs r >= 3, got r = ", r));
  }
  if (r < 1) return absl::InvalidArgumentError("accumulator is empty");
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<EstimatorVariant> ParseEstimatorVariant(absl::string_view name) {
  if (name == "median") return EstimatorVariant::kMedian;
  if (name == "gm" || name == "geometric_mean") {
    return EstimatorVariant::kGeometricMean;
  }
  if (name == "hm" || name == "harmonic_mean") {
    return EstimatorVariant::kHarmonicMean;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown estimator '", name, "' (expected median, gm or hm)"));
}

std::string EstimatorVariantName(EstimatorVariant variant) {
  switch (variant) {
    case EstimatorVariant::kMedian:
      return "median";
    case EstimatorVariant::kGeometricMean:
      return "gm";
    case EstimatorVariant::kHarmonicMean:
      return "hm";
  }
  return "unknown";
}

absl::StatusOr<double> MedianAbsStandard(double p,
                                         const QuadratureSettings& settings) {
  FPSKETCH_RETURN_IF_ERROR(ValidateStabilityIndex(p));
  if (p == 1.0) return 1.0;
  FPSKETCH_ASSIGN_OR_RETURN(StableParams params, StableParams::Create(p, 1.0));
  auto above = [&](double x) -> absl::StatusOr<bool> {
    FPSKETCH_ASSIGN_OR_RETURN(double cdf, Cdf(params, x, settings));
    return cdf >= 0.75;
  };
  double lo = 1.0;
  double hi = 1.0;
  FPSKETCH_ASSIGN_OR_RETURN(bool start_above, above(1.0));
  if (start_above) {
    for (;;) {
      lo *= 0.5;
      FPSKETCH_ASSIGN_OR_RETURN(bool a, above(lo));
      if (!a) break;
      hi = lo;
      if (lo < 1e-300) return absl::InternalError("quartile search underflowed");
    }
  } else {
    for (;;) {
      hi *= 2.0;
      FPSKETCH_ASSIGN_OR_RETURN(bool a, above(hi));
      if (a) break;
      lo = hi;
      if (hi > 1e300) return absl::InternalError("quartile search overflowed");
    }
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    FPSKETCH_ASSIGN_OR_RETURN(bool a, above(mid));
    (a ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

absl::StatusOr<double> GeometricMeanBias(double p, uint32_t r) {
  FPSKETCH_RETURN_IF_ERROR(ValidateStabilityIndex(p));
  if (r < 3) {
    return absl::InvalidArgumentError(
        absl::StrCat("geometric-mean bias needs r >= 3, got ", r));
  }
  return std::exp(r * LogAbsMoment(p, p / r));
}

absl::StatusOr<double> HarmonicMeanMoment(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "the harmonic-mean estimator needs 0 < p < 1, got p = ", p));
  }
  return -(2.0 / kPi) * std::tgamma(-p) * std::sin(kPi * p / 2.0);
}

absl::StatusOr<EstimatorConstants> ComputeEstimatorConstants(
    double p, uint32_t r, const QuadratureSettings& settings) {
  FPSKETCH_RETURN_IF_ERROR(ValidateStabilityIndex(p));
  if (r < 1) return absl::InvalidArgumentError("r must be at least 1");
  EstimatorConstants constants;
  constants.p = p;
  constants.r = r;
  FPSKETCH_ASSIGN_OR_RETURN(constants.median_abs_standard,
                            MedianAbsStandard(p, settings));
  if (r >= 3) {
    FPSKETCH_ASSIGN_OR_RETURN(constants.gm_bias, GeometricMeanBias(p, r));
  }
  if (p < 1.0) {
    FPSKETCH_ASSIGN_OR_RETURN(constants.hm_moment, HarmonicMeanMoment(p));
  }
  return constants;
}

absl::StatusOr<double> Estimate(std::span<const double> accumulator,
                                const EstimatorKind& kind,
                                const EstimatorConstants& constants, double q) {
  if (accumulator.empty()) {
    return absl::InvalidArgumentError("accumulator is empty");
  }
  if (accumulator.size() != constants.r) {
    return absl::InvalidArgumentError(
        absl::StrCat("constants are for r = ", constants.r,
                     " but the accumulator has ", accumulator.size(), " entries"));
  }
  if (!(q > 0.0 && q <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("subsampling rate q must lie in (0, 1], got ", q));
  }
  const double p = constants.p;
  const double exponent = kind.debias_exponent.value_or(p);
  if (!std::isfinite(exponent)) {
    return absl::InvalidArgumentError("debias exponent must be finite");
  }
  FPSKETCH_RETURN_IF_ERROR(CheckMinimumWidth(kind.variant, constants.r));

  bool all_zero = true;
  for (double a : accumulator) {
    if (!std::isfinite(a)) {
      return absl::InvalidArgumentError(
          absl::StrCat("accumulator holds a non-finite entry: ", a));
    }
    all_zero = all_zero && a == 0.0;
  }
  if (all_zero) return 0.0;

  const auto r = static_cast<double>(accumulator.size());
  double raw = 0.0;
  switch (kind.variant) {
    case EstimatorVariant::kMedian: {
      if (!(constants.median_abs_standard > 0.0)) {
        return absl::InvalidArgumentError("median constant must be positive");
      }
      std::vector<double> magnitudes(accumulator.size());
      std::transform(accumulator.begin(), accumulator.end(), magnitudes.begin(),
                     [](double a) { return std::abs(a); });
      const size_t half = magnitudes.size() / 2;
      std::nth_element(magnitudes.begin(), magnitudes.begin() + half,
                       magnitudes.end());
      double median = magnitudes[half];
      if (magnitudes.size() % 2 == 0) {
        median = 0.5 * (median + *std::max_element(magnitudes.begin(),
                                                   magnitudes.begin() + half));
      }
      raw = std::pow(median / constants.median_abs_standard, p);
      break;
    }
    case EstimatorVariant::kGeometricMean: {
      if (!(constants.gm_bias > 0.0)) {
        return absl::InvalidArgumentError(
            "geometric-mean bias constant must be positive");
      }
      double log_sum = 0.0;
      for (double a : accumulator) log_sum += std::log(std::abs(a));
      raw = std::exp(p * log_sum / r - std::log(constants.gm_bias));
      break;
    }
    case EstimatorVariant::kHarmonicMean: {
      if (!(p < 1.0) || !(constants.hm_moment > 0.0)) {
        return absl::InvalidArgumentError(
            "the harmonic-mean estimator needs p < 1 and a positive moment");
      }
      double inverse_sum = 0.0;
      for (double a : accumulator) inverse_sum += std::pow(std::abs(a), -p);
      raw = r * constants.hm_moment / inverse_sum;
      break;
    }
  }
  return raw / std::pow(q, exponent);
}

absl::StatusOr<EstimatorConstants> EstimatorConstantsCache::Get(double p,
                                                                uint32_t r) {
  const auto key = std::make_pair(p, r);
  {
    absl::MutexLock lock(&mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
  }
  // Computed outside the lock; a racing duplicate computes the same value.
  FPSKETCH_ASSIGN_OR_RETURN(EstimatorConstants constants,
                            ComputeEstimatorConstants(p, r, settings_));
  absl::MutexLock lock(&mutex_);
  return entries_.emplace(key, constants).first->second;
}

std::string EstimatorConstantsCache::ToCsv() const {
  absl::MutexLock lock(&mutex_);
  std::string out = "p,r,name,value\n";
  char line[128];
  for (const auto& [key, c] : entries_) {
    const std::pair<const char*, double> rows[] = {
        {"median_abs_standard", c.median_abs_standard},
        {"gm_bias", c.gm_bias},
        {"hm_moment", c.hm_moment}};
    for (const auto& [name, value] : rows) {
      std::snprintf(line, sizeof(line), "%.17g,%u,%s,%.17g\n", key.first,
                    key.second, name, value);
      out += line;
    }
  }
  return out;
}

absl::Status EstimatorConstantsCache::LoadCsv(absl::string_view text) {
  std::map<std::pair<double, uint32_t>, EstimatorConstants> loaded;
  int line_number = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_number;
    line = absl::StripAsciiWhitespace(line);
    if (line.empty() || line == "p,r,name,value") continue;
    std::vector<absl::string_view> fields = absl::StrSplit(line, ',');
    double p = 0.0;
    uint32_t r = 0;
    double value = 0.0;
    if (fields.size() != 4 || !absl::SimpleAtod(fields[0], &p) ||
        !absl::SimpleAtoi(fields[1], &r) || !absl::SimpleAtod(fields[3], &value)) {
      return absl::DataLossError(
          absl::StrCat("constants cache line ", line_number, ": malformed row"));
    }
    EstimatorConstants& c = loaded[{p, r}];
    c.p = p;
    c.r = r;
    if (fields[2] == "median_abs_standard") {
      c.median_abs_standard = value;
    } else if (fields[2] == "gm_bias") {
      c.gm_bias = value;
    } else if (fields[2] == "hm_moment") {
      c.hm_moment = value;
    } else {
      return absl::DataLossError(absl::StrCat("constants cache line ",
                                              line_number, ": unknown name '",
                                              fields[2], "'"));
    }
  }
  absl::MutexLock lock(&mutex_);
  for (auto& [key, c] : loaded) entries_[key] = c;
  return absl::OkStatus();
}

size_t EstimatorConstantsCache::size() const {
  absl::MutexLock lock(&mutex_);
  return entries_.size();
}

absl::StatusOr<double> QuerySketch(const FpSketch& sketch,
                                   const EstimatorKind& kind,
                                   EstimatorConstantsCache& cache) {
  const SketchConfig& config = sketch.config();
  FPSKETCH_ASSIGN_OR_RETURN(EstimatorConstants constants,
                            cache.Get(config.p, config.r));
  return Estimate(sketch.accumulator(), kind, constants, config.q);
}

}  // namespace fpsketch
