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

// Scale estimators that turn a sketch's accumulator into an F_p estimate.
//
//   median:          (median_j |a_j| / median|X|)^p
//   geometric mean:  prod_j |a_j|^(p/r) / E[|X|^(p/r)]^r
//   harmonic mean:   r E[|X|^-p] / sum_j |a_j|^-p
//
// with X standard symmetric p-stable. Every estimate is then divided by
// q^debias_exponent to undo subsampling.

#ifndef FPSKETCH_ESTIMATORS_H_
#define FPSKETCH_ESTIMATORS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "absl/base/thread_annotations.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "absl/synchronization/mutex.h"
#include "fpsketch/quadrature.h"
#include "fpsketch/sketch.h"

namespace fpsketch {

enum class EstimatorVariant {
  kMedian,
  kGeometricMean,
  kHarmonicMean,
};

// Accepts "median", "gm" / "geometric_mean" and "hm" / "harmonic_mean".
absl::StatusOr<EstimatorVariant> ParseEstimatorVariant(absl::string_view name);
std::string EstimatorVariantName(EstimatorVariant variant);

struct EstimatorKind {
  EstimatorVariant variant = EstimatorVariant::kGeometricMean;
  // Exponent of the q^e correction. Unset means e = p.
  std::optional<double> debias_exponent;
};

struct EstimatorConstants {
  double p = 1.0;
  uint32_t r = 50;
  double median_abs_standard = 1.0;
  // Zero when r < 3 (no finite bias constant is used there).
  double gm_bias = 0.0;
  // E|X|^-p. Zero when p >= 1, where the moment diverges.
  double hm_moment = 0.0;
};

// 0.75-quantile of the standard symmetric p-stable law, i.e. the median of
// |X|, found by bisection on the CDF. Exactly 1 for p = 1.
absl::StatusOr<double> MedianAbsStandard(double p,
                                         const QuadratureSettings& settings = {});

// E[|X|^(p/r)]^r from E|X|^l = (2/pi) Gamma(1 - l/p) Gamma(l) sin(pi l / 2).
// Requires r >= 3.
absl::StatusOr<double> GeometricMeanBias(double p, uint32_t r);

// E|X|^-p = -(2/pi) Gamma(-p) sin(pi p / 2). Requires 0 < p < 1.
absl::StatusOr<double> HarmonicMeanMoment(double p);

absl::StatusOr<EstimatorConstants> ComputeEstimatorConstants(
    double p, uint32_t r, const QuadratureSettings& settings = {});

// Returns the F_p estimate divided by q^debias_exponent. An all-zero
// accumulator gives 0.
absl::StatusOr<double> Estimate(std::span<const double> accumulator,
                                const EstimatorKind& kind,
                                const EstimatorConstants& constants, double q);

// Memoises constants per (p, r). Safe for concurrent use.
class EstimatorConstantsCache {
 public:
  EstimatorConstantsCache() = default;
  explicit EstimatorConstantsCache(QuadratureSettings settings)
      : settings_(settings) {}

  absl::StatusOr<EstimatorConstants> Get(double p, uint32_t r)
      ABSL_LOCKS_EXCLUDED(mutex_);

  // CSV rows "p,r,name,value" with names median_abs_standard, gm_bias and
  // hm_moment. Values are printed with 17 significant digits so a reload is
  // exact.
  std::string ToCsv() const ABSL_LOCKS_EXCLUDED(mutex_);
  absl::Status LoadCsv(absl::string_view text) ABSL_LOCKS_EXCLUDED(mutex_);

  size_t size() const ABSL_LOCKS_EXCLUDED(mutex_);

 private:
  QuadratureSettings settings_;
  mutable absl::Mutex mutex_;
  std::map<std::pair<double, uint32_t>, EstimatorConstants> entries_
      ABSL_GUARDED_BY(mutex_);
};

// Estimates F_p from a sketch using its own p, r and q.
absl::StatusOr<double> QuerySketch(const FpSketch& sketch,
                                   const EstimatorKind& kind,
                                   EstimatorConstantsCache& cache);

}  // namespace fpsketch

#endif  // FPSKETCH_ESTIMATORS_H_
