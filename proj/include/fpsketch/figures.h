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

// CSV data behind the standard plots: sensitivity and privacy-budget curves,
// density-ratio curves and the accuracy sweeps.

#ifndef FPSKETCH_FIGURES_H_
#define FPSKETCH_FIGURES_H_

#include <cstdint>
#include <string>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "fpsketch/estimators.h"
#include "fpsketch/quadrature.h"

namespace fpsketch {

enum class FigureId {
  kSensitivity,       // "sensitivity_fig1": M,p,rho
  kRatio,             // "ratio_fig2": p,x,ratio for 0 < p <= 1
  kEpsilon,           // "eps_fig3": p,epsilon
  kRatioExploratory,  // "ratio_fig4": p,x,ratio for 1 < p < 2
  kSynthetic,         // "synthetic_fig5": accuracy on synthetic streams
  kRealData,          // "real_fig6": accuracy on a key,value dataset
};

absl::StatusOr<FigureId> ParseFigureId(absl::string_view name);
std::string FigureIdName(FigureId id);

// Shared stream parameters of the sensitivity and budget curves.
inline constexpr uint64_t kCurveStreamLength = uint64_t{1} << 15;
inline constexpr uint64_t kCurveKeyDomain = uint64_t{1} << 20;
inline constexpr uint64_t kBudgetMaxValue = uint64_t{1} << 4;
inline constexpr uint32_t kCurveWidth = 50;

struct FigureOptions {
  uint64_t seed = 0;
  // 0 means the default: 100 for synthetic data, 5 for the dataset path.
  uint32_t repetitions = 0;
  uint32_t threads = 0;
  // Synthetic stream lengths above this are skipped.
  uint64_t max_n = 10'000'000;
  // CSV dataset for real_fig6; empty requires use_surrogate.
  std::string dataset_path;
  bool use_surrogate = false;
  uint64_t surrogate_n = 1'000'000;
  EstimatorVariant estimator = EstimatorVariant::kGeometricMean;
  QuadratureSettings quadrature;
};

// Returns the CSV text: one "# ..." line naming the figure and its
// parameters, a column header, then one row per plotted point. Output is a
// deterministic function of the options.
absl::StatusOr<std::string> EmitFigureData(FigureId id,
                                           const FigureOptions& options = {});

}  // namespace fpsketch

#endif  // FPSKETCH_FIGURES_H_
