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

// Closed-form privacy accounting for F_p sketches with 0 < p <= 1.
//
// For streams of length n over keys [1, m] with values in [1, M], F_p has
// pure multiplicative sensitivity at most
//
//   rho = 2^(2 - 2p) * ((n - 1 + M) / (n - 1 + (m - 1)^((p - 1)/p)))^p,
//
// and a width-r sketch whose rows each keep an item with probability q is
// (q r / p) ln(rho)-differentially private with delta = 0.

#ifndef FPSKETCH_PRIVACY_H_
#define FPSKETCH_PRIVACY_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace fpsketch {

struct SensitivityParams {
  uint64_t n = 1;
  uint64_t m = 2;
  uint64_t max_value = 1;
  double p = 1.0;
};

absl::Status ValidateSensitivityParams(const SensitivityParams& params);

absl::StatusOr<double> MultiplicativeSensitivity(const SensitivityParams& params);

enum class AmplificationMode {
  // epsilon = (q r / p) ln rho.
  kLinear,
  // The standard amplification-by-subsampling bound: each row's
  // (1/p) ln rho budget becomes ln(1 + q (e^eps - 1)) and the r rows are
  // composed. Never smaller than the linear figure; offered for comparison.
  kStandard,
};

absl::StatusOr<AmplificationMode> ParseAmplificationMode(absl::string_view name);
std::string AmplificationModeName(AmplificationMode mode);

absl::StatusOr<double> Epsilon(const SensitivityParams& params, double q,
                               uint32_t r,
                               AmplificationMode mode = AmplificationMode::kLinear);

struct UtilityBound {
  double gamma_total = 0.0;
  double eta_total = 0.0;
  // ceil(gamma^-2 ln(1/eta)); the leading constant is taken as 1, so treat
  // this as advisory.
  uint64_t r_required = 0;
};

// Accuracy of the subsampled sketch: an estimator that is (gamma, eta)
// accurate on the kept items is
// (gamma + sqrt((1 - 2 q^(p+1) + q^(2p+1)) / lambda), eta + lambda)
// accurate on the full stream.
absl::StatusOr<UtilityBound> ComputeUtilityBound(double gamma, double eta,
                                                 double lambda, double q,
                                                 double p);

struct PrivacyReport {
  double rho = 1.0;
  double epsilon = 0.0;
  double delta = 0.0;  // always 0
  double q = 1.0;
  uint32_t r = 1;
  double p = 1.0;
  AmplificationMode mode = AmplificationMode::kLinear;
  std::optional<UtilityBound> utility;
};

absl::StatusOr<PrivacyReport> MakePrivacyReport(
    const SensitivityParams& params, double q, uint32_t r,
    AmplificationMode mode = AmplificationMode::kLinear);

// D_{1,1}(x) / D_{1,rho}(x) = (rho^2 + x^2) / (rho (1 + x^2)).
double CauchyDensityRatio(double rho, double x);

// True when every ratio on the grid lies in [1/rho, rho] and the ratios do
// not increase with |x|. False for rho < 1 or a non-finite grid.
bool CauchyRatioBoundCheck(double rho, std::span<const double> xs);

}  // namespace fpsketch

#endif  // FPSKETCH_PRIVACY_H_
