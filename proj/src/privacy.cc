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

#include "fpsketch/privacy.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "fpsketch/status_macros.h"

namespace fpsketch {
namespace {

absl::Status CheckUnitOpen(const char* name, double value) {
  if (!(value > 0.0 && value < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat(name, " must lie in (0, 1), got ", value));
  }
  return absl::OkStatus();
}

absl::Status CheckRate(double q) {
  if (!(q > 0.0 && q <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("subsampling rate q must lie in (0, 1], got ", q));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status ValidateSensitivityParams(const SensitivityParams& params) {
  if (!(params.p > 0.0 && params.p <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sensitivity is only bounded for 0 < p <= 1, got p = ", params.p));
  }
  if (params.n < 1) return absl::InvalidArgumentError("n must be at least 1");
  if (params.m < 2) return absl::InvalidArgumentError("m must be at least 2");
  if (params.max_value < 1) {
    return absl::InvalidArgumentError("M must be at least 1");
  }
  return absl::OkStatus();
}

absl::StatusOr<double> MultiplicativeSensitivity(
    const SensitivityParams& params) {
  FPSKETCH_RETURN_IF_ERROR(ValidateSensitivityParams(params));
  const double p = params.p;
  const auto rest = static_cast<double>(params.n - 1);
  const auto max_value = static_cast<double>(params.max_value);
  const double log_domain = std::log(static_cast<double>(params.m - 1));
  // (m - 1)^((p - 1)/p) underflows for small p; fine unless n = 1.
  const double floor_term = std::exp((p - 1.0) / p * log_domain);
  const double prefactor = std::exp2(2.0 - 2.0 * p);
  const double denominator = rest + floor_term;
  if (denominator > 0.0 && std::isfinite(denominator)) {
    return prefactor * std::pow((rest + max_value) / denominator, p);
  }
  const double log_ratio =
      std::log(rest + max_value) - (p - 1.0) / p * log_domain;
  return prefactor * std::exp(p * log_ratio);
}

absl::StatusOr<AmplificationMode> ParseAmplificationMode(
    absl::string_view name) {
  if (name == "linear") return AmplificationMode::kLinear;
  if (name == "standard") return AmplificationMode::kStandard;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown amplification mode '", name, "'"));
}

std::string AmplificationModeName(AmplificationMode mode) {
  return mode == AmplificationMode::kStandard ? "standard" : "linear";
}

absl::StatusOr<double> Epsilon(const SensitivityParams& params, double q,
                               uint32_t r, AmplificationMode mode) {
  FPSKETCH_RETURN_IF_ERROR(CheckRate(q));
  if (r < 1) return absl::InvalidArgumentError("r must be at least 1");
  FPSKETCH_ASSIGN_OR_RETURN(double rho, MultiplicativeSensitivity(params));
  const double log_rho = std::log(rho);
  if (mode == AmplificationMode::kStandard) {
    return r * std::log1p(q * std::expm1(log_rho / params.p));
  }
  return q * r / params.p * log_rho;
}

absl::StatusOr<UtilityBound> ComputeUtilityBound(double gamma, double eta,
                                                 double lambda, double q,
                                                 double p) {
  FPSKETCH_RETURN_IF_ERROR(CheckUnitOpen("gamma", gamma));
  FPSKETCH_RETURN_IF_ERROR(CheckUnitOpen("eta", eta));
  FPSKETCH_RETURN_IF_ERROR(CheckUnitOpen("lambda", lambda));
  FPSKETCH_RETURN_IF_ERROR(CheckRate(q));
  if (!(p > 0.0 && p <= 2.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("p must lie in (0, 2], got ", p));
  }
  const double variance =
      std::max(0.0, 1.0 - 2.0 * std::pow(q, p + 1.0) + std::pow(q, 2.0 * p + 1.0));
  UtilityBound bound;
  bound.gamma_total = gamma + std::sqrt(variance / lambda);
  bound.eta_total = eta + lambda;
  bound.r_required =
      static_cast<uint64_t>(std::ceil(std::log(1.0 / eta) / (gamma * gamma)));
  return bound;
}

absl::StatusOr<PrivacyReport> MakePrivacyReport(const SensitivityParams& params,
                                                double q, uint32_t r,
                                                AmplificationMode mode) {
  PrivacyReport report;
  FPSKETCH_ASSIGN_OR_RETURN(report.rho, MultiplicativeSensitivity(params));
  FPSKETCH_ASSIGN_OR_RETURN(report.epsilon, Epsilon(params, q, r, mode));
  report.q = q;
  report.r = r;
  report.p = params.p;
  report.mode = mode;
  return report;
}

double CauchyDensityRatio(double rho, double x) {
  return (rho * rho + x * x) / (rho * (1.0 + x * x));
}

bool CauchyRatioBoundCheck(double rho, std::span<const double> xs) {
  if (!(rho >= 1.0) || !std::isfinite(rho)) return false;
  std::vector<double> magnitudes;
  magnitudes.reserve(xs.size());
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
    magnitudes.push_back(std::abs(x));
  }
  std::sort(magnitudes.begin(), magnitudes.end());
  constexpr double kSlack = 1e-12;
  double previous = rho;
  for (double x : magnitudes) {
    const double ratio = CauchyDensityRatio(rho, x);
    if (ratio < (1.0 - kSlack) / rho || ratio > rho * (1.0 + kSlack)) {
      return false;
    }
    if (ratio > previous * (1.0 + kSlack)) return false;
    previous = ratio;
  }
  return true;
}

}  // namespace fpsketch
