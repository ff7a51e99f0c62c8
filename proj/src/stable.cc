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

#include "fpsketch/stable.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "fpsketch/quadrature.h"
#include "fpsketch/status_macros.h"

namespace fpsketch {
namespace {

constexpr double kPi = std::numbers::pi;

enum class Kernel {
  kCosine,     // cos(x t)
  kSineOverT,  // sin(x t) / t
};

// integral_0^inf kernel(x, t) exp(-zeta t^p) dt for x > 0.
absl::StatusOr<double> FourierIntegral(double p, double zeta, double x,
                                       Kernel kernel,
                                       const QuadratureSettings& settings) {
  auto integrand = [p, zeta, x, kernel](double t) {
    const double envelope = std::exp(-zeta * std::pow(t, p));
    if (kernel == Kernel::kCosine) return std::cos(x * t) * envelope;
    return std::sin(x * t) / t * envelope;
  };

  // Integral tolerance, scaled so that the final division by pi meets
  // settings.tolerance.
  const double tol = settings.tolerance * kPi;
  const double half_period = kPi / x;
  // The first piece ends at the first sign change of the kernel; piece k >= 1
  // is [start(k), start(k) + half_period] and has sign (-1)^k.
  const double first_end =
      kernel == Kernel::kCosine ? 0.5 * half_period : half_period;
  auto piece_start = [&](int64_t k) {
    return kernel == Kernel::kCosine ? (static_cast<double>(k) - 0.5) * half_period
                                     : static_cast<double>(k) * half_period;
  };

  SubdivisionBudget budget(settings.max_subdivisions);
  const bool completely_monotone =
      p <= 1.0 && std::isinf(settings.max_frequency);

  if (completely_monotone) {
    FPSKETCH_ASSIGN_OR_RETURN(
        IntegrationResult first,
        IntegrateAdaptive(integrand, 0.0, first_end, tol * 1e-6, budget));
    const double piece_tol = tol * 1e-6;
    auto magnitude = [&](int64_t k) -> absl::StatusOr<double> {
      const double a = piece_start(k);
      absl::StatusOr<IntegrationResult> piece =
          IntegrateAdaptive(integrand, a, a + half_period, piece_tol, budget);
      if (!piece.ok()) return piece.status();
      return (k % 2 == 0 ? 1.0 : -1.0) * piece->value;
    };
    FPSKETCH_ASSIGN_OR_RETURN(double leading, magnitude(1));
    const int terms = AlternatingTermsFor(std::abs(leading), tol * 1e-4);
    FPSKETCH_ASSIGN_OR_RETURN(
        double tail, SumAlternatingMoments(
                         [&](int j) -> absl::StatusOr<double> {
                           if (j == 0) return leading;
                           return magnitude(j + 1);
                         },
                         terms));
    return first.value - tail;
  }

  double truncation = std::pow(std::log(10.0 / settings.tolerance) / zeta, 1.0 / p);
  truncation = std::min(truncation, settings.max_frequency);
  if (truncation <= first_end) {
    FPSKETCH_ASSIGN_OR_RETURN(
        IntegrationResult head,
        IntegrateAdaptive(integrand, 0.0, truncation, tol, budget));
    return head.value;
  }
  const double pieces = std::ceil((truncation - first_end) / half_period);
  if (pieces >= static_cast<double>(budget.remaining())) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "Fourier integral needs ", pieces, " half-periods up to t = ",
        truncation, ", more than max_subdivisions allows"));
  }
  const auto count = static_cast<int64_t>(pieces);
  const double piece_tol = tol / (2.0 * static_cast<double>(count + 1));
  FPSKETCH_ASSIGN_OR_RETURN(
      IntegrationResult first,
      IntegrateAdaptive(integrand, 0.0, first_end, piece_tol, budget));
  double sum = first.value;
  for (int64_t k = 1; k <= count; ++k) {
    if (!budget.TryConsume()) {
      return absl::ResourceExhaustedError(
          "Fourier integral exhausted max_subdivisions");
    }
    const double a = piece_start(k);
    const double b = std::min(a + half_period, truncation);
    FPSKETCH_ASSIGN_OR_RETURN(
        IntegrationResult piece,
        IntegrateAdaptive(integrand, a, b, piece_tol, budget));
    sum += piece.value;
  }
  return sum;
}

absl::Status ValidatePoint(double x) {
  if (!std::isfinite(x)) {
    return absl::InvalidArgumentError(absl::StrCat("x must be finite, got ", x));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status ValidateStabilityIndex(double p) {
  if (!(p > 0.0 && p <= 2.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("stability index p must lie in (0, 2], got ", p));
  }
  return absl::OkStatus();
}

absl::StatusOr<StableParams> StableParams::Create(double p, double zeta) {
  FPSKETCH_RETURN_IF_ERROR(ValidateStabilityIndex(p));
  if (!(zeta > 0.0) || !std::isfinite(zeta)) {
    return absl::InvalidArgumentError(
        absl::StrCat("scale zeta must be positive and finite, got ", zeta));
  }
  return StableParams(p, zeta);
}

StableSampler::StableSampler(double p)
    : p_(p), inv_p_(1.0 / p), tail_exponent_((1.0 - p) / p) {}

absl::StatusOr<StableSampler> StableSampler::Create(double p) {
  FPSKETCH_RETURN_IF_ERROR(ValidateStabilityIndex(p));
  return StableSampler(p);
}

double StableSampler::FromUniforms(double u_angle, double u_exponential) const {
  const double theta = kPi * (u_angle - 0.5);
  const double w = -std::log(u_exponential);
  if (p_ == 1.0) return std::tan(theta);
  if (p_ == 2.0) return 2.0 * std::sin(theta) * std::sqrt(w);
  const double s = std::sin(p_ * theta);
  if (s == 0.0) return 0.0;
  // Log space keeps cos(theta)^(1/p) from underflowing at small p.
  const double log_magnitude =
      std::log(std::abs(s)) - inv_p_ * std::log(std::cos(theta)) +
      tail_exponent_ * (std::log(std::cos((1.0 - p_) * theta)) - std::log(w));
  return std::copysign(std::exp(log_magnitude), s);
}

double DensityAtZero(double p, double zeta) {
  return std::exp(std::lgamma(1.0 + 1.0 / p) - std::log(zeta) / p) / kPi;
}

absl::StatusOr<double> DensityByQuadrature(const StableParams& params,
                                           double x,
                                           const QuadratureSettings& settings) {
  FPSKETCH_RETURN_IF_ERROR(ValidateQuadratureSettings(settings));
  FPSKETCH_RETURN_IF_ERROR(ValidatePoint(x));
  x = std::abs(x);
  // No oscillation at the origin: the integral is a Gamma function.
  if (x == 0.0) return DensityAtZero(params.p(), params.zeta());
  FPSKETCH_ASSIGN_OR_RETURN(
      double integral, FourierIntegral(params.p(), params.zeta(), x,
                                       Kernel::kCosine, settings));
  return integral / kPi;
}

absl::StatusOr<double> Density(const StableParams& params, double x,
                               const QuadratureSettings& settings) {
  FPSKETCH_RETURN_IF_ERROR(ValidateQuadratureSettings(settings));
  FPSKETCH_RETURN_IF_ERROR(ValidatePoint(x));
  const double zeta = params.zeta();
  if (params.p() == 1.0) return zeta / (kPi * (zeta * zeta + x * x));
  if (params.p() == 2.0) {
    return std::exp(-x * x / (4.0 * zeta)) / (2.0 * std::sqrt(kPi * zeta));
  }
  return DensityByQuadrature(params, x, settings);
}

absl::StatusOr<double> CdfByQuadrature(const StableParams& params, double x,
                                       const QuadratureSettings& settings) {
  FPSKETCH_RETURN_IF_ERROR(ValidateQuadratureSettings(settings));
  FPSKETCH_RETURN_IF_ERROR(ValidatePoint(x));
  if (x == 0.0) return 0.5;
  FPSKETCH_ASSIGN_OR_RETURN(
      double integral, FourierIntegral(params.p(), params.zeta(), std::abs(x),
                                       Kernel::kSineOverT, settings));
  const double upper = 0.5 + integral / kPi;
  return x > 0.0 ? upper : 1.0 - upper;
}

absl::StatusOr<double> Cdf(const StableParams& params, double x,
                           const QuadratureSettings& settings) {
  FPSKETCH_RETURN_IF_ERROR(ValidateQuadratureSettings(settings));
  FPSKETCH_RETURN_IF_ERROR(ValidatePoint(x));
  const double zeta = params.zeta();
  if (params.p() == 1.0) return 0.5 + std::atan(x / zeta) / kPi;
  if (params.p() == 2.0) return 0.5 * std::erfc(-x / (2.0 * std::sqrt(zeta)));
  return CdfByQuadrature(params, x, settings);
}

absl::StatusOr<std::vector<RatioPoint>> DensityRatioCurve(
    double p, double rho, std::span<const double> xs,
    const QuadratureSettings& settings) {
  if (!(rho >= 1.0) || !std::isfinite(rho)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sensitivity ratio rho must be finite and >= 1, got ", rho));
  }
  FPSKETCH_ASSIGN_OR_RETURN(StableParams unit, StableParams::Create(p, 1.0));
  FPSKETCH_ASSIGN_OR_RETURN(StableParams scaled, StableParams::Create(p, rho));
  std::vector<RatioPoint> curve;
  curve.reserve(xs.size());
  for (double x : xs) {
    FPSKETCH_ASSIGN_OR_RETURN(double numerator, Density(unit, x, settings));
    FPSKETCH_ASSIGN_OR_RETURN(double denominator, Density(scaled, x, settings));
    if (!(denominator > 0.0)) {
      return absl::OutOfRangeError(absl::StrCat(
          "density D_{p,rho}(x) underflows at x = ", x, " (p = ", p, ")"));
    }
    curve.push_back({x, numerator / denominator});
  }
  return curve;
}

std::string FormatRatioCurveCsv(std::span<const RatioPoint> curve) {
  std::string out = "x,ratio\n";
  char line[96];
  for (const RatioPoint& point : curve) {
    std::snprintf(line, sizeof(line), "%.10g,%.15g\n", point.x, point.ratio);
    out += line;
  }
  return out;
}

absl::StatusOr<LaplaceCheck> LaplaceIdentityCheck(
    double a, const QuadratureSettings& settings) {
  FPSKETCH_RETURN_IF_ERROR(ValidateQuadratureSettings(settings));
  if (!(a > 0.0) || !std::isfinite(a)) {
    return absl::InvalidArgumentError(
        absl::StrCat("a must be positive and finite, got ", a));
  }
  // With t = e^s the integrand decays doubly exponentially in both
  // directions; outside [lo, hi] it is below exp(-700).
  auto integrand = [a](double s) {
    const double t = std::exp(s);
    return 0.5 * std::exp(-1.0 / t - a * t + 0.5 * s);
  };
  const double lo = -std::log(700.0);
  const double hi = std::log(700.0 / a) + 1.0;
  SubdivisionBudget budget(settings.max_subdivisions);
  FPSKETCH_ASSIGN_OR_RETURN(
      IntegrationResult numeric,
      IntegrateAdaptive(integrand, lo, hi, 0.1 * settings.tolerance, budget));
  const double root = std::sqrt(a);
  const double closed_form =
      0.5 * std::sqrt(kPi) * std::exp(-2.0 * root) / root;
  return LaplaceCheck{numeric.value, closed_form};
}

}  // namespace fpsketch
