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

// Symmetric p-stable distributions with characteristic function
// exp(-zeta |t|^p), 0 < p <= 2: sampling, density, CDF and density-ratio
// curves.
//
// Densities come from the cosine transform
//
//   D(x) = (1/pi) * integral_0^inf cos(x t) exp(-zeta t^p) dt.
//
// The integral is split at the sign changes of cos(x t). For p <= 1 the
// envelope exp(-zeta t^p) is completely monotone, so the magnitudes of the
// half-period integrals form a completely monotone sequence and the
// alternating tail is summed with the Cohen-Rodriguez Villegas-Zagier
// accelerator. For p > 1 (or when a finite max_frequency is requested) the
// half-periods are summed directly up to the truncation point T, chosen so
// that exp(-zeta T^p) < tolerance / 10.

#ifndef FPSKETCH_STABLE_H_
#define FPSKETCH_STABLE_H_

#include <concepts>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fpsketch/quadrature.h"
#include "fpsketch/random.h"

namespace fpsketch {

// Checks 0 < p <= 2.
absl::Status ValidateStabilityIndex(double p);

class StableParams {
 public:
  static absl::StatusOr<StableParams> Create(double p, double zeta);

  double p() const { return p_; }
  double zeta() const { return zeta_; }

 private:
  StableParams(double p, double zeta) : p_(p), zeta_(zeta) {}

  double p_;
  double zeta_;
};

// Chambers-Mallows-Stuck sampler for the standard (zeta = 1) symmetric
// p-stable law: theta ~ U(-pi/2, pi/2), W ~ Exp(1),
//
//   X = sin(p theta) / cos(theta)^(1/p) * (cos((1-p) theta) / W)^((1-p)/p).
class StableSampler {
 public:
  static absl::StatusOr<StableSampler> Create(double p);

  double p() const { return p_; }

  // Transforms two uniforms in (0, 1) into one draw. The first picks the
  // angle, the second the exponential variate.
  double FromUniforms(double u_angle, double u_exponential) const;

  template <std::uniform_random_bit_generator Gen>
  double operator()(Gen& gen) const {
    const double u_angle = UniformOpen(gen());
    const double u_exponential = UniformOpen(gen());
    return FromUniforms(u_angle, u_exponential);
  }

 private:
  explicit StableSampler(double p);

  double p_;
  double inv_p_;
  double tail_exponent_;  // (1 - p) / p
};

// One draw from the standard symmetric p-stable law. Rejects p outside
// (0, 2]. Deterministic for a deterministic generator.
template <std::uniform_random_bit_generator Gen>
absl::StatusOr<double> SampleStandard(double p, Gen& gen) {
  absl::StatusOr<StableSampler> sampler = StableSampler::Create(p);
  if (!sampler.ok()) return sampler.status();
  return (*sampler)(gen);
}

// Density at x. Uses the Cauchy (p = 1) and Gaussian (p = 2) closed forms
// and the exact value at x = 0; otherwise the Fourier quadrature above.
// Fails with kResourceExhausted when quadrature does not converge within
// settings.max_subdivisions.
absl::StatusOr<double> Density(const StableParams& params, double x,
                               const QuadratureSettings& settings = {});

// Same integral as Density() but never takes the p = 1 / p = 2 closed forms.
// Exists to cross-validate the quadrature against them.
absl::StatusOr<double> DensityByQuadrature(
    const StableParams& params, double x,
    const QuadratureSettings& settings = {});

// P(X <= x), from the sine transform
// 1/2 + (1/pi) integral_0^inf sin(x t) exp(-zeta t^p) / t dt.
absl::StatusOr<double> Cdf(const StableParams& params, double x,
                           const QuadratureSettings& settings = {});

absl::StatusOr<double> CdfByQuadrature(const StableParams& params, double x,
                                       const QuadratureSettings& settings = {});

struct RatioPoint {
  double x;
  double ratio;
};

// Evaluates D_{p,1}(x) / D_{p,rho}(x) at every x. For p in (0, 1] these
// ratios lie in [1/rho, rho^(1/p)]; for p in (1, 2] no bound holds and the
// curve is purely exploratory.
absl::StatusOr<std::vector<RatioPoint>> DensityRatioCurve(
    double p, double rho, std::span<const double> xs,
    const QuadratureSettings& settings = {});

// CSV text with header "x,ratio" and one row per point.
std::string FormatRatioCurveCsv(std::span<const RatioPoint> curve);

struct LaplaceCheck {
  double numeric;
  double closed_form;
};

// Evaluates integral_0^inf exp(-1/t - a t) / (2 sqrt t) dt by quadrature next
// to its closed form (sqrt(pi)/2) exp(-2 sqrt a) / sqrt a. Serves as a
// self-test of the quadrature engine.
absl::StatusOr<LaplaceCheck> LaplaceIdentityCheck(
    double a, const QuadratureSettings& settings = {});

// Exact density at 0: Gamma(1 + 1/p) / (pi zeta^(1/p)).
double DensityAtZero(double p, double zeta);

}  // namespace fpsketch

#endif  // FPSKETCH_STABLE_H_
