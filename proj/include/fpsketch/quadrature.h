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

// Numerical integration used by the stable-density code: a globally adaptive
// 7/15-point Gauss-Kronrod rule and the Cohen-Rodriguez Villegas-Zagier
// accelerator for alternating series whose magnitudes form a completely
// monotone sequence.

#ifndef FPSKETCH_QUADRATURE_H_
#define FPSKETCH_QUADRATURE_H_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"

namespace fpsketch {

struct QuadratureSettings {
  // Upper cap on the truncation point of a Fourier integral. Infinity lets the
  // integrator pick the point from the integrand's envelope.
  double max_frequency = std::numeric_limits<double>::infinity();
  // Target absolute error of the returned value.
  double tolerance = 1e-8;
  // Cap on interval bisections (and directly summed half-periods) per call.
  int64_t max_subdivisions = 1'000'000;
};

absl::Status ValidateQuadratureSettings(const QuadratureSettings& settings);

struct IntegrationResult {
  double value = 0.0;
  double error = 0.0;
};

// Counts bisections across several integrations that together make up one
// logical evaluation.
class SubdivisionBudget {
 public:
  explicit SubdivisionBudget(int64_t limit) : remaining_(limit) {}

  bool TryConsume() {
    if (remaining_ <= 0) return false;
    --remaining_;
    return true;
  }
  int64_t remaining() const { return remaining_; }

 private:
  int64_t remaining_;
};

namespace internal {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for kKronrodNodes[1], [3], [5] and the centre.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  double magnitude;  // integral of |f|
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment GaussKronrod15(F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f_centre = f(centre);
  double kronrod = f_centre * kKronrodWeights[7];
  double gauss = f_centre * kGaussWeights[3];
  double abs_sum = std::abs(kronrod);
  std::array<double, 7> f_left{};
  std::array<double, 7> f_right{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    f_left[j] = f(centre - dx);
    f_right[j] = f(centre + dx);
    const double pair = f_left[j] + f_right[j];
    kronrod += kKronrodWeights[j] * pair;
    abs_sum += kKronrodWeights[j] * (std::abs(f_left[j]) + std::abs(f_right[j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double spread = kKronrodWeights[7] * std::abs(f_centre - mean);
  for (int j = 0; j < 7; ++j) {
    spread += kKronrodWeights[j] *
              (std::abs(f_left[j] - mean) + std::abs(f_right[j] - mean));
  }
  const double result = kronrod * half;
  abs_sum *= std::abs(half);
  spread *= std::abs(half);
  double error = std::abs((kronrod - gauss) * half);
  if (spread != 0.0 && error != 0.0) {
    error = spread * std::min(1.0, std::pow(200.0 * error / spread, 1.5));
  }
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    error = std::max(50.0 * kEps * abs_sum, error);
  }
  return Segment{a, b, result, error, abs_sum};
}

}  // namespace internal

// Integrates f over the finite interval [a, b] until the estimated absolute
// error is at most abs_tol. Fails with kResourceExhausted when the budget
// runs out first, and with kInvalidArgument when f produces a non-finite
// value.
template <class F>
absl::StatusOr<IntegrationResult> IntegrateAdaptive(F&& f, double a, double b,
                                                    double abs_tol,
                                                    SubdivisionBudget& budget) {
  if (a == b) return IntegrationResult{};
  std::priority_queue<internal::Segment> heap;
  heap.push(internal::GaussKronrod15(f, a, b));
  double total_error = heap.top().error;
  double total_magnitude = heap.top().magnitude;
  // Segments too narrow to bisect keep their error estimate here.
  double frozen_value = 0.0;
  double frozen_error = 0.0;
  // Below this floor the error estimate is dominated by rounding.
  constexpr double kRoundoff = 100.0 * std::numeric_limits<double>::epsilon();
  while (total_error > std::max(abs_tol, kRoundoff * total_magnitude) &&
         !heap.empty()) {
    internal::Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      frozen_value += worst.value;
      frozen_error += worst.error;
      continue;
    }
    if (!budget.TryConsume()) {
      return absl::ResourceExhaustedError(absl::StrCat(
          "adaptive quadrature did not converge: error estimate ", total_error,
          " exceeds tolerance ", abs_tol, " after exhausting max_subdivisions"));
    }
    internal::Segment left = internal::GaussKronrod15(f, worst.a, mid);
    internal::Segment right = internal::GaussKronrod15(f, mid, worst.b);
    total_error += left.error + right.error - worst.error;
    total_magnitude += left.magnitude + right.magnitude - worst.magnitude;
    heap.push(left);
    heap.push(right);
    const size_t size = heap.size();
    if (size >= 64 && (size & (size - 1)) == 0) {
      // Re-sum to shed drift accumulated in the running totals.
      double e = frozen_error;
      double m = 0.0;
      auto copy = heap;
      while (!copy.empty()) {
        e += copy.top().error;
        m += copy.top().magnitude;
        copy.pop();
      }
      total_error = e;
      total_magnitude = m;
    }
  }
  double value = frozen_value;
  double error = frozen_error;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  if (!std::isfinite(value)) {
    return absl::InvalidArgumentError("integrand produced a non-finite value");
  }
  return IntegrationResult{value, error};
}

// Number of accelerator terms needed so that the acceleration error bound
// 2 * first_term / (3 + sqrt 8)^n falls below abs_tol.
int AlternatingTermsFor(double first_term, double abs_tol);

// Returns sum_{k>=0} (-1)^k a_k using the first n terms, for a sequence a_k
// that is completely monotone (a Hausdorff moment sequence). The error is at
// most 2 a_0 / (3 + sqrt 8)^n plus the error in the supplied terms. `term`
// maps k to absl::StatusOr<double>.
template <class Term>
absl::StatusOr<double> SumAlternatingMoments(Term&& term, int n) {
  double d = std::pow(3.0 + std::sqrt(8.0), n);
  d = 0.5 * (d + 1.0 / d);
  double b = -1.0;
  double c = -d;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    c = b - c;
    absl::StatusOr<double> a_k = term(k);
    if (!a_k.ok()) return a_k.status();
    sum += c * *a_k;
    b = static_cast<double>(k + n) * static_cast<double>(k - n) * b /
        ((k + 0.5) * (k + 1.0));
  }
  return sum / d;
}

}  // namespace fpsketch

#endif  // FPSKETCH_QUADRATURE_H_
