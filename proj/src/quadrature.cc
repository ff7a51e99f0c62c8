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

#include "fpsketch/quadrature.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace fpsketch {

absl::Status ValidateQuadratureSettings(const QuadratureSettings& settings) {
  if (!(settings.tolerance > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("tolerance must be positive, got ", settings.tolerance));
  }
  if (!(settings.max_frequency > 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "max_frequency must be positive, got ", settings.max_frequency));
  }
  if (settings.max_subdivisions < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "max_subdivisions must be at least 1, got ", settings.max_subdivisions));
  }
  return absl::OkStatus();
}

int AlternatingTermsFor(double first_term, double abs_tol) {
  constexpr int kMinTerms = 8;
  constexpr int kMaxTerms = 64;
  if (!(first_term > 0.0)) return kMinTerms;
  const double ratio = 2.0 * first_term / abs_tol;
  if (ratio <= 1.0) return kMinTerms;
  const int n = static_cast<int>(
      std::ceil(std::log(ratio) / std::log(3.0 + std::sqrt(8.0)))) + 2;
  return std::clamp(n, kMinTerms, kMaxTerms);
}

}  // namespace fpsketch
