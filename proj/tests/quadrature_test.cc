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
#include <numbers>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "gtest/gtest.h"

namespace fpsketch {
namespace {

TEST(IntegrateAdaptiveTest, Polynomial) {
  SubdivisionBudget budget(100);
  auto result = IntegrateAdaptive([](double x) { return x * x * x; }, 0.0, 2.0,
                                  1e-12, budget);
  ASSERT_TRUE(result.ok());
  EXPECT_NEAR(result->value, 4.0, 1e-13);
}

TEST(IntegrateAdaptiveTest, EndpointSingularity) {
  SubdivisionBudget budget(10'000);
  auto result = IntegrateAdaptive([](double x) { return 1.0 / std::sqrt(x); },
                                  0.0, 1.0, 1e-10, budget);
  ASSERT_TRUE(result.ok()) << result.status();
  EXPECT_NEAR(result->value, 2.0, 1e-9);
}

TEST(IntegrateAdaptiveTest, Oscillatory) {
  SubdivisionBudget budget(10'000);
  auto result = IntegrateAdaptive([](double x) { return std::cos(50.0 * x); },
                                  0.0, 3.0, 1e-12, budget);
  ASSERT_TRUE(result.ok());
  EXPECT_NEAR(result->value, std::sin(150.0) / 50.0, 1e-12);
}

TEST(IntegrateAdaptiveTest, EmptyInterval) {
  SubdivisionBudget budget(1);
  auto result = IntegrateAdaptive([](double) { return 1.0; }, 1.0, 1.0, 1e-8,
                                  budget);
  ASSERT_TRUE(result.ok());
  EXPECT_EQ(result->value, 0.0);
}

TEST(IntegrateAdaptiveTest, BudgetExhaustion) {
  SubdivisionBudget budget(2);
  auto result = IntegrateAdaptive([](double x) { return std::sin(1.0 / x); },
                                  1e-6, 1.0, 1e-14, budget);
  EXPECT_EQ(result.status().code(), absl::StatusCode::kResourceExhausted);
}

TEST(IntegrateAdaptiveTest, NonFiniteIntegrand) {
  SubdivisionBudget budget(100);
  auto result = IntegrateAdaptive([](double) { return HUGE_VAL; }, 0.0, 1.0,
                                  1e-8, budget);
  EXPECT_FALSE(result.ok());
}

TEST(SumAlternatingMomentsTest, Log2) {
  auto sum = SumAlternatingMoments(
      [](int k) -> absl::StatusOr<double> { return 1.0 / (k + 1); }, 30);
  ASSERT_TRUE(sum.ok());
  EXPECT_NEAR(*sum, std::numbers::ln2, 1e-15);
}

TEST(SumAlternatingMomentsTest, Leibniz) {
  auto sum = SumAlternatingMoments(
      [](int k) -> absl::StatusOr<double> { return 1.0 / (2 * k + 1); }, 30);
  ASSERT_TRUE(sum.ok());
  EXPECT_NEAR(*sum, std::numbers::pi / 4, 1e-15);
}

TEST(SumAlternatingMomentsTest, PropagatesErrors) {
  auto sum = SumAlternatingMoments(
      [](int k) -> absl::StatusOr<double> {
        if (k == 3) return absl::InternalError("boom");
        return 1.0;
      },
      10);
  EXPECT_EQ(sum.status().code(), absl::StatusCode::kInternal);
}

TEST(AlternatingTermsForTest, Clamped) {
  EXPECT_EQ(AlternatingTermsFor(1e-30, 1.0), 8);
  EXPECT_EQ(AlternatingTermsFor(1e30, 1e-30), 64);
  const int n = AlternatingTermsFor(1.0, 1e-12);
  EXPECT_LT(2.0 / std::pow(3.0 + std::sqrt(8.0), n), 1e-12);
}

}  // namespace
}  // namespace fpsketch
