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

#include "fpsketch/figures.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_split.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace fpsketch {
namespace {

using ::testing::HasSubstr;
using ::testing::StartsWith;

std::vector<std::vector<std::string>> Rows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  for (absl::string_view line : absl::StrSplit(csv, '\n', absl::SkipEmpty())) {
    if (line.front() == '#') continue;
    rows.push_back(absl::StrSplit(line, ','));
  }
  return rows;
}

double Number(const std::string& text) {
  double value = 0.0;
  EXPECT_TRUE(absl::SimpleAtod(text, &value)) << text;
  return value;
}

TEST(FigureIdTest, RoundTrip) {
  for (const char* name : {"sensitivity_fig1", "ratio_fig2", "eps_fig3",
                           "ratio_fig4", "synthetic_fig5", "real_fig6"}) {
    EXPECT_EQ(FigureIdName(*ParseFigureId(name)), name);
  }
  EXPECT_FALSE(ParseFigureId("fig7").ok());
}

TEST(FiguresTest, SensitivityCurves) {
  const std::string csv = *EmitFigureData(FigureId::kSensitivity);
  EXPECT_THAT(csv, StartsWith("# figure=sensitivity_fig1 n=32768 m=1048576"));
  const auto rows = Rows(csv);
  ASSERT_EQ(rows.size(), 401u);
  EXPECT_THAT(rows[0], ::testing::ElementsAre("M", "p", "rho"));
  bool saw_anchor = false;
  for (size_t i = 1; i < rows.size(); ++i) {
    const double rho = Number(rows[i][2]);
    EXPECT_GE(rho, 1.0);
    EXPECT_LE(rho, 5.0);
    if (rows[i][0] == "1" && rows[i][1] == "1.00") {
      EXPECT_EQ(rho, 1.0);
      saw_anchor = true;
    }
  }
  EXPECT_TRUE(saw_anchor);
}

TEST(FiguresTest, EpsilonCurve) {
  const auto rows = Rows(*EmitFigureData(FigureId::kEpsilon));
  ASSERT_EQ(rows.size(), 97u);
  EXPECT_EQ(rows[1][0], "0.05");
  EXPECT_NEAR(Number(rows.back()[1]), std::log(32783.0 / 32768.0), 1e-15);
  for (size_t i = 2; i < rows.size(); ++i) {
    EXPECT_LT(Number(rows[i][1]), Number(rows[i - 1][1]));
  }
}

TEST(FiguresTest, RatioCurvesStartAtTwo) {
  const auto rows = Rows(*EmitFigureData(FigureId::kRatio));
  ASSERT_EQ(rows.size(), 1u + 10 * 201);
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][1] == "0") EXPECT_NEAR(Number(rows[i][2]), 2.0, 1e-12);
  }
}

TEST(FiguresTest, ExploratoryRatioCurves) {
  const std::string csv = *EmitFigureData(FigureId::kRatioExploratory);
  EXPECT_THAT(csv, HasSubstr("non-private"));
  const auto rows = Rows(csv);
  ASSERT_EQ(rows.size(), 1u + 4 * 61);
  for (size_t i = 1; i < rows.size(); ++i) {
    EXPECT_TRUE(std::isfinite(Number(rows[i][2])));
  }
}

TEST(FiguresTest, DeterministicOutput) {
  EXPECT_EQ(*EmitFigureData(FigureId::kEpsilon), *EmitFigureData(FigureId::kEpsilon));
  FigureOptions options;
  options.max_n = 10'000;
  options.repetitions = 3;
  options.seed = 5;
  const std::string a = *EmitFigureData(FigureId::kSynthetic, options);
  EXPECT_EQ(a, *EmitFigureData(FigureId::kSynthetic, options));
  EXPECT_EQ(Rows(a).size(), 1u + 2 * 4);
}

TEST(FiguresTest, RealDataNeedsSource) {
  EXPECT_EQ(EmitFigureData(FigureId::kRealData).status().code(),
            absl::StatusCode::kInvalidArgument);
  FigureOptions options;
  options.dataset_path = "/nonexistent.csv";
  EXPECT_EQ(EmitFigureData(FigureId::kRealData, options).status().code(),
            absl::StatusCode::kNotFound);
}

TEST(FiguresTest, SurrogateRealData) {
  FigureOptions options;
  options.use_surrogate = true;
  options.surrogate_n = 20'000;
  options.repetitions = 2;
  const auto rows = Rows(*EmitFigureData(FigureId::kRealData, options));
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[1][0], "surrogate");
}

}  // namespace
}  // namespace fpsketch
