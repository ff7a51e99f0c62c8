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

// Acceptance suite: one PASS/FAIL line per criterion, each with its measured
// values and wall time. Exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "fpsketch/bench.h"
#include "fpsketch/estimators.h"
#include "fpsketch/figures.h"
#include "fpsketch/privacy.h"
#include "fpsketch/random.h"
#include "fpsketch/sketch.h"
#include "fpsketch/stable.h"
#include "test_util.h"

namespace fpsketch {
namespace {

struct Verdict {
  bool passed = false;
  std::string detail;
};

int failures = 0;

void Criterion(const std::string& name, double time_limit_seconds,
               const std::function<absl::StatusOr<Verdict>()>& body) {
  const auto start = std::chrono::steady_clock::now();
  absl::StatusOr<Verdict> verdict = body();
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!verdict.ok()) verdict = Verdict{false, verdict.status().ToString()};
  const bool in_time = seconds < time_limit_seconds;
  const bool passed = verdict->passed && in_time;
  failures += !passed;
  std::printf("%s %s: %s (%.2f s, limit %g s%s)\n", passed ? "PASS" : "FAIL",
              name.c_str(), verdict->detail.c_str(), seconds, time_limit_seconds,
              in_time ? "" : ", too slow");
  std::fflush(stdout);
}

// Parses "a,b,c" data rows of a figure CSV, skipping comments and header.
std::vector<std::vector<double>> NumericRows(const std::string& csv) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(std::stod(field));
    rows.push_back(row);
  }
  return rows;
}

absl::StatusOr<Verdict> SensitivityCurves() {
  absl::StatusOr<std::string> csv = EmitFigureData(FigureId::kSensitivity);
  if (!csv.ok()) return csv.status();
  const std::vector<std::vector<double>> rows = NumericRows(*csv);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& row : rows) {
    lo = std::min(lo, row[2]);
    hi = std::max(hi, row[2]);
  }
  absl::StatusOr<double> at_one = MultiplicativeSensitivity(
      {kCurveStreamLength, kCurveKeyDomain, 1, 1.0});
  absl::StatusOr<double> at_half = MultiplicativeSensitivity(
      {kCurveStreamLength, kCurveKeyDomain, 16, 0.5});
  if (!at_one.ok()) return at_one.status();
  if (!at_half.ok()) return at_half.status();
  const bool passed = rows.size() == 400 && *at_one == 1.0 &&
                      std::abs(*at_half - 2.000488) <= 1e-5 && lo >= 1.0 && hi <= 5.0;
  return Verdict{passed, absl::StrFormat("rows=%d rho(p=1,M=1)=%.17g "
                                         "rho(p=0.5,M=16)=%.9f grid range=[%.6f, %.6f]",
                                         rows.size(), *at_one, *at_half, lo, hi)};
}

absl::StatusOr<Verdict> BudgetCurve() {
  absl::StatusOr<std::string> csv = EmitFigureData(FigureId::kEpsilon);
  if (!csv.ok()) return csv.status();
  const std::vector<std::vector<double>> rows = NumericRows(*csv);
  bool decreasing = true;
  for (size_t i = 1; i < rows.size(); ++i) {
    decreasing = decreasing && rows[i][1] < rows[i - 1][1];
  }
  const double first = rows.front()[1];
  const double last = rows.back()[1];
  const bool passed = decreasing && rows.front()[0] == 0.05 && rows.back()[0] == 1.0 &&
                      last < 1e-3 && first >= 20.0 && first <= 30.0;
  return Verdict{passed, absl::StrFormat("points=%d strictly decreasing=%s "
                                         "eps(0.05)=%.6f eps(1)=%.6g",
                                         rows.size(), decreasing ? "yes" : "no",
                                         first, last)};
}

absl::StatusOr<Verdict> RatioSandwich() {
  std::vector<double> xs(200);
  for (int i = 0; i < 200; ++i) xs[i] = 20.0 * i / 199.0;
  QuadratureSettings settings;
  settings.tolerance = 1e-11;
  double worst_lower = std::numeric_limits<double>::infinity();
  double worst_upper = std::numeric_limits<double>::infinity();
  bool passed = true;
  for (double p : {0.25, 0.5, 0.75, 1.0}) {
    for (double rho : {1.5, 2.0, 4.0}) {
      absl::StatusOr<std::vector<RatioPoint>> curve =
          DensityRatioCurve(p, rho, xs, settings);
      if (!curve.ok()) return curve.status();
      for (const RatioPoint& point : *curve) {
        const double lower_gap = point.ratio - (1.0 / rho - 1e-6);
        const double upper_gap = std::pow(rho, 1.0 / p) + 1e-6 - point.ratio;
        worst_lower = std::min(worst_lower, lower_gap);
        worst_upper = std::min(worst_upper, upper_gap);
        passed = passed && lower_gap >= 0.0 && upper_gap >= 0.0;
      }
    }
  }
  double worst_anchor = 0.0;
  for (double p : {0.25, 0.5, 0.75, 1.0}) {
    const double zero[] = {0.0};
    absl::StatusOr<std::vector<RatioPoint>> anchor =
        DensityRatioCurve(p, std::exp2(p), zero, settings);
    if (!anchor.ok()) return anchor.status();
    worst_anchor = std::max(worst_anchor, std::abs(anchor->front().ratio - 2.0));
  }
  passed = passed && worst_anchor <= 1e-6;
  return Verdict{passed, absl::StrFormat("12 curves x 200 points; smallest margin "
                                         "to lower bound %.3g, to upper bound %.3g; "
                                         "max |ratio(0) - 2| = %.3g",
                                         worst_lower, worst_upper, worst_anchor)};
}

absl::StatusOr<Verdict> LaplaceOracle() {
  double worst = 0.0;
  for (double a : {0.25, 1.0, 4.0}) {
    QuadratureSettings settings;
    settings.tolerance = 1e-10;
    absl::StatusOr<LaplaceCheck> check = LaplaceIdentityCheck(a, settings);
    if (!check.ok()) return check.status();
    worst = std::max(worst, std::abs(check->numeric - check->closed_form));
  }
  return Verdict{worst < 1e-8,
                 absl::StrFormat("max |numeric - closed form| = %.3g over a in "
                                 "{0.25, 1, 4}",
                                 worst)};
}

absl::StatusOr<Verdict> SamplerCorrectness() {
  constexpr int kDraws = 1'000'000;
  double worst_z = 0.0;
  for (double p : {0.5, 1.0, 2.0}) {
    absl::StatusOr<StableSampler> sampler = StableSampler::Create(p);
    if (!sampler.ok()) return sampler.status();
    SplitMix64 gen(HashCombine(2024, static_cast<uint64_t>(p * 100)));
    std::vector<double> draws(kDraws);
    for (double& x : draws) x = (*sampler)(gen);
    for (double t : {0.5, 1.0, 2.0}) {
      double sum = 0.0;
      for (double x : draws) sum += std::cos(t * x);
      const double expected = std::exp(-std::pow(t, p));
      const double variance =
          0.5 * (1.0 + std::exp(-std::pow(2.0 * t, p))) - expected * expected;
      const double z = std::abs(sum / kDraws - expected) / std::sqrt(variance / kDraws);
      worst_z = std::max(worst_z, z);
    }
  }
  double smallest_p_value = 1.0;
  for (double p : {0.5, 1.0, 2.0}) {
    StableSampler sampler = *StableSampler::Create(p);
    SplitMix64 gen(HashCombine(77, static_cast<uint64_t>(p * 100)));
    constexpr double kC1 = 0.7;
    constexpr double kC2 = 2.3;
    const double scale = std::pow(std::pow(kC1, p) + std::pow(kC2, p), 1.0 / p);
    std::vector<double> combined;
    std::vector<double> direct;
    for (int i = 0; i < 20'000; ++i) {
      combined.push_back(kC1 * sampler(gen) + kC2 * sampler(gen));
      direct.push_back(scale * sampler(gen));
    }
    smallest_p_value =
        std::min(smallest_p_value, testing::KsTwoSample(combined, direct).p_value);
  }
  return Verdict{worst_z <= 4.0 && smallest_p_value > 0.01,
                 absl::StrFormat("worst characteristic-function deviation %.2f "
                                 "standard errors; smallest closure KS p-value %.3f",
                                 worst_z, smallest_p_value)};
}

absl::StatusOr<Verdict> SketchFidelity() {
  SyntheticSpec spec;
  spec.n = 100'000;
  spec.key_domain = 1000;
  EstimatorConstantsCache cache;
  std::string detail;
  bool passed = true;
  for (double p : {0.75, 1.0}) {
    SketchConfig config;
    config.p = p;
    config.r = 50;
    config.q = 1.0;
    config.m = 1000;
    config.max_value = 1;
    absl::StatusOr<TrialStats> stats = RunSyntheticExperiment(
        spec, config, {EstimatorVariant::kGeometricMean, std::nullopt}, {100, 1},
        cache);
    if (!stats.ok()) return stats.status();
    passed = passed && stats->median_error <= 0.2;
    absl::StrAppendFormat(&detail, "%sp=%.2f median error %.4f (IQR %.4f-%.4f)",
                          detail.empty() ? "" : "; ", p, stats->median_error,
                          stats->q25, stats->q75);
  }
  return Verdict{passed, detail};
}

absl::StatusOr<Verdict> SubsampledPipeline() {
  EstimatorConstantsCache cache;
  auto run = [&](KeyDistribution distribution, double p,
                 uint64_t n) -> absl::StatusOr<TrialStats> {
    SyntheticSpec spec;
    spec.distribution = distribution;
    spec.n = n;
    SketchConfig config;
    config.p = p;
    config.r = 50;
    config.q = 0.02;
    config.m = spec.key_domain;
    config.max_value = 1;
    return RunSyntheticExperiment(spec, config,
                                  {EstimatorVariant::kGeometricMean, std::nullopt},
                                  {20, 5}, cache);
  };
  absl::StatusOr<TrialStats> short_uniform = run(KeyDistribution::kUniform, 0.25, 10'000);
  if (!short_uniform.ok()) return short_uniform.status();
  absl::StatusOr<TrialStats> long_uniform =
      run(KeyDistribution::kUniform, 0.25, 10'000'000);
  if (!long_uniform.ok()) return long_uniform.status();
  bool passed = long_uniform->median_error < short_uniform->median_error;
  double worst_binomial = 0.0;
  std::string binomial;
  for (double p : {0.25, 0.5, 0.75, 1.0}) {
    for (uint64_t n = 10'000; n <= 10'000'000; n *= 10) {
      absl::StatusOr<TrialStats> stats = run(KeyDistribution::kBinomial, p, n);
      if (!stats.ok()) return stats.status();
      worst_binomial = std::max(worst_binomial, stats->median_error);
      absl::StrAppendFormat(&binomial, "%s%.3f", binomial.empty() ? "" : " ",
                            stats->median_error);
    }
  }
  passed = passed && worst_binomial < 0.4;
  return Verdict{passed,
                 absl::StrFormat("uniform p=0.25 median error n=1e4 %.4f -> n=1e7 "
                                 "%.4f; binomial medians (p major, n minor) [%s], "
                                 "max %.4f",
                                 short_uniform->median_error,
                                 long_uniform->median_error, binomial,
                                 worst_binomial)};
}

absl::StatusOr<Verdict> BruteForceDominance() {
  double worst = -std::numeric_limits<double>::infinity();
  int tuples = 0;
  for (uint64_t n = 1; n <= 5; ++n) {
    for (uint64_t m = 2; m <= 3; ++m) {
      for (uint64_t max_value = 1; max_value <= 3; ++max_value) {
        for (int k = 1; k <= 10; ++k) {
          const double p = k / 10.0;
          absl::StatusOr<double> exact = BruteForceSensitivity(n, m, max_value, p);
          if (!exact.ok()) return exact.status();
          absl::StatusOr<double> formula =
              MultiplicativeSensitivity({n, m, max_value, p});
          if (!formula.ok()) return formula.status();
          worst = std::max(worst, *exact - *formula);
          ++tuples;
        }
      }
    }
  }
  return Verdict{worst <= 1e-9,
                 absl::StrFormat("%d tuples (n<=5, 2<=m<=3, M<=3, p=0.1..1); "
                                 "max(exact - formula) = %.3g",
                                 tuples, worst)};
}

absl::StatusOr<Verdict> MergeAndSerialization() {
  SyntheticSpec spec;
  spec.n = 20'000;
  spec.key_domain = 5000;
  spec.value = 3;
  absl::StatusOr<std::vector<StreamItem>> stream = GenerateSyntheticStream(spec, 9);
  if (!stream.ok()) return stream.status();
  double worst = 0.0;
  bool bitwise = true;
  for (double q : {1.0, 0.3}) {
    for (SubsampleMode mode : {SubsampleMode::kPerRow, SubsampleMode::kPerItem}) {
      SketchConfig config;
      config.p = 0.5;
      config.r = 50;
      config.q = q;
      config.seed = 4;
      config.m = spec.key_domain;
      config.max_value = spec.value;
      config.subsample_mode = mode;
      absl::StatusOr<FpSketch> whole = FpSketch::Create(config);
      if (!whole.ok()) return whole.status();
      if (absl::Status s = whole->Update(*stream); !s.ok()) return s;
      for (size_t split : {size_t{1}, size_t{7'777}, size_t{19'999}}) {
        const std::span<const StreamItem> items(*stream);
        absl::StatusOr<FpSketch> left = FpSketch::Create(config);
        absl::StatusOr<FpSketch> right = FpSketch::Create(config, split);
        if (!left.ok()) return left.status();
        if (!right.ok()) return right.status();
        if (absl::Status s = left->Update(items.first(split)); !s.ok()) return s;
        if (absl::Status s = right->Update(items.subspan(split)); !s.ok()) return s;
        absl::StatusOr<FpSketch> merged = Merge(*left, *right);
        if (!merged.ok()) return merged.status();
        for (size_t j = 0; j < config.r; ++j) {
          const double a = whole->accumulator()[j];
          const double b = merged->accumulator()[j];
          const double relative = a == b ? 0.0 : std::abs(a - b) / std::abs(a);
          worst = std::max(worst, relative);
        }
      }
      const std::string bytes = Serialize(*whole);
      absl::StatusOr<FpSketch> back = Deserialize(bytes);
      if (!back.ok()) return back.status();
      bitwise = bitwise && *back == *whole && Serialize(*back) == bytes;
    }
  }
  return Verdict{worst <= 1e-9 && bitwise,
                 absl::StrFormat("max split-merge relative difference %.3g; "
                                 "serialization round trip bitwise=%s",
                                 worst, bitwise ? "yes" : "no")};
}

absl::StatusOr<Verdict> SurrogateTrend() {
  absl::StatusOr<std::vector<StreamItem>> stream =
      GenerateSyntheticStream(ZipfSurrogateSpec(1'000'000), 11);
  if (!stream.ok()) return stream.status();
  uint64_t max_key = 2;
  uint64_t max_value = 1;
  for (const StreamItem& item : *stream) {
    max_key = std::max(max_key, item.key);
    max_value = std::max(max_value, item.value);
  }
  EstimatorConstantsCache cache;
  double errors[2];
  const double ps[2] = {0.05, 1.0};
  for (int i = 0; i < 2; ++i) {
    SketchConfig config;
    config.p = ps[i];
    config.r = 50;
    config.q = 0.02;
    config.m = max_key;
    config.max_value = max_value;
    absl::StatusOr<TrialStats> stats = RunStreamExperiment(
        *stream, config, {EstimatorVariant::kGeometricMean, std::nullopt}, {5, 3},
        cache);
    if (!stats.ok()) return stats.status();
    errors[i] = stats->median_error;
  }
  return Verdict{errors[0] > errors[1],
                 absl::StrFormat("Zipf(1.1) surrogate, %d keys, n=1e6, 5 runs: "
                                 "median error p=0.05 %.4f vs p=1.0 %.4f",
                                 kSurrogateKeyDomain, errors[0], errors[1])};
}

}  // namespace
}  // namespace fpsketch

int main() {
  using namespace fpsketch;
  Criterion("criterion 1 sensitivity curves", 1, SensitivityCurves);
  Criterion("criterion 2 privacy budget curve", 1, BudgetCurve);
  Criterion("criterion 3 density ratio sandwich", 120, RatioSandwich);
  Criterion("criterion 4 quadrature oracle", 1, LaplaceOracle);
  Criterion("criterion 5 sampler correctness", 60, SamplerCorrectness);
  Criterion("criterion 6 sketch fidelity at q=1", 300, SketchFidelity);
  Criterion("criterion 7 subsampled pipeline trends", 1800, SubsampledPipeline);
  Criterion("criterion 8 brute-force sensitivity dominance", 60, BruteForceDominance);
  Criterion("criterion 9 merge and serialization", 10, MergeAndSerialization);
  Criterion("surrogate real-data trend", 600, SurrogateTrend);
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
