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

#include "fpsketch/bench.h"

#include <cmath>
#include <functional>
#include <vector>

#include "absl/status/status.h"
#include "fpsketch/estimators.h"
#include "fpsketch/privacy.h"
#include "fpsketch/random.h"
#include "gtest/gtest.h"

namespace fpsketch {
namespace {

TEST(ExactFpTest, Examples) {
  const std::vector<StreamItem> stream = {{1, 2}, {1, 3}, {2, 1}};
  EXPECT_NEAR(ExactFp(stream, 0.5), std::sqrt(5.0) + 1.0, 1e-15);
  EXPECT_EQ(ExactFp(stream, 1.0), 6.0);
  EXPECT_EQ(ExactFp({}, 0.5), 0.0);
}

TEST(MultiplicativeErrorTest, SelfIsZero) {
  EXPECT_EQ(MultiplicativeError(3.5, 3.5), 0.0);
  EXPECT_DOUBLE_EQ(MultiplicativeError(1.5, 1.0), 0.5);
  EXPECT_EQ(MultiplicativeError(0.0, 0.0), 0.0);
}

TEST(SummarizeErrorsTest, InterpolatedQuartiles) {
  const TrialStats stats = SummarizeErrors({5.0, 1.0, 4.0, 2.0, 3.0});
  EXPECT_EQ(stats.q25, 2.0);
  EXPECT_EQ(stats.median_error, 3.0);
  EXPECT_EQ(stats.q75, 4.0);
  EXPECT_EQ(stats.runs, 5u);
  const TrialStats even = SummarizeErrors({1.0, 2.0, 3.0, 4.0});
  EXPECT_EQ(even.median_error, 2.5);
  EXPECT_EQ(even.q25, 1.75);
  EXPECT_EQ(even.q75, 3.25);
}

TEST(SummarizeErrorsTest, Ordered) {
  SplitMix64 gen(5);
  std::vector<double> errors;
  for (int i = 0; i < 37; ++i) errors.push_back(UniformOpen(gen()));
  const TrialStats stats = SummarizeErrors(errors);
  EXPECT_LE(stats.q25, stats.median_error);
  EXPECT_LE(stats.median_error, stats.q75);
}

TEST(KeySamplerTest, RangesAndMoments) {
  for (auto distribution : {KeyDistribution::kUniform, KeyDistribution::kBinomial,
                            KeyDistribution::kZipf}) {
    SyntheticSpec spec;
    spec.distribution = distribution;
    KeySampler sampler = *KeySampler::Create(spec);
    SplitMix64 gen(1);
    double sum = 0.0;
    double sum_sq = 0.0;
    constexpr int kDraws = 200'000;
    uint64_t ones = 0;
    for (int i = 0; i < kDraws; ++i) {
      const uint64_t key = sampler(gen);
      ASSERT_GE(key, 1u);
      ASSERT_LE(key, spec.key_domain);
      sum += key;
      sum_sq += static_cast<double>(key) * key;
      ones += key == 1;
    }
    const double mean = sum / kDraws;
    const double sd = std::sqrt(sum_sq / kDraws - mean * mean);
    if (distribution == KeyDistribution::kUniform) {
      EXPECT_NEAR(mean, 500.5, 4 * 288.7 / std::sqrt(kDraws));
    } else if (distribution == KeyDistribution::kBinomial) {
      EXPECT_NEAR(mean, 500.5, 4 * 15.8 / std::sqrt(kDraws));
      EXPECT_NEAR(sd, std::sqrt(999 * 0.25), 0.2);
    } else {
      double harmonic = 0.0;
      for (int k = 1; k <= 1000; ++k) harmonic += std::pow(k, -1.1);
      const double p1 = 1.0 / harmonic;
      EXPECT_NEAR(ones / double{kDraws}, p1,
                  4 * std::sqrt(p1 * (1 - p1) / kDraws));
    }
  }
}

TEST(SyntheticStreamTest, DeterministicPerSeed) {
  SyntheticSpec spec;
  spec.distribution = KeyDistribution::kBinomial;
  spec.n = 1000;
  const std::vector<StreamItem> stream = *GenerateSyntheticStream(spec, 3);
  EXPECT_EQ(stream, *GenerateSyntheticStream(spec, 3));
  EXPECT_NE(stream, *GenerateSyntheticStream(spec, 4));
  for (const StreamItem& item : stream) {
    EXPECT_EQ(item.value, 1u);
  }
}

TEST(SyntheticStreamTest, Validation) {
  SyntheticSpec spec;
  spec.key_domain = 0;
  EXPECT_FALSE(ValidateSyntheticSpec(spec).ok());
  spec = {};
  spec.distribution = KeyDistribution::kBinomial;
  spec.binomial_success = 1.0;
  EXPECT_FALSE(ValidateSyntheticSpec(spec).ok());
  EXPECT_EQ(ZipfSurrogateSpec(10).key_domain, 1'488'095u);
  EXPECT_FALSE(ParseKeyDistribution("poisson").ok());
}

SketchConfig ExperimentConfig(double p, double q) {
  SketchConfig config;
  config.p = p;
  config.r = 50;
  config.q = q;
  config.m = 1000;
  config.max_value = 1;
  return config;
}

TEST(ExperimentTest, ReproducibleAcrossThreadCounts) {
  SyntheticSpec spec;
  spec.n = 2000;
  EstimatorConstantsCache cache;
  const SketchConfig config = ExperimentConfig(0.5, 0.2);
  const TrialStats one =
      *RunSyntheticExperiment(spec, config, {}, {12, 99, 1}, cache);
  const TrialStats many =
      *RunSyntheticExperiment(spec, config, {}, {12, 99, 4}, cache);
  EXPECT_EQ(one.median_error, many.median_error);
  EXPECT_EQ(one.q25, many.q25);
  EXPECT_EQ(one.q75, many.q75);
  EXPECT_EQ(one.runs, 12u);
  const TrialStats other =
      *RunSyntheticExperiment(spec, config, {}, {12, 100, 1}, cache);
  EXPECT_NE(one.median_error, other.median_error);
}

TEST(ExperimentTest, RejectsUncoveredDomain) {
  SyntheticSpec spec;
  spec.key_domain = 5000;
  EstimatorConstantsCache cache;
  EXPECT_FALSE(
      RunSyntheticExperiment(spec, ExperimentConfig(1.0, 1.0), {}, {2}, cache).ok());
}

TEST(ExperimentTest, StreamExperiment) {
  std::vector<StreamItem> stream;
  for (uint64_t k = 1; k <= 500; ++k) stream.push_back({k, 1});
  EstimatorConstantsCache cache;
  const TrialStats stats =
      *RunStreamExperiment(stream, ExperimentConfig(1.0, 1.0), {}, {30, 1}, cache);
  EXPECT_EQ(stats.runs, 30u);
  EXPECT_LT(stats.median_error, 0.25);
  stream.push_back({1001, 1});
  EXPECT_EQ(RunStreamExperiment(stream, ExperimentConfig(1.0, 1.0), {}, {3}, cache)
                .status()
                .code(),
            absl::StatusCode::kOutOfRange);
}

std::vector<double> UniformMediansOverP(uint64_t n) {
  SyntheticSpec spec;
  spec.n = n;
  EstimatorConstantsCache cache;
  std::vector<double> medians;
  for (double p : {0.25, 0.5, 0.75, 1.0}) {
    medians.push_back(
        RunSyntheticExperiment(spec, ExperimentConfig(p, 0.02), {}, {20, 7}, cache)
            ->median_error);
  }
  return medians;
}

TEST(ExperimentTest, SmallStreamErrorFallsWithP) {
  // Short streams leave few kept copies per key, and the q^p correction
  // undershoots more the smaller p is. At most one adjacent pair may be out
  // of order.
  const std::vector<double> medians = UniformMediansOverP(10'000);
  int violations = 0;
  for (size_t i = 1; i < medians.size(); ++i) violations += medians[i] > medians[i - 1];
  EXPECT_LE(violations, 1) << medians[0] << " " << medians[1] << " "
                           << medians[2] << " " << medians[3];
  EXPECT_GT(medians[0], medians[3]);
}

TEST(ExperimentTest, LongStreamErrorIsEstimatorNoise) {
  // At n = 10^6 every key keeps ~20 copies, the correction is nearly exact
  // and the error is the geometric-mean spread, about
  // 0.67 pi sqrt((2 + p^2) / (12 r)) in [0.12, 0.15]: flat in p, no ordering.
  for (double median : UniformMediansOverP(1'000'000)) {
    EXPECT_GT(median, 0.03);
    EXPECT_LT(median, 0.25);
  }
}

// Independent oracle: enumerate ordered streams and every single-position
// replacement directly.
double OrderedBruteForce(int n, int m, int max_value, double p) {
  std::vector<std::pair<int, int>> stream(n);
  const int types = m * max_value;
  double best = 1.0;
  auto fp = [&](const std::vector<std::pair<int, int>>& s) {
    std::vector<double> mass(m, 0.0);
    for (auto [k, v] : s) mass[k] += v;
    double f = 0.0;
    for (double x : mass) f += x > 0 ? std::pow(x, p) : 0.0;
    return f;
  };
  std::function<void(int)> fill = [&](int position) {
    if (position == n) {
      const double base = fp(stream);
      for (int i = 0; i < n; ++i) {
        const auto saved = stream[i];
        for (int t = 0; t < types; ++t) {
          stream[i] = {t / max_value, t % max_value + 1};
          best = std::max(best, fp(stream) / base);
        }
        stream[i] = saved;
      }
      return;
    }
    for (int t = 0; t < types; ++t) {
      stream[position] = {t / max_value, t % max_value + 1};
      fill(position + 1);
    }
  };
  fill(0);
  return best;
}

TEST(BruteForceSensitivityTest, Examples) {
  EXPECT_EQ(*BruteForceSensitivity(2, 2, 1, 1.0), 1.0);
  EXPECT_LE(*BruteForceSensitivity(3, 3, 2, 0.5),
            *MultiplicativeSensitivity({3, 3, 2, 0.5}) + 1e-9);
  EXPECT_LE(*BruteForceSensitivity(4, 2, 3, 0.75),
            *MultiplicativeSensitivity({4, 2, 3, 0.75}) + 1e-9);
}

TEST(BruteForceSensitivityTest, AgreesWithOrderedEnumeration) {
  for (int n = 1; n <= 3; ++n) {
    for (int m = 2; m <= 3; ++m) {
      for (int max_value = 1; max_value <= 2; ++max_value) {
        for (double p : {0.2, 0.6, 1.0}) {
          EXPECT_NEAR(*BruteForceSensitivity(n, m, max_value, p),
                      OrderedBruteForce(n, m, max_value, p), 1e-12);
        }
      }
    }
  }
}

TEST(BruteForceSensitivityTest, FormulaDominatesOnTinyGrid) {
  for (uint64_t n = 1; n <= 6; ++n) {
    for (uint64_t m = 2; m <= 4; ++m) {
      for (uint64_t max_value = 1; max_value <= 3; ++max_value) {
        for (int k = 1; k <= 10; ++k) {
          const double p = k / 10.0;
          EXPECT_LE(*BruteForceSensitivity(n, m, max_value, p),
                    *MultiplicativeSensitivity({n, m, max_value, p}) + 1e-9)
              << n << " " << m << " " << max_value << " " << p;
        }
      }
    }
  }
}

TEST(BruteForceSensitivityTest, Guard) {
  EXPECT_EQ(BruteForceSensitivity(40, 4, 3, 0.5).status().code(),
            absl::StatusCode::kResourceExhausted);
  EXPECT_FALSE(BruteForceSensitivity(0, 2, 1, 0.5).ok());
}

}  // namespace
}  // namespace fpsketch
