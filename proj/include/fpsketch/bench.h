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

// Experiment harness: exact F_p, synthetic streams, repeated sketch-and-query
// trials, and an exhaustive sensitivity oracle for tiny domains.

#ifndef FPSKETCH_BENCH_H_
#define FPSKETCH_BENCH_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/functional/function_ref.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "fpsketch/estimators.h"
#include "fpsketch/random.h"
#include "fpsketch/sketch.h"

namespace fpsketch {

enum class KeyDistribution {
  kUniform,
  // 1 + Binomial(key_domain - 1, binomial_success).
  kBinomial,
  // P(k) proportional to k^-zipf_exponent.
  kZipf,
};

absl::StatusOr<KeyDistribution> ParseKeyDistribution(absl::string_view name);
std::string KeyDistributionName(KeyDistribution distribution);

struct SyntheticSpec {
  KeyDistribution distribution = KeyDistribution::kUniform;
  uint64_t n = 10'000;
  uint64_t key_domain = 1000;
  uint64_t value = 1;
  double binomial_success = 0.5;
  double zipf_exponent = 1.1;
};

// Key domain of the Zipf stand-in for the real-world app-usage corpus.
inline constexpr uint64_t kSurrogateKeyDomain = 1'488'095;

SyntheticSpec ZipfSurrogateSpec(uint64_t n);

absl::Status ValidateSyntheticSpec(const SyntheticSpec& spec);

// Draws keys in [1, key_domain]. Binomial and Zipf keys use inversion on a
// precomputed CDF table, so results depend only on the generator's bits.
class KeySampler {
 public:
  static absl::StatusOr<KeySampler> Create(const SyntheticSpec& spec);

  uint64_t operator()(SplitMix64& gen) const;

 private:
  KeySampler(KeyDistribution distribution, uint64_t key_domain,
             std::vector<double> cdf)
      : distribution_(distribution),
        key_domain_(key_domain),
        cdf_(std::move(cdf)) {}

  KeyDistribution distribution_;
  uint64_t key_domain_;
  std::vector<double> cdf_;
};

absl::Status GenerateSyntheticStream(
    const SyntheticSpec& spec, uint64_t seed,
    absl::FunctionRef<absl::Status(const StreamItem&)> sink);

absl::StatusOr<std::vector<StreamItem>> GenerateSyntheticStream(
    const SyntheticSpec& spec, uint64_t seed);

// sum over keys of (total value of the key)^p. Zero for an empty stream.
double ExactFp(std::span<const StreamItem> stream, double p);

// |estimate - truth| / truth.
double MultiplicativeError(double estimate, double truth);

struct TrialStats {
  double median_error = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  uint32_t runs = 0;
};

// Median and quartiles with linear interpolation between order statistics.
TrialStats SummarizeErrors(std::vector<double> errors);

struct ExperimentOptions {
  uint32_t repetitions = 100;
  uint64_t seed = 0;
  // 0 picks std::thread::hardware_concurrency().
  uint32_t threads = 0;
};

// Each repetition draws a fresh stream and a fresh sketch seed, both derived
// from (options.seed, repetition). config.seed is ignored.
absl::StatusOr<TrialStats> RunSyntheticExperiment(
    const SyntheticSpec& spec, const SketchConfig& config,
    const EstimatorKind& kind, const ExperimentOptions& options,
    EstimatorConstantsCache& cache);

// Fixed stream; only the sketch seed varies between repetitions.
absl::StatusOr<TrialStats> RunStreamExperiment(
    std::span<const StreamItem> stream, const SketchConfig& config,
    const EstimatorKind& kind, const ExperimentOptions& options,
    EstimatorConstantsCache& cache);

// Largest F_p(S) / F_p(S') over all same-length streams S, S' of n items
// with keys in [1, m] and values in [1, M] that differ in one item. Fails
// with kResourceExhausted when the enumeration would exceed 10^7 streams.
absl::StatusOr<double> BruteForceSensitivity(uint64_t n, uint64_t m,
                                             uint64_t max_value, double p);

}  // namespace fpsketch

#endif  // FPSKETCH_BENCH_H_
