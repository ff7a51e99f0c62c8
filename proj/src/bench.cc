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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "absl/functional/function_ref.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/synchronization/mutex.h"
#include "fpsketch/estimators.h"
#include "fpsketch/random.h"
#include "fpsketch/sketch.h"
#include "fpsketch/status_macros.h"

namespace fpsketch {
namespace {

constexpr uint64_t kSketchSeedSlot = 0;
constexpr uint64_t kStreamSeedSlot = 1;

uint64_t TrialSeed(uint64_t seed, uint32_t repetition, uint64_t slot) {
  return HashCombine(seed ^ kTrialDomain, repetition, slot);
}

std::vector<double> NormalisedCdf(std::vector<double> weights) {
  double total = 0.0;
  for (double& w : weights) {
    total += w;
    w = total;
  }
  for (double& w : weights) w /= total;
  weights.back() = 1.0;
  return weights;
}

// Runs `trial` for every repetition on a small thread pool and keeps the
// results in repetition order.
absl::StatusOr<std::vector<double>> RunTrials(
    uint32_t repetitions, uint32_t threads,
    const std::function<absl::StatusOr<double>(uint32_t)>& trial) {
  std::vector<double> results(repetitions, 0.0);
  std::atomic<uint32_t> next{0};
  absl::Mutex mutex;
  absl::Status first_error;
  auto worker = [&]() {
    for (;;) {
      const uint32_t rep = next.fetch_add(1);
      if (rep >= repetitions) return;
      absl::StatusOr<double> result = trial(rep);
      if (!result.ok()) {
        absl::MutexLock lock(&mutex);
        if (first_error.ok()) first_error = result.status();
        next.store(repetitions);
        return;
      }
      results[rep] = *result;
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max(1u, repetitions));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (uint32_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& thread : pool) thread.join();
  }
  if (!first_error.ok()) return first_error;
  return results;
}

absl::Status CheckExperimentInputs(const SketchConfig& config,
                                   const ExperimentOptions& options) {
  FPSKETCH_RETURN_IF_ERROR(ValidateSketchConfig(config));
  if (options.repetitions < 1) {
    return absl::InvalidArgumentError("repetitions must be at least 1");
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<KeyDistribution> ParseKeyDistribution(absl::string_view name) {
  if (name == "uniform") return KeyDistribution::kUniform;
  if (name == "binomial") return KeyDistribution::kBinomial;
  if (name == "zipf") return KeyDistribution::kZipf;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown distribution '", name, "' (expected uniform, binomial or zipf)"));
}

std::string KeyDistributionName(KeyDistribution distribution) {
  switch (distribution) {
    case KeyDistribution::kUniform:
      return "uniform";
    case KeyDistribution::kBinomial:
      return "binomial";
    case KeyDistribution::kZipf:
      return "zipf";
  }
  return "unknown";
}

SyntheticSpec ZipfSurrogateSpec(uint64_t n) {
  SyntheticSpec spec;
  spec.distribution = KeyDistribution::kZipf;
  spec.n = n;
  spec.key_domain = kSurrogateKeyDomain;
  return spec;
}

absl::Status ValidateSyntheticSpec(const SyntheticSpec& spec) {
  if (spec.key_domain < 1) {
    return absl::InvalidArgumentError("key domain must be at least 1");
  }
  if (spec.key_domain > (uint64_t{1} << 28)) {
    return absl::InvalidArgumentError(
        absl::StrCat("key domain ", spec.key_domain, " is too large"));
  }
  if (spec.value < 1) return absl::InvalidArgumentError("value must be >= 1");
  if (spec.distribution == KeyDistribution::kBinomial &&
      !(spec.binomial_success > 0.0 && spec.binomial_success < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("binomial success probability must lie in (0, 1), got ",
                     spec.binomial_success));
  }
  if (spec.distribution == KeyDistribution::kZipf &&
      !(spec.zipf_exponent > 0.0 && std::isfinite(spec.zipf_exponent))) {
    return absl::InvalidArgumentError("Zipf exponent must be positive");
  }
  return absl::OkStatus();
}

absl::StatusOr<KeySampler> KeySampler::Create(const SyntheticSpec& spec) {
  FPSKETCH_RETURN_IF_ERROR(ValidateSyntheticSpec(spec));
  const uint64_t domain = spec.key_domain;
  std::vector<double> weights;
  switch (spec.distribution) {
    case KeyDistribution::kUniform:
      break;
    case KeyDistribution::kBinomial: {
      const auto trials = static_cast<double>(domain - 1);
      const double log_success = std::log(spec.binomial_success);
      const double log_failure = std::log1p(-spec.binomial_success);
      const double log_norm = std::lgamma(trials + 1.0);
      weights.resize(domain);
      for (uint64_t k = 0; k < domain; ++k) {
        const auto kk = static_cast<double>(k);
        weights[k] = std::exp(log_norm - std::lgamma(kk + 1.0) -
                              std::lgamma(trials - kk + 1.0) + kk * log_success +
                              (trials - kk) * log_failure);
      }
      weights = NormalisedCdf(std::move(weights));
      break;
    }
    case KeyDistribution::kZipf: {
      weights.resize(domain);
      for (uint64_t k = 0; k < domain; ++k) {
        weights[k] = std::pow(static_cast<double>(k + 1), -spec.zipf_exponent);
      }
      weights = NormalisedCdf(std::move(weights));
      break;
    }
  }
  return KeySampler(spec.distribution, domain, std::move(weights));
}

uint64_t KeySampler::operator()(SplitMix64& gen) const {
  if (distribution_ == KeyDistribution::kUniform) {
    return 1 + UniformBelow(gen, key_domain_);
  }
  const double u = UniformOpen(gen());
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto index = static_cast<uint64_t>(it - cdf_.begin());
  return 1 + std::min(index, key_domain_ - 1);
}

absl::Status GenerateSyntheticStream(
    const SyntheticSpec& spec, uint64_t seed,
    absl::FunctionRef<absl::Status(const StreamItem&)> sink) {
  FPSKETCH_ASSIGN_OR_RETURN(KeySampler sampler, KeySampler::Create(spec));
  SplitMix64 gen(seed);
  for (uint64_t i = 0; i < spec.n; ++i) {
    FPSKETCH_RETURN_IF_ERROR(sink(StreamItem{sampler(gen), spec.value}));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<StreamItem>> GenerateSyntheticStream(
    const SyntheticSpec& spec, uint64_t seed) {
  std::vector<StreamItem> stream;
  stream.reserve(spec.n);
  FPSKETCH_RETURN_IF_ERROR(
      GenerateSyntheticStream(spec, seed, [&](const StreamItem& item) {
        stream.push_back(item);
        return absl::OkStatus();
      }));
  return stream;
}

double ExactFp(std::span<const StreamItem> stream, double p) {
  std::vector<StreamItem> sorted(stream.begin(), stream.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const StreamItem& a, const StreamItem& b) { return a.key < b.key; });
  double total = 0.0;
  size_t i = 0;
  while (i < sorted.size()) {
    double mass = 0.0;
    const uint64_t key = sorted[i].key;
    for (; i < sorted.size() && sorted[i].key == key; ++i) {
      mass += static_cast<double>(sorted[i].value);
    }
    total += std::pow(mass, p);
  }
  return total;
}

double MultiplicativeError(double estimate, double truth) {
  if (truth == 0.0) return estimate == 0.0 ? 0.0 : HUGE_VAL;
  return std::abs(estimate - truth) / truth;
}

TrialStats SummarizeErrors(std::vector<double> errors) {
  TrialStats stats;
  stats.runs = static_cast<uint32_t>(errors.size());
  if (errors.empty()) return stats;
  std::sort(errors.begin(), errors.end());
  auto quantile = [&](double level) {
    const double h = level * static_cast<double>(errors.size() - 1);
    const auto lo = static_cast<size_t>(std::floor(h));
    const size_t hi = std::min(lo + 1, errors.size() - 1);
    return errors[lo] + (h - static_cast<double>(lo)) * (errors[hi] - errors[lo]);
  };
  stats.q25 = quantile(0.25);
  stats.median_error = quantile(0.5);
  stats.q75 = quantile(0.75);
  return stats;
}

absl::StatusOr<TrialStats> RunSyntheticExperiment(
    const SyntheticSpec& spec, const SketchConfig& config,
    const EstimatorKind& kind, const ExperimentOptions& options,
    EstimatorConstantsCache& cache) {
  FPSKETCH_RETURN_IF_ERROR(CheckExperimentInputs(config, options));
  FPSKETCH_ASSIGN_OR_RETURN(KeySampler sampler, KeySampler::Create(spec));
  if (config.m < spec.key_domain || config.max_value < spec.value) {
    return absl::InvalidArgumentError(
        "sketch domain bounds (m, M) do not cover the synthetic stream");
  }
  FPSKETCH_ASSIGN_OR_RETURN(EstimatorConstants constants,
                            cache.Get(config.p, config.r));
  auto trial = [&](uint32_t rep) -> absl::StatusOr<double> {
    SketchConfig trial_config = config;
    trial_config.seed = TrialSeed(options.seed, rep, kSketchSeedSlot);
    FPSKETCH_ASSIGN_OR_RETURN(FpSketch sketch, FpSketch::Create(trial_config));
    SplitMix64 gen(TrialSeed(options.seed, rep, kStreamSeedSlot));
    std::vector<uint64_t> counts(spec.key_domain + 1, 0);
    for (uint64_t i = 0; i < spec.n; ++i) {
      const StreamItem item{sampler(gen), spec.value};
      ++counts[item.key];
      FPSKETCH_RETURN_IF_ERROR(sketch.Update(item));
    }
    double truth = 0.0;
    for (uint64_t count : counts) {
      if (count > 0) {
        truth += std::pow(static_cast<double>(count * spec.value), config.p);
      }
    }
    FPSKETCH_ASSIGN_OR_RETURN(
        double estimate, Estimate(sketch.accumulator(), kind, constants, config.q));
    return MultiplicativeError(estimate, truth);
  };
  FPSKETCH_ASSIGN_OR_RETURN(std::vector<double> errors,
                            RunTrials(options.repetitions, options.threads, trial));
  return SummarizeErrors(std::move(errors));
}

absl::StatusOr<TrialStats> RunStreamExperiment(
    std::span<const StreamItem> stream, const SketchConfig& config,
    const EstimatorKind& kind, const ExperimentOptions& options,
    EstimatorConstantsCache& cache) {
  FPSKETCH_RETURN_IF_ERROR(CheckExperimentInputs(config, options));
  for (const StreamItem& item : stream) {
    FPSKETCH_RETURN_IF_ERROR(ValidateStreamItem(config, item));
  }
  const double truth = ExactFp(stream, config.p);
  FPSKETCH_ASSIGN_OR_RETURN(EstimatorConstants constants,
                            cache.Get(config.p, config.r));
  auto trial = [&](uint32_t rep) -> absl::StatusOr<double> {
    SketchConfig trial_config = config;
    trial_config.seed = TrialSeed(options.seed, rep, kSketchSeedSlot);
    FPSKETCH_ASSIGN_OR_RETURN(FpSketch sketch, FpSketch::Create(trial_config));
    FPSKETCH_RETURN_IF_ERROR(sketch.Update(stream));
    FPSKETCH_ASSIGN_OR_RETURN(
        double estimate, Estimate(sketch.accumulator(), kind, constants, config.q));
    return MultiplicativeError(estimate, truth);
  };
  FPSKETCH_ASSIGN_OR_RETURN(std::vector<double> errors,
                            RunTrials(options.repetitions, options.threads, trial));
  return SummarizeErrors(std::move(errors));
}

absl::StatusOr<double> BruteForceSensitivity(uint64_t n, uint64_t m,
                                             uint64_t max_value, double p) {
  if (n < 1 || m < 1 || max_value < 1) {
    return absl::InvalidArgumentError("n, m and M must all be at least 1");
  }
  if (!(p > 0.0 && std::isfinite(p))) {
    return absl::InvalidArgumentError(absl::StrCat("p must be positive, got ", p));
  }
  // Items are (key, value) pairs; a stream's F_p depends only on its
  // multiset, so enumerate multisets C of n - 1 items and compare C + e
  // across all single items e.
  constexpr double kMaxStreams = 1e7;
  if (m > 64 || max_value > 64) {
    return absl::ResourceExhaustedError("domain too large to enumerate");
  }
  const uint64_t types = m * max_value;
  double multisets = 1.0;
  for (uint64_t i = 1; i < n; ++i) {
    multisets *= static_cast<double>(types + i - 1) / static_cast<double>(i);
    if (multisets * static_cast<double>(types) > kMaxStreams) {
      return absl::ResourceExhaustedError(absl::StrCat(
          "exhaustive enumeration for n = ", n, ", m = ", m, ", M = ", max_value,
          " exceeds ", kMaxStreams, " streams"));
    }
  }
  std::vector<double> mass(m, 0.0);
  double best = 1.0;
  auto evaluate = [&]() {
    double low = HUGE_VAL;
    double high = 0.0;
    for (uint64_t key = 0; key < m; ++key) {
      for (uint64_t value = 1; value <= max_value; ++value) {
        double f = 0.0;
        for (uint64_t k = 0; k < m; ++k) {
          const double total = mass[k] + (k == key ? static_cast<double>(value) : 0.0);
          if (total > 0.0) f += std::pow(total, p);
        }
        low = std::min(low, f);
        high = std::max(high, f);
      }
    }
    best = std::max(best, high / low);
  };
  // Non-decreasing sequences of item types encode the multisets.
  auto recurse = [&](auto& self, uint64_t first_type, uint64_t remaining) -> void {
    if (remaining == 0) {
      evaluate();
      return;
    }
    for (uint64_t type = first_type; type < types; ++type) {
      const uint64_t key = type / max_value;
      const auto value = static_cast<double>(type % max_value + 1);
      mass[key] += value;
      self(self, type, remaining - 1);
      mass[key] -= value;
    }
  };
  recurse(recurse, 0, n - 1);
  return best;
}

}  // namespace fpsketch
