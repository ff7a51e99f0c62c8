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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "fpsketch/bench.h"
#include "fpsketch/estimators.h"
#include "fpsketch/privacy.h"
#include "fpsketch/stable.h"
#include "fpsketch/status_macros.h"
#include "fpsketch/stream_io.h"

namespace fpsketch {
namespace {

template <class... Args>
std::string Row(const char* format, Args... args) {
  char line[256];
  std::snprintf(line, sizeof(line), format, args...);
  return line;
}

absl::StatusOr<std::string> SensitivityCurves() {
  const uint64_t max_values[] = {1, uint64_t{1} << 5, uint64_t{1} << 10,
                                 uint64_t{1} << 15};
  std::string out = absl::StrCat("# figure=sensitivity_fig1 n=", kCurveStreamLength,
                                 " m=", kCurveKeyDomain,
                                 " M=1,32,1024,32768 p=0.01:0.01:1\n");
  out += "M,p,rho\n";
  for (uint64_t max_value : max_values) {
    for (int k = 1; k <= 100; ++k) {
      const double p = k / 100.0;
      FPSKETCH_ASSIGN_OR_RETURN(
          double rho, MultiplicativeSensitivity(
                          {kCurveStreamLength, kCurveKeyDomain, max_value, p}));
      out += Row("%llu,%.2f,%.15g\n", static_cast<unsigned long long>(max_value),
                 p, rho);
    }
  }
  return out;
}

absl::StatusOr<std::string> EpsilonCurve() {
  const double q = 1.0 / kCurveWidth;
  std::string out = absl::StrCat("# figure=eps_fig3 n=", kCurveStreamLength,
                                 " m=", kCurveKeyDomain, " M=", kBudgetMaxValue,
                                 " r=", kCurveWidth, " q=1/r p=0.05:0.01:1\n");
  out += "p,epsilon\n";
  for (int k = 5; k <= 100; ++k) {
    const double p = k / 100.0;
    FPSKETCH_ASSIGN_OR_RETURN(
        double epsilon,
        Epsilon({kCurveStreamLength, kCurveKeyDomain, kBudgetMaxValue, p}, q,
                kCurveWidth));
    out += Row("%.2f,%.15g\n", p, epsilon);
  }
  return out;
}

// Ratio D_{p,1}(x) / D_{p,2^p}(x) over a grid, one block per p.
absl::StatusOr<std::string> RatioCurves(const std::vector<double>& ps,
                                        const std::vector<double>& xs,
                                        const QuadratureSettings& settings,
                                        const std::string& header) {
  std::string out = header + "p,x,ratio\n";
  for (double p : ps) {
    FPSKETCH_ASSIGN_OR_RETURN(std::vector<RatioPoint> curve,
                              DensityRatioCurve(p, std::exp2(p), xs, settings));
    for (const RatioPoint& point : curve) {
      out += Row("%.2f,%.10g,%.15g\n", p, point.x, point.ratio);
    }
  }
  return out;
}

absl::StatusOr<std::string> SyntheticSweep(const FigureOptions& options) {
  const uint32_t repetitions = options.repetitions ? options.repetitions : 100;
  const double ps[] = {0.25, 0.5, 0.75, 1.0};
  std::vector<uint64_t> lengths;
  for (uint64_t n = 10'000; n <= 10'000'000; n *= 10) {
    if (n <= options.max_n) lengths.push_back(n);
  }
  std::string out = absl::StrCat(
      "# figure=synthetic_fig5 key_domain=1000 value=1 r=50 q=0.02 estimator=",
      EstimatorVariantName(options.estimator), " runs=", repetitions,
      " seed=", options.seed, "\n");
  out += "distribution,p,n,median_error,q25,q75,runs\n";
  EstimatorConstantsCache cache(options.quadrature);
  for (KeyDistribution distribution :
       {KeyDistribution::kUniform, KeyDistribution::kBinomial}) {
    for (double p : ps) {
      for (uint64_t n : lengths) {
        SyntheticSpec spec;
        spec.distribution = distribution;
        spec.n = n;
        SketchConfig config;
        config.p = p;
        config.r = 50;
        config.q = 0.02;
        config.m = spec.key_domain;
        config.max_value = 1;
        FPSKETCH_ASSIGN_OR_RETURN(
            TrialStats stats,
            RunSyntheticExperiment(
                spec, config, {options.estimator, std::nullopt},
                {repetitions, options.seed, options.threads}, cache));
        out += Row("%s,%.2f,%llu,%.10g,%.10g,%.10g,%u\n",
                   KeyDistributionName(distribution).c_str(), p,
                   static_cast<unsigned long long>(n), stats.median_error,
                   stats.q25, stats.q75, stats.runs);
      }
    }
  }
  return out;
}

absl::StatusOr<std::string> RealDataSweep(const FigureOptions& options) {
  const uint32_t repetitions = options.repetitions ? options.repetitions : 5;
  std::vector<StreamItem> stream;
  std::string source;
  if (!options.dataset_path.empty()) {
    FPSKETCH_ASSIGN_OR_RETURN(stream, LoadStreamCsvFile(options.dataset_path));
    source = options.dataset_path;
  } else if (options.use_surrogate) {
    FPSKETCH_ASSIGN_OR_RETURN(
        stream, GenerateSyntheticStream(ZipfSurrogateSpec(options.surrogate_n),
                                        HashCombine(options.seed, 0)));
    source = absl::StrCat("zipf_surrogate(n=", options.surrogate_n,
                          ",domain=", kSurrogateKeyDomain, ",s=1.1)");
  } else {
    return absl::InvalidArgumentError(
        "real_fig6 needs a dataset path or the surrogate option");
  }
  if (stream.empty()) {
    return absl::InvalidArgumentError("the dataset holds no items");
  }
  uint64_t max_key = 2;
  uint64_t max_value = 1;
  for (const StreamItem& item : stream) {
    if (item.key < 1 || item.value < 1) {
      return absl::InvalidArgumentError("dataset keys and values must be >= 1");
    }
    max_key = std::max(max_key, item.key);
    max_value = std::max(max_value, item.value);
  }
  const double ps[] = {0.05, 0.1, 0.25, 0.5, 0.75, 1.0};
  std::string out = absl::StrCat(
      "# figure=real_fig6 source=", source, " n=", stream.size(),
      " r=50 q=0.02 estimator=", EstimatorVariantName(options.estimator),
      " runs=", repetitions, " seed=", options.seed, "\n");
  out += "source,p,n,median_error,q25,q75,runs\n";
  EstimatorConstantsCache cache(options.quadrature);
  for (double p : ps) {
    SketchConfig config;
    config.p = p;
    config.r = 50;
    config.q = 0.02;
    config.m = max_key;
    config.max_value = max_value;
    FPSKETCH_ASSIGN_OR_RETURN(
        TrialStats stats,
        RunStreamExperiment(stream, config, {options.estimator, std::nullopt},
                            {repetitions, options.seed, options.threads}, cache));
    out += Row("%s,%.2f,%zu,%.10g,%.10g,%.10g,%u\n",
               options.dataset_path.empty() ? "surrogate" : "dataset", p,
               stream.size(), stats.median_error, stats.q25, stats.q75,
               stats.runs);
  }
  return out;
}

}  // namespace

absl::StatusOr<FigureId> ParseFigureId(absl::string_view name) {
  for (FigureId id : {FigureId::kSensitivity, FigureId::kRatio,
                      FigureId::kEpsilon, FigureId::kRatioExploratory,
                      FigureId::kSynthetic, FigureId::kRealData}) {
    if (name == FigureIdName(id)) return id;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown figure '", name,
      "' (expected sensitivity_fig1, ratio_fig2, eps_fig3, ratio_fig4, "
      "synthetic_fig5 or real_fig6)"));
}

std::string FigureIdName(FigureId id) {
  switch (id) {
    case FigureId::kSensitivity:
      return "sensitivity_fig1";
    case FigureId::kRatio:
      return "ratio_fig2";
    case FigureId::kEpsilon:
      return "eps_fig3";
    case FigureId::kRatioExploratory:
      return "ratio_fig4";
    case FigureId::kSynthetic:
      return "synthetic_fig5";
    case FigureId::kRealData:
      return "real_fig6";
  }
  return "unknown";
}

absl::StatusOr<std::string> EmitFigureData(FigureId id,
                                           const FigureOptions& options) {
  FPSKETCH_RETURN_IF_ERROR(ValidateQuadratureSettings(options.quadrature));
  switch (id) {
    case FigureId::kSensitivity:
      return SensitivityCurves();
    case FigureId::kEpsilon:
      return EpsilonCurve();
    case FigureId::kRatio: {
      std::vector<double> ps;
      for (int k = 1; k <= 10; ++k) ps.push_back(k / 10.0);
      std::vector<double> xs;
      for (int k = 0; k <= 200; ++k) xs.push_back(k / 10.0);
      return RatioCurves(ps, xs, options.quadrature,
                         "# figure=ratio_fig2 zeta=1 vs 2^p p=0.1:0.1:1 "
                         "x=0:0.1:20\n");
    }
    case FigureId::kRatioExploratory: {
      // Far-tail densities are small; tighten the absolute tolerance.
      QuadratureSettings settings = options.quadrature;
      settings.tolerance = std::min(settings.tolerance, 1e-13);
      std::vector<double> xs;
      for (int k = 0; k <= 60; ++k) xs.push_back(std::pow(10.0, k / 20.0));
      return RatioCurves({1.1, 1.9, 1.95, 1.99}, xs, settings,
                         "# figure=ratio_fig4 zeta=1 vs 2^p p=1.1,1.9,1.95,1.99 "
                         "x=10^(0:0.05:3) non-private\n");
    }
    case FigureId::kSynthetic:
      return SyntheticSweep(options);
    case FigureId::kRealData:
      return RealDataSweep(options);
  }
  return absl::InvalidArgumentError("unknown figure");
}

}  // namespace fpsketch
