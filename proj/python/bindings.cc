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

// Python bindings for the fpsketch library.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fpsketch/bench.h"
#include "fpsketch/estimators.h"
#include "fpsketch/figures.h"
#include "fpsketch/privacy.h"
#include "fpsketch/random.h"
#include "fpsketch/sketch.h"
#include "fpsketch/stable.h"

namespace py = pybind11;

namespace fpsketch {
namespace {

[[noreturn]] void Raise(const absl::Status& status) {
  const std::string message(status.message());
  switch (status.code()) {
    case absl::StatusCode::kNotFound:
      throw py::key_error(message);
    case absl::StatusCode::kResourceExhausted:
    case absl::StatusCode::kInternal:
    case absl::StatusCode::kUnknown:
      throw std::runtime_error(message);
    default:
      throw py::value_error(message);
  }
}

void Check(const absl::Status& status) {
  if (!status.ok()) Raise(status);
}

template <class T>
T Unwrap(absl::StatusOr<T> value) {
  if (!value.ok()) Raise(value.status());
  return *std::move(value);
}

QuadratureSettings Settings(double tolerance, int64_t max_subdivisions) {
  QuadratureSettings settings;
  settings.tolerance = tolerance;
  settings.max_subdivisions = max_subdivisions;
  return settings;
}

std::vector<StreamItem> Items(const std::vector<std::pair<uint64_t, uint64_t>>& pairs) {
  std::vector<StreamItem> items;
  items.reserve(pairs.size());
  for (const auto& [key, value] : pairs) items.push_back({key, value});
  return items;
}

py::dict ReportDict(const PrivacyReport& report) {
  py::dict out;
  out["rho"] = report.rho;
  out["epsilon"] = report.epsilon;
  out["delta"] = report.delta;
  out["q"] = report.q;
  out["r"] = report.r;
  out["p"] = report.p;
  out["amplification"] = AmplificationModeName(report.mode);
  return out;
}

py::dict StatsDict(const TrialStats& stats) {
  py::dict out;
  out["median_error"] = stats.median_error;
  out["q25"] = stats.q25;
  out["q75"] = stats.q75;
  out["runs"] = stats.runs;
  return out;
}

FpSketch MakeSketch(double p, uint32_t r, double q, uint64_t seed, uint64_t m,
                    uint64_t max_value, bool non_private, bool per_item_subsample,
                    uint64_t stream_offset) {
  SketchConfig config;
  config.p = p;
  config.r = r;
  config.q = q;
  config.seed = seed;
  config.m = m;
  config.max_value = max_value;
  config.non_private = non_private;
  config.subsample_mode =
      per_item_subsample ? SubsampleMode::kPerItem : SubsampleMode::kPerRow;
  return Unwrap(FpSketch::Create(config, stream_offset));
}

}  // namespace
}  // namespace fpsketch

PYBIND11_MODULE(_core, m) {
  using namespace fpsketch;
  m.doc() = "Differentially private F_p sketches over p-stable projections.";

  py::class_<FpSketch>(m, "Sketch")
      .def(py::init(&MakeSketch), py::arg("p") = 1.0, py::arg("r") = 50,
           py::arg("q") = 1.0, py::arg("seed") = 0,
           py::arg("m") = uint64_t{1} << 32, py::arg("max_value") = uint64_t{1} << 32,
           py::arg("non_private") = false, py::arg("per_item_subsample") = false,
           py::arg("stream_offset") = 0)
      .def(
          "update",
          [](FpSketch& sketch, uint64_t key, uint64_t value) {
            Check(sketch.Update(StreamItem{key, value}));
          },
          py::arg("key"), py::arg("value") = 1)
      .def(
          "update_many",
          [](FpSketch& sketch,
             const std::vector<std::pair<uint64_t, uint64_t>>& items) {
            const std::vector<StreamItem> stream = Items(items);
            Check(sketch.Update(stream));
          },
          py::arg("items"))
      .def(
          "query",
          [](const FpSketch& sketch, const std::string& estimator,
             std::optional<double> debias_exponent) {
            EstimatorConstantsCache cache;
            return Unwrap(QuerySketch(
                sketch, {Unwrap(ParseEstimatorVariant(estimator)), debias_exponent},
                cache));
          },
          py::arg("estimator") = "gm", py::arg("debias_exponent") = py::none())
      .def("serialize",
           [](const FpSketch& sketch) { return py::bytes(Serialize(sketch)); })
      .def_static(
          "deserialize",
          [](const py::bytes& bytes) {
            return Unwrap(Deserialize(static_cast<std::string>(bytes)));
          },
          py::arg("data"))
      .def(
          "merge",
          [](const FpSketch& left, const FpSketch& right) {
            return Unwrap(Merge(left, right));
          },
          py::arg("other"))
      .def_property_readonly("accumulator",
                             [](const FpSketch& sketch) {
                               return std::vector<double>(sketch.accumulator().begin(),
                                                          sketch.accumulator().end());
                             })
      .def_property_readonly("items_seen", &FpSketch::items_seen)
      .def_property_readonly("stream_offset", &FpSketch::stream_offset)
      .def_property_readonly("p", [](const FpSketch& s) { return s.config().p; })
      .def_property_readonly("r", [](const FpSketch& s) { return s.config().r; })
      .def_property_readonly("q", [](const FpSketch& s) { return s.config().q; })
      .def_property_readonly("seed", [](const FpSketch& s) { return s.config().seed; })
      .def_property_readonly("non_private",
                             [](const FpSketch& s) { return s.config().non_private; })
      .def("__eq__", [](const FpSketch& a, const FpSketch& b) { return a == b; });

  m.def(
      "sensitivity",
      [](uint64_t n, uint64_t domain, uint64_t max_value, double p) {
        return Unwrap(MultiplicativeSensitivity({n, domain, max_value, p}));
      },
      py::arg("n"), py::arg("m"), py::arg("max_value"), py::arg("p"),
      "Pure multiplicative sensitivity bound of F_p.");
  m.def(
      "privacy_report",
      [](uint64_t n, uint64_t domain, uint64_t max_value, double p, double q,
         uint32_t r, const std::string& amplification) {
        return ReportDict(Unwrap(MakePrivacyReport(
            {n, domain, max_value, p}, q, r,
            Unwrap(ParseAmplificationMode(amplification)))));
      },
      py::arg("n"), py::arg("m"), py::arg("max_value"), py::arg("p"), py::arg("q"),
      py::arg("r") = 50, py::arg("amplification") = "linear");
  m.def(
      "density",
      [](double p, double x, double zeta, double tolerance, int64_t max_subdivisions) {
        return Unwrap(Density(Unwrap(StableParams::Create(p, zeta)), x,
                              Settings(tolerance, max_subdivisions)));
      },
      py::arg("p"), py::arg("x"), py::arg("zeta") = 1.0, py::arg("tolerance") = 1e-8,
      py::arg("max_subdivisions") = 1'000'000);
  m.def(
      "cdf",
      [](double p, double x, double zeta, double tolerance, int64_t max_subdivisions) {
        return Unwrap(Cdf(Unwrap(StableParams::Create(p, zeta)), x,
                          Settings(tolerance, max_subdivisions)));
      },
      py::arg("p"), py::arg("x"), py::arg("zeta") = 1.0, py::arg("tolerance") = 1e-8,
      py::arg("max_subdivisions") = 1'000'000);
  m.def(
      "ratio_curve",
      [](double p, double rho, const std::vector<double>& xs, double tolerance) {
        std::vector<std::pair<double, double>> out;
        for (const RatioPoint& point :
             Unwrap(DensityRatioCurve(p, rho, xs, Settings(tolerance, 1'000'000)))) {
          out.emplace_back(point.x, point.ratio);
        }
        return out;
      },
      py::arg("p"), py::arg("rho"), py::arg("xs"), py::arg("tolerance") = 1e-8,
      "Pairs (x, D_{p,1}(x) / D_{p,rho}(x)).");
  m.def(
      "sample_standard",
      [](double p, size_t count, uint64_t seed) {
        StableSampler sampler = Unwrap(StableSampler::Create(p));
        SplitMix64 gen(seed);
        std::vector<double> draws(count);
        for (double& x : draws) x = sampler(gen);
        return draws;
      },
      py::arg("p"), py::arg("count"), py::arg("seed") = 0);
  m.def(
      "laplace_check",
      [](double a) {
        QuadratureSettings settings;
        settings.tolerance = 1e-10;
        const LaplaceCheck check = Unwrap(LaplaceIdentityCheck(a, settings));
        return std::make_pair(check.numeric, check.closed_form);
      },
      py::arg("a"), "(numeric, closed form) of the Laplace-transform identity.");
  m.def(
      "median_abs_standard",
      [](double p) { return Unwrap(MedianAbsStandard(p)); }, py::arg("p"));
  m.def(
      "exact_fp",
      [](const std::vector<std::pair<uint64_t, uint64_t>>& items, double p) {
        return ExactFp(Items(items), p);
      },
      py::arg("items"), py::arg("p"));
  m.def(
      "brute_force_sensitivity",
      [](uint64_t n, uint64_t domain, uint64_t max_value, double p) {
        return Unwrap(BruteForceSensitivity(n, domain, max_value, p));
      },
      py::arg("n"), py::arg("m"), py::arg("max_value"), py::arg("p"));
  m.def(
      "run_synthetic_experiment",
      [](const std::string& distribution, uint64_t n, uint64_t key_domain, double p,
         uint32_t r, double q, const std::string& estimator, uint32_t repetitions,
         uint64_t seed, uint32_t threads) {
        SyntheticSpec spec;
        spec.distribution = Unwrap(ParseKeyDistribution(distribution));
        spec.n = n;
        spec.key_domain = key_domain;
        SketchConfig config;
        config.p = p;
        config.r = r;
        config.q = q;
        config.m = key_domain;
        config.max_value = 1;
        config.non_private = p > 1.0;
        const EstimatorKind kind{Unwrap(ParseEstimatorVariant(estimator)),
                                 std::nullopt};
        EstimatorConstantsCache cache;
        absl::StatusOr<TrialStats> stats;
        {
          py::gil_scoped_release release;
          stats = RunSyntheticExperiment(spec, config, kind,
                                         {repetitions, seed, threads}, cache);
        }
        return StatsDict(Unwrap(std::move(stats)));
      },
      py::arg("distribution") = "uniform", py::arg("n") = 10'000,
      py::arg("key_domain") = 1000, py::arg("p") = 1.0, py::arg("r") = 50,
      py::arg("q") = 0.02, py::arg("estimator") = "gm", py::arg("repetitions") = 100,
      py::arg("seed") = 0, py::arg("threads") = 0);
  m.def(
      "figure_data",
      [](const std::string& figure, uint64_t seed, uint32_t repetitions,
         uint64_t max_n, const std::string& dataset_path, bool use_surrogate,
         uint64_t surrogate_n) {
        FigureOptions options;
        options.seed = seed;
        options.repetitions = repetitions;
        options.max_n = max_n;
        options.dataset_path = dataset_path;
        options.use_surrogate = use_surrogate;
        options.surrogate_n = surrogate_n;
        return Unwrap(EmitFigureData(Unwrap(ParseFigureId(figure)), options));
      },
      py::arg("figure"), py::arg("seed") = 0, py::arg("repetitions") = 0,
      py::arg("max_n") = 10'000'000, py::arg("dataset_path") = "",
      py::arg("use_surrogate") = false, py::arg("surrogate_n") = 1'000'000,
      "CSV text of one figure's data.");
}
