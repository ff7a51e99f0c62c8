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

#include "cli.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "fpsketch/bench.h"
#include "fpsketch/estimators.h"
#include "fpsketch/figures.h"
#include "fpsketch/privacy.h"
#include "fpsketch/sketch.h"
#include "fpsketch/stable.h"
#include "fpsketch/status_macros.h"
#include "fpsketch/stream_io.h"
#include "json.hpp"

namespace fpsketch::cli {
namespace {

using Json = nlohmann::ordered_json;

constexpr double kLaplaceTolerance = 1e-8;

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& log;
};

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kOutOfRange:
    case absl::StatusCode::kFailedPrecondition:
      return kExitInvalidArgument;
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kPermissionDenied:
    case absl::StatusCode::kUnavailable:
      return kExitIo;
    case absl::StatusCode::kDataLoss:
      return kExitDataFormat;
    default:
      return kExitFailure;
  }
}

// Problems inside an input file are data-format errors, not bad flags.
absl::Status AsDataError(absl::Status status) {
  switch (status.code()) {
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kOutOfRange:
    case absl::StatusCode::kFailedPrecondition:
      return absl::DataLossError(status.message());
    default:
      return status;
  }
}

absl::StatusOr<std::string> ReadAll(const std::string& path, std::istream& in) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(in), {});
  }
  std::ifstream file(path, std::ios::binary);
  if (!file) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::string bytes(std::istreambuf_iterator<char>(file), {});
  if (file.bad()) return absl::UnavailableError(absl::StrCat("cannot read ", path));
  return bytes;
}

absl::Status WriteAll(const std::string& path, std::ostream& out,
                      const std::string& bytes) {
  if (path == "-") {
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    return out ? absl::OkStatus()
               : absl::UnavailableError("cannot write to standard output");
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    return absl::PermissionDeniedError(absl::StrCat("cannot open ", path, " for writing"));
  }
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  file.close();
  if (!file) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  return absl::OkStatus();
}

absl::StatusOr<FpSketch> LoadSketch(const std::string& path, std::istream& in) {
  FPSKETCH_ASSIGN_OR_RETURN(std::string bytes, ReadAll(path, in));
  absl::StatusOr<FpSketch> sketch = Deserialize(bytes);
  if (!sketch.ok()) {
    return absl::DataLossError(
        absl::StrCat(path == "-" ? "<stdin>" : path, ": ", sketch.status().message()));
  }
  return sketch;
}

// Feeds a key,value CSV into the sketch item by item.
absl::Status IngestCsv(const std::string& path, std::istream& in,
                       FpSketch& sketch) {
  const std::string source = path == "-" ? "<stdin>" : path;
  auto sink = [&sketch](const StreamItem& item) { return sketch.Update(item); };
  if (path == "-") return AsDataError(ReadStreamCsv(in, source, sink));
  std::ifstream file(path);
  if (!file) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return AsDataError(ReadStreamCsv(file, source, sink));
}

absl::StatusOr<std::vector<StreamItem>> LoadStream(const std::string& path,
                                                   std::istream& in) {
  if (path == "-") {
    absl::StatusOr<std::vector<StreamItem>> items = ReadStreamCsv(in, "<stdin>");
    if (!items.ok()) return AsDataError(items.status());
    return items;
  }
  absl::StatusOr<std::vector<StreamItem>> items = LoadStreamCsvFile(path);
  if (!items.ok()) return AsDataError(items.status());
  return items;
}

// Option value as JSON: numbers stay numbers, lists become arrays.
Json ValueJson(const std::string& text) {
  int64_t integer;
  if (absl::SimpleAtoi(text, &integer)) return integer;
  uint64_t large;
  if (absl::SimpleAtoi(text, &large)) return large;
  double number;
  if (!text.empty() && absl::SimpleAtod(text, &number) && std::isfinite(number)) {
    return number;
  }
  if (text.empty()) return nullptr;
  return text;
}

Json OptionJson(const CLI::Option& option) {
  if (option.get_expected_max() == 0) return option.count() > 0;
  std::vector<std::string> values = option.results();
  if (values.empty()) {
    const std::string& fallback = option.get_default_str();
    if (fallback.empty()) return nullptr;
    if (option.get_items_expected_max() <= 1) return ValueJson(fallback);
    // Defaults of list options print as "[a,b,c]", or "{}" when empty.
    std::string inner = fallback;
    if (inner.size() >= 2 && (inner.front() == '[' || inner.front() == '{')) {
      inner = inner.substr(1, inner.size() - 2);
    }
    if (inner.empty()) return Json::array();
    values = CLI::detail::split(inner, ',');
  }
  if (option.get_items_expected_max() <= 1 && values.size() == 1) {
    return ValueJson(values.front());
  }
  Json array = Json::array();
  for (const std::string& value : values) array.push_back(ValueJson(value));
  return array;
}

void AddOptions(const CLI::App& app, Json& options) {
  for (const CLI::Option* option : app.get_options()) {
    if (option == app.get_help_ptr() || option == app.get_help_all_ptr()) continue;
    options[option->get_single_name()] = OptionJson(*option);
  }
}

// Every resolved option, defaults included, of the chain of invoked
// subcommands.
Json ResolvedConfig(const CLI::App& root) {
  Json config;
  config["event"] = "config";
  std::vector<std::string> path;
  Json options = Json::object();
  AddOptions(root, options);
  const CLI::App* app = &root;
  while (true) {
    std::vector<const CLI::App*> chosen = app->get_subcommands(
        [](const CLI::App* sub) { return sub->parsed(); });
    if (chosen.empty()) break;
    app = chosen.front();
    path.push_back(app->get_name());
    AddOptions(*app, options);
  }
  config["command"] = absl::StrJoin(path, " ");
  config["options"] = std::move(options);
  return config;
}

template <class... Args>
std::string Format(const char* format, Args... args) {
  char line[512];
  std::snprintf(line, sizeof(line), format, args...);
  return line;
}

// ---------------------------------------------------------------- sketch

struct SketchFlags {
  double p = 1.0;
  uint32_t r = 50;
  double q = 1.0;
  uint64_t seed = 0;
  uint64_t m = uint64_t{1} << 32;
  uint64_t max_value = uint64_t{1} << 32;
  bool non_private = false;
  bool per_item = false;
  uint64_t stream_offset = 0;
  std::string input = "-";
  std::string output = "-";
  std::string sketch_path = "-";
  std::vector<std::string> merge_inputs;
  std::string estimator = "gm";
  std::optional<double> debias_exponent;
  bool privacy_report = false;
  std::optional<uint64_t> n;
  std::optional<uint64_t> report_m;
  std::optional<uint64_t> report_max_value;
  std::string amplification = "linear";
  std::string constants_cache;
};

absl::Status SketchBuild(const SketchFlags& flags, Streams io) {
  SketchConfig config;
  config.p = flags.p;
  config.r = flags.r;
  config.q = flags.q;
  config.seed = flags.seed;
  config.m = flags.m;
  config.max_value = flags.max_value;
  config.non_private = flags.non_private;
  config.subsample_mode =
      flags.per_item ? SubsampleMode::kPerItem : SubsampleMode::kPerRow;
  if (config.p > 1.0 && !config.non_private) {
    return absl::InvalidArgumentError(
        "p > 1 carries no privacy guarantee; pass --non-private to build anyway");
  }
  FPSKETCH_ASSIGN_OR_RETURN(FpSketch sketch,
                            FpSketch::Create(config, flags.stream_offset));
  FPSKETCH_RETURN_IF_ERROR(IngestCsv(flags.input, io.in, sketch));
  return WriteAll(flags.output, io.out, Serialize(sketch));
}

absl::Status SketchUpdate(const SketchFlags& flags, Streams io) {
  if (flags.sketch_path == "-" && flags.input == "-") {
    return absl::InvalidArgumentError(
        "the sketch and the stream cannot both come from standard input");
  }
  FPSKETCH_ASSIGN_OR_RETURN(FpSketch sketch, LoadSketch(flags.sketch_path, io.in));
  FPSKETCH_RETURN_IF_ERROR(IngestCsv(flags.input, io.in, sketch));
  return WriteAll(flags.output, io.out, Serialize(sketch));
}

absl::Status SketchMerge(const SketchFlags& flags, Streams io) {
  if (flags.merge_inputs.size() < 2) {
    return absl::InvalidArgumentError("merge needs at least two sketch files");
  }
  if (std::count(flags.merge_inputs.begin(), flags.merge_inputs.end(), "-") > 1) {
    return absl::InvalidArgumentError("standard input can supply only one sketch");
  }
  FPSKETCH_ASSIGN_OR_RETURN(FpSketch merged,
                            LoadSketch(flags.merge_inputs.front(), io.in));
  for (size_t i = 1; i < flags.merge_inputs.size(); ++i) {
    FPSKETCH_ASSIGN_OR_RETURN(FpSketch next, LoadSketch(flags.merge_inputs[i], io.in));
    FPSKETCH_ASSIGN_OR_RETURN(merged, Merge(merged, next));
  }
  return WriteAll(flags.output, io.out, Serialize(merged));
}

Json ReportJson(const PrivacyReport& report) {
  Json json;
  json["rho"] = report.rho;
  json["epsilon"] = report.epsilon;
  json["delta"] = report.delta;
  json["q"] = report.q;
  json["r"] = report.r;
  json["p"] = report.p;
  json["amplification"] = AmplificationModeName(report.mode);
  if (report.utility.has_value()) {
    json["utility"] = {{"gamma_total", report.utility->gamma_total},
                       {"eta_total", report.utility->eta_total},
                       {"r_required", report.utility->r_required},
                       {"advisory", true}};
  }
  return json;
}

absl::Status SketchQuery(const SketchFlags& flags, Streams io) {
  FPSKETCH_ASSIGN_OR_RETURN(EstimatorVariant variant,
                            ParseEstimatorVariant(flags.estimator));
  FPSKETCH_ASSIGN_OR_RETURN(AmplificationMode mode,
                            ParseAmplificationMode(flags.amplification));
  if (flags.privacy_report &&
      (!flags.n.has_value() || !flags.report_m.has_value() ||
       !flags.report_max_value.has_value())) {
    return absl::InvalidArgumentError(
        "--privacy-report needs the public bounds --n, --m and --M");
  }
  FPSKETCH_ASSIGN_OR_RETURN(FpSketch sketch, LoadSketch(flags.sketch_path, io.in));
  if (flags.privacy_report && sketch.config().non_private) {
    return absl::FailedPreconditionError(
        "the sketch is marked non-private; no privacy report applies");
  }
  EstimatorConstantsCache cache;
  if (!flags.constants_cache.empty() &&
      std::filesystem::exists(flags.constants_cache)) {
    FPSKETCH_ASSIGN_OR_RETURN(std::string text,
                              ReadAll(flags.constants_cache, io.in));
    FPSKETCH_RETURN_IF_ERROR(cache.LoadCsv(text));
  }
  FPSKETCH_ASSIGN_OR_RETURN(
      double estimate, QuerySketch(sketch, {variant, flags.debias_exponent}, cache));
  if (!flags.constants_cache.empty()) {
    FPSKETCH_RETURN_IF_ERROR(WriteAll(flags.constants_cache, io.out, cache.ToCsv()));
  }
  const SketchConfig& config = sketch.config();
  Json result;
  result["estimate"] = estimate;
  result["estimator"] = EstimatorVariantName(variant);
  result["debias_exponent"] = flags.debias_exponent.value_or(config.p);
  result["p"] = config.p;
  result["r"] = config.r;
  result["q"] = config.q;
  result["items_seen"] = sketch.items_seen();
  result["non_private"] = config.non_private;
  if (flags.privacy_report) {
    FPSKETCH_ASSIGN_OR_RETURN(
        PrivacyReport report,
        MakePrivacyReport({*flags.n, *flags.report_m, *flags.report_max_value,
                           config.p},
                          config.q, config.r, mode));
    result["privacy"] = ReportJson(report);
  }
  io.out << result.dump() << "\n";
  return absl::OkStatus();
}

// --------------------------------------------------------------- privacy

struct PrivacyFlags {
  uint64_t n = uint64_t{1} << 15;
  uint64_t m = uint64_t{1} << 20;
  std::vector<uint64_t> max_values = {1, 32, 1024, 32768};
  uint64_t max_value = 1;
  double p = 1.0;
  std::optional<double> q;
  uint32_t r = 50;
  std::string amplification = "linear";
  std::optional<double> gamma;
  double eta = 0.05;
  double lambda = 0.05;
};

absl::Status EpsilonCommand(const PrivacyFlags& flags, Streams io) {
  FPSKETCH_ASSIGN_OR_RETURN(AmplificationMode mode,
                            ParseAmplificationMode(flags.amplification));
  if (flags.r == 0) return absl::InvalidArgumentError("r must be at least 1");
  const double q = flags.q.value_or(1.0 / flags.r);
  FPSKETCH_ASSIGN_OR_RETURN(
      PrivacyReport report,
      MakePrivacyReport({flags.n, flags.m, flags.max_value, flags.p}, q, flags.r,
                        mode));
  if (flags.gamma.has_value()) {
    FPSKETCH_ASSIGN_OR_RETURN(
        report.utility,
        ComputeUtilityBound(*flags.gamma, flags.eta, flags.lambda, q, flags.p));
  }
  Json json = ReportJson(report);
  json["n"] = flags.n;
  json["m"] = flags.m;
  json["M"] = flags.max_value;
  io.out << json.dump() << "\n";
  return absl::OkStatus();
}

absl::Status SensitivityCurve(const PrivacyFlags& flags, Streams io) {
  std::string csv = "M,p,rho\n";
  for (uint64_t max_value : flags.max_values) {
    for (int k = 1; k <= 100; ++k) {
      const double p = k / 100.0;
      FPSKETCH_ASSIGN_OR_RETURN(
          double rho, MultiplicativeSensitivity({flags.n, flags.m, max_value, p}));
      csv += Format("%llu,%.2f,%.15g\n", static_cast<unsigned long long>(max_value),
                    p, rho);
    }
  }
  io.out << csv;
  return absl::OkStatus();
}

// ------------------------------------------------------------- densities

struct DensityFlags {
  double p = 1.0;
  double zeta = 1.0;
  std::optional<double> rho;
  std::vector<double> xs;
  double x_min = 0.0;
  double x_max = 20.0;
  uint32_t points = 201;
  bool cdf = false;
  double tolerance = 1e-8;
  double max_frequency = std::numeric_limits<double>::infinity();
  int64_t max_subdivisions = 1'000'000;
};

QuadratureSettings SettingsFrom(const DensityFlags& flags) {
  QuadratureSettings settings;
  settings.tolerance = flags.tolerance;
  settings.max_frequency = flags.max_frequency;
  settings.max_subdivisions = flags.max_subdivisions;
  return settings;
}

absl::StatusOr<std::vector<double>> Grid(double lo, double hi, uint32_t points) {
  if (points < 1) return absl::InvalidArgumentError("--points must be at least 1");
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo <= hi)) {
    return absl::InvalidArgumentError("grid bounds must be finite with min <= max");
  }
  std::vector<double> xs(points, lo);
  for (uint32_t i = 1; i < points; ++i) {
    xs[i] = lo + (hi - lo) * i / (points - 1);
  }
  return xs;
}

absl::Status DensityCommand(const DensityFlags& flags, Streams io) {
  FPSKETCH_RETURN_IF_ERROR(ValidateQuadratureSettings(SettingsFrom(flags)));
  FPSKETCH_ASSIGN_OR_RETURN(StableParams params,
                            StableParams::Create(flags.p, flags.zeta));
  std::vector<double> xs = flags.xs;
  if (xs.empty()) {
    FPSKETCH_ASSIGN_OR_RETURN(xs, Grid(flags.x_min, flags.x_max, flags.points));
  }
  std::string csv = flags.cdf ? "x,cdf\n" : "x,density\n";
  for (double x : xs) {
    FPSKETCH_ASSIGN_OR_RETURN(
        double value, flags.cdf ? Cdf(params, x, SettingsFrom(flags))
                                : Density(params, x, SettingsFrom(flags)));
    csv += Format("%.10g,%.15g\n", x, value);
  }
  io.out << csv;
  return absl::OkStatus();
}

absl::Status RatioCurveCommand(const DensityFlags& flags, Streams io) {
  FPSKETCH_RETURN_IF_ERROR(ValidateQuadratureSettings(SettingsFrom(flags)));
  std::vector<double> xs = flags.xs;
  if (xs.empty()) {
    FPSKETCH_ASSIGN_OR_RETURN(xs, Grid(flags.x_min, flags.x_max, flags.points));
  }
  const double rho = flags.rho.value_or(std::exp2(flags.p));
  FPSKETCH_ASSIGN_OR_RETURN(
      std::vector<RatioPoint> curve,
      DensityRatioCurve(flags.p, rho, xs, SettingsFrom(flags)));
  io.out << FormatRatioCurveCsv(curve);
  return absl::OkStatus();
}

// ---------------------------------------------------------------- checks

struct CheckFlags {
  std::vector<double> as = {1.0};
  std::vector<double> ps = {0.25, 0.5, 0.75, 1.0};
  std::vector<double> rhos = {1.5, 2.0, 4.0};
  std::vector<double> oracle_ps = {0.1, 0.2, 0.3, 0.4, 0.5,
                                   0.6, 0.7, 0.8, 0.9, 1.0};
  uint32_t points = 200;
  double x_max = 20.0;
  double slack = 1e-6;
  double tolerance = 1e-8;
  uint64_t max_n = 5;
  uint64_t max_m = 3;
  uint64_t max_value = 3;
};

struct CheckOutcome {
  absl::Status status;
  bool passed = true;
};

CheckOutcome LaplaceCommand(const CheckFlags& flags, Streams io) {
  bool passed = true;
  QuadratureSettings settings;
  settings.tolerance = std::min(flags.tolerance, 1e-10);
  for (double a : flags.as) {
    absl::StatusOr<LaplaceCheck> check = LaplaceIdentityCheck(a, settings);
    if (!check.ok()) return {check.status(), false};
    const double error = std::abs(check->numeric - check->closed_form);
    const bool ok = error < kLaplaceTolerance;
    passed = passed && ok;
    io.out << Format("laplace a=%g numeric=%.12g closed_form=%.12g abs_error=%.3g %s\n",
                     a, check->numeric, check->closed_form, error,
                     ok ? "PASS" : "FAIL");
  }
  return {absl::OkStatus(), passed};
}

CheckOutcome RatioBoundsCommand(const CheckFlags& flags, Streams io) {
  absl::StatusOr<std::vector<double>> xs = Grid(0.0, flags.x_max, flags.points);
  if (!xs.ok()) return {xs.status(), false};
  QuadratureSettings settings;
  settings.tolerance = flags.tolerance;
  bool passed = true;
  for (double p : flags.ps) {
    if (!(p > 0.0 && p <= 1.0)) {
      return {absl::InvalidArgumentError(absl::StrCat(
                  "the ratio bounds hold only for 0 < p <= 1, got ", p)),
              false};
    }
    for (double rho : flags.rhos) {
      absl::StatusOr<std::vector<RatioPoint>> curve =
          DensityRatioCurve(p, rho, *xs, settings);
      if (!curve.ok()) return {curve.status(), false};
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const RatioPoint& point : *curve) {
        lo = std::min(lo, point.ratio);
        hi = std::max(hi, point.ratio);
      }
      const double lower = 1.0 / rho;
      const double upper = std::pow(rho, 1.0 / p);
      const bool ok = lo >= lower - flags.slack && hi <= upper + flags.slack;
      passed = passed && ok;
      io.out << Format(
          "ratio-bounds p=%g rho=%g min=%.12g max=%.12g lower=%.12g upper=%.12g %s\n",
          p, rho, lo, hi, lower, upper, ok ? "PASS" : "FAIL");
    }
  }
  return {absl::OkStatus(), passed};
}

CheckOutcome OracleCommand(const CheckFlags& flags, Streams io) {
  if (flags.max_m < 2) {
    return {absl::InvalidArgumentError("--max-m must be at least 2"), false};
  }
  uint64_t tuples = 0;
  double worst_margin = -std::numeric_limits<double>::infinity();
  std::string worst;
  bool passed = true;
  for (uint64_t n = 1; n <= flags.max_n; ++n) {
    for (uint64_t m = 2; m <= flags.max_m; ++m) {
      for (uint64_t max_value = 1; max_value <= flags.max_value; ++max_value) {
        for (double p : flags.oracle_ps) {
          absl::StatusOr<double> exact = BruteForceSensitivity(n, m, max_value, p);
          if (!exact.ok()) return {exact.status(), false};
          absl::StatusOr<double> formula =
              MultiplicativeSensitivity({n, m, max_value, p});
          if (!formula.ok()) return {formula.status(), false};
          const double margin = *exact - *formula;
          ++tuples;
          if (margin > 1e-9) passed = false;
          if (margin > worst_margin) {
            worst_margin = margin;
            worst = Format("n=%llu m=%llu M=%llu p=%g exact=%.12g formula=%.12g",
                           static_cast<unsigned long long>(n),
                           static_cast<unsigned long long>(m),
                           static_cast<unsigned long long>(max_value), p, *exact,
                           *formula);
          }
        }
      }
    }
  }
  io.out << Format("oracle tuples=%llu worst_margin=%.3g at %s %s\n",
                   static_cast<unsigned long long>(tuples), worst_margin,
                   worst.c_str(), passed ? "PASS" : "FAIL");
  return {absl::OkStatus(), passed};
}

// ----------------------------------------------------------------- bench

struct BenchFlags {
  std::string distribution = "uniform";
  uint64_t n = 10'000;
  uint64_t key_domain = 1000;
  uint64_t value = 1;
  double binomial_success = 0.5;
  double zipf_exponent = 1.1;
  std::vector<double> ps = {1.0};
  uint32_t r = 50;
  double q = 0.02;
  std::string estimator = "gm";
  std::optional<uint32_t> repetitions;
  uint64_t seed = 0;
  uint32_t threads = 0;
  std::string input;
  bool surrogate = false;
  uint64_t surrogate_n = 1'000'000;
  std::vector<std::string> figures = {"all"};
  std::string output_dir;
  uint64_t max_n = 10'000'000;
};

Json StatsJson(const TrialStats& stats) {
  Json json;
  json["median_error"] = stats.median_error;
  json["q25"] = stats.q25;
  json["q75"] = stats.q75;
  json["runs"] = stats.runs;
  return json;
}

absl::Status BenchSynthetic(const BenchFlags& flags, Streams io) {
  FPSKETCH_ASSIGN_OR_RETURN(EstimatorVariant variant,
                            ParseEstimatorVariant(flags.estimator));
  SyntheticSpec spec;
  FPSKETCH_ASSIGN_OR_RETURN(spec.distribution,
                            ParseKeyDistribution(flags.distribution));
  spec.n = flags.n;
  spec.key_domain = flags.key_domain;
  spec.value = flags.value;
  spec.binomial_success = flags.binomial_success;
  spec.zipf_exponent = flags.zipf_exponent;
  EstimatorConstantsCache cache;
  for (double p : flags.ps) {
    SketchConfig config;
    config.p = p;
    config.r = flags.r;
    config.q = flags.q;
    config.m = spec.key_domain;
    config.max_value = std::max<uint64_t>(spec.value, 1);
    config.non_private = p > 1.0;
    FPSKETCH_ASSIGN_OR_RETURN(
        TrialStats stats,
        RunSyntheticExperiment(spec, config, {variant, std::nullopt},
                               {flags.repetitions.value_or(100), flags.seed,
                                flags.threads},
                               cache));
    Json row;
    row["distribution"] = KeyDistributionName(spec.distribution);
    row["n"] = spec.n;
    row["p"] = p;
    row["r"] = flags.r;
    row["q"] = flags.q;
    row["estimator"] = EstimatorVariantName(variant);
    row.update(StatsJson(stats));
    io.out << row.dump() << "\n";
  }
  return absl::OkStatus();
}

absl::Status BenchReal(const BenchFlags& flags, Streams io) {
  FPSKETCH_ASSIGN_OR_RETURN(EstimatorVariant variant,
                            ParseEstimatorVariant(flags.estimator));
  std::vector<StreamItem> stream;
  std::string source;
  if (!flags.input.empty()) {
    FPSKETCH_ASSIGN_OR_RETURN(stream, LoadStream(flags.input, io.in));
    source = flags.input;
  } else if (flags.surrogate) {
    FPSKETCH_ASSIGN_OR_RETURN(
        stream, GenerateSyntheticStream(ZipfSurrogateSpec(flags.surrogate_n),
                                        HashCombine(flags.seed, 0)));
    source = "surrogate";
  } else {
    return absl::InvalidArgumentError("bench real needs --input or --surrogate");
  }
  if (stream.empty()) return absl::DataLossError("the dataset holds no items");
  uint64_t max_key = 2;
  uint64_t max_value = 1;
  for (const StreamItem& item : stream) {
    if (item.key < 1 || item.value < 1) {
      return absl::DataLossError("dataset keys and values must be >= 1");
    }
    max_key = std::max(max_key, item.key);
    max_value = std::max(max_value, item.value);
  }
  EstimatorConstantsCache cache;
  for (double p : flags.ps) {
    SketchConfig config;
    config.p = p;
    config.r = flags.r;
    config.q = flags.q;
    config.m = max_key;
    config.max_value = max_value;
    config.non_private = p > 1.0;
    FPSKETCH_ASSIGN_OR_RETURN(
        TrialStats stats,
        RunStreamExperiment(stream, config, {variant, std::nullopt},
                            {flags.repetitions.value_or(5), flags.seed,
                             flags.threads},
                            cache));
    Json row;
    row["source"] = source;
    row["n"] = stream.size();
    row["m"] = max_key;
    row["M"] = max_value;
    row["p"] = p;
    row["r"] = flags.r;
    row["q"] = flags.q;
    row["estimator"] = EstimatorVariantName(variant);
    row.update(StatsJson(stats));
    io.out << row.dump() << "\n";
  }
  return absl::OkStatus();
}

absl::Status BenchFigures(const BenchFlags& flags, Streams io) {
  FigureOptions options;
  options.seed = flags.seed;
  options.repetitions = flags.repetitions.value_or(0);
  options.threads = flags.threads;
  options.max_n = flags.max_n;
  options.dataset_path = flags.input;
  options.use_surrogate = flags.surrogate;
  options.surrogate_n = flags.surrogate_n;
  FPSKETCH_ASSIGN_OR_RETURN(options.estimator,
                            ParseEstimatorVariant(flags.estimator));
  std::vector<FigureId> ids;
  for (const std::string& name : flags.figures) {
    if (name == "all") {
      for (FigureId id : {FigureId::kSensitivity, FigureId::kRatio,
                          FigureId::kEpsilon, FigureId::kRatioExploratory,
                          FigureId::kSynthetic}) {
        ids.push_back(id);
      }
      if (!flags.input.empty() || flags.surrogate) ids.push_back(FigureId::kRealData);
    } else {
      FPSKETCH_ASSIGN_OR_RETURN(FigureId id, ParseFigureId(name));
      ids.push_back(id);
    }
  }
  for (FigureId id : ids) {
    absl::StatusOr<std::string> csv = EmitFigureData(id, options);
    if (!csv.ok()) {
      return id == FigureId::kRealData ? AsDataError(csv.status()) : csv.status();
    }
    if (flags.output_dir.empty()) {
      io.out << *csv;
    } else {
      const std::filesystem::path path =
          std::filesystem::path(flags.output_dir) / (FigureIdName(id) + ".csv");
      FPSKETCH_RETURN_IF_ERROR(WriteAll(path.string(), io.out, *csv));
    }
  }
  return absl::OkStatus();
}

// ------------------------------------------------------------- dispatch

void AddSketchShape(CLI::App& app, SketchFlags& flags) {
  app.add_option("--p", flags.p, "moment order p; (0, 1] unless --non-private");
  app.add_option("--r", flags.r, "sketch width (number of rows)");
  app.add_option("--q", flags.q, "per-row keep probability, in (0, 1]");
  app.add_option("--seed", flags.seed, "seed of the projection and coins");
  app.add_option("--m", flags.m, "key domain size; keys lie in [1, m]");
  app.add_option("--M", flags.max_value, "largest item value");
  app.add_flag("--non-private", flags.non_private,
               "allow p in (1, 2]; marks the sketch as carrying no privacy");
  app.add_flag("--per-item-subsample", flags.per_item,
               "one coin per item for all rows instead of one per row");
  app.add_option("--stream-offset", flags.stream_offset,
                 "global index of the first item of this stream partition");
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::istream& in,
           std::ostream& out, std::ostream& err) {
  CLI::App app("fpsketch: private F_p sketches, privacy accounting and benchmarks",
               "fpsketch");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "print help for every command");
  std::string log_path;
  app.add_option("--log", log_path,
                 "append the JSON run log to this file instead of standard error");

  // sketch
  SketchFlags sketch_flags;
  CLI::App* sketch = app.add_subcommand("sketch", "build, update, merge and query sketches");
  sketch->require_subcommand(1);
  CLI::App* build = sketch->add_subcommand("build", "sketch a key,value CSV stream");
  AddSketchShape(*build, sketch_flags);
  build->add_option("--input,-i", sketch_flags.input, "CSV stream, '-' for stdin");
  build->add_option("--output,-o", sketch_flags.output, "sketch file, '-' for stdout");
  CLI::App* update = sketch->add_subcommand("update", "add a CSV stream to a sketch");
  update->add_option("sketch", sketch_flags.sketch_path, "sketch file, '-' for stdin");
  update->add_option("--input,-i", sketch_flags.input, "CSV stream, '-' for stdin");
  update->add_option("--output,-o", sketch_flags.output, "sketch file, '-' for stdout");
  CLI::App* merge = sketch->add_subcommand("merge", "add sketches with equal configs");
  merge->add_option("sketches", sketch_flags.merge_inputs, "two or more sketch files")
      ->required();
  merge->add_option("--output,-o", sketch_flags.output, "sketch file, '-' for stdout");
  CLI::App* query = sketch->add_subcommand("query", "estimate F_p from a sketch");
  query->add_option("sketch", sketch_flags.sketch_path, "sketch file, '-' for stdin");
  query->add_option("--estimator", sketch_flags.estimator, "median, gm or hm");
  query->add_option("--debias-exponent", sketch_flags.debias_exponent,
                    "divide by q^e instead of q^p");
  query->add_flag("--privacy-report", sketch_flags.privacy_report,
                  "attach the privacy report; needs --n, --m and --M");
  query->add_option("--n", sketch_flags.n, "public bound on the stream length");
  query->add_option("--m", sketch_flags.report_m, "public key domain size");
  query->add_option("--M", sketch_flags.report_max_value, "public largest value");
  query->add_option("--amplification", sketch_flags.amplification,
                    "linear or standard subsampling accounting");
  query->add_option("--constants-cache", sketch_flags.constants_cache,
                    "CSV file of estimator constants, read if present and rewritten");

  // privacy
  PrivacyFlags privacy_flags;
  CLI::App* epsilon = app.add_subcommand("epsilon", "privacy report as a JSON line");
  epsilon->add_option("--n", privacy_flags.n, "stream length");
  epsilon->add_option("--m", privacy_flags.m, "key domain size");
  epsilon->add_option("--M", privacy_flags.max_value, "largest item value");
  epsilon->add_option("--p", privacy_flags.p, "moment order in (0, 1]");
  epsilon->add_option("--q", privacy_flags.q, "keep probability; defaults to 1/r");
  epsilon->add_option("--r", privacy_flags.r, "sketch width");
  epsilon->add_option("--amplification", privacy_flags.amplification,
                      "linear or standard subsampling accounting");
  epsilon->add_option("--gamma", privacy_flags.gamma,
                      "add the utility bound for a (gamma, eta) accurate estimator");
  epsilon->add_option("--eta", privacy_flags.eta, "failure probability of the estimator");
  epsilon->add_option("--lambda", privacy_flags.lambda, "extra failure probability");
  CLI::App* sensitivity =
      app.add_subcommand("sensitivity-curve", "CSV M,p,rho over p = 0.01..1");
  sensitivity->add_option("--n", privacy_flags.n, "stream length");
  sensitivity->add_option("--m", privacy_flags.m, "key domain size");
  sensitivity->add_option("--M", privacy_flags.max_values, "largest values, one curve each")
      ->delimiter(',');

  // densities
  DensityFlags density_flags;
  CLI::App* density = app.add_subcommand("density", "CSV of the stable density or CDF");
  CLI::App* ratio = app.add_subcommand(
      "ratio-curve", "CSV x,ratio of D_{p,1}(x) / D_{p,rho}(x)");
  for (CLI::App* sub : {density, ratio}) {
    sub->add_option("--p", density_flags.p, "stability index in (0, 2]");
    sub->add_option("--x", density_flags.xs, "evaluation points; overrides the grid")
        ->delimiter(',');
    sub->add_option("--x-min", density_flags.x_min, "grid start");
    sub->add_option("--x-max", density_flags.x_max, "grid end");
    sub->add_option("--points", density_flags.points, "grid size");
    sub->add_option("--tolerance", density_flags.tolerance, "absolute quadrature tolerance");
    sub->add_option("--max-frequency", density_flags.max_frequency,
                    "cap on the Fourier truncation point");
    sub->add_option("--max-subdivisions", density_flags.max_subdivisions,
                    "quadrature work budget per value");
  }
  density->add_option("--zeta", density_flags.zeta, "scale parameter");
  density->add_flag("--cdf", density_flags.cdf, "print P(X <= x) instead of the density");
  ratio->add_option("--rho", density_flags.rho, "scale ratio; defaults to 2^p");

  // checks
  CheckFlags check_flags;
  CLI::App* check = app.add_subcommand("check", "numerical self-checks");
  check->require_subcommand(1);
  CLI::App* laplace = check->add_subcommand("laplace", "quadrature against a closed form");
  laplace->add_option("--a", check_flags.as, "values of a")->delimiter(',');
  laplace->add_option("--tolerance", check_flags.tolerance, "quadrature tolerance");
  CLI::App* bounds =
      check->add_subcommand("ratio-bounds", "density ratios within [1/rho, rho^(1/p)]");
  bounds->add_option("--p", check_flags.ps, "moment orders in (0, 1]")->delimiter(',');
  bounds->add_option("--rho", check_flags.rhos, "scale ratios")->delimiter(',');
  bounds->add_option("--points", check_flags.points, "grid size on [0, x-max]");
  bounds->add_option("--x-max", check_flags.x_max, "grid end");
  bounds->add_option("--slack", check_flags.slack, "allowed excess over the bounds");
  bounds->add_option("--tolerance", check_flags.tolerance, "quadrature tolerance");
  CLI::App* oracle = check->add_subcommand(
      "oracle", "exhaustive sensitivity on tiny domains against the formula");
  oracle->add_option("--max-n", check_flags.max_n, "largest stream length");
  oracle->add_option("--max-m", check_flags.max_m, "largest key domain");
  oracle->add_option("--max-M", check_flags.max_value, "largest item value");
  oracle->add_option("--p", check_flags.oracle_ps, "moment orders")->delimiter(',');

  // bench
  BenchFlags bench_flags;
  CLI::App* bench = app.add_subcommand("bench", "accuracy experiments");
  bench->require_subcommand(1);
  CLI::App* synthetic = bench->add_subcommand("synthetic", "synthetic stream experiment");
  CLI::App* real = bench->add_subcommand("real", "experiment on a key,value dataset");
  CLI::App* figures = bench->add_subcommand("figures", "emit figure CSV data");
  for (CLI::App* sub : {synthetic, real, figures}) {
    sub->add_option("--estimator", bench_flags.estimator, "median, gm or hm");
    sub->add_option("--repetitions", bench_flags.repetitions,
                    "runs per point; defaults to 100 synthetic, 5 real");
    sub->add_option("--seed", bench_flags.seed, "experiment seed");
    sub->add_option("--threads", bench_flags.threads, "worker threads, 0 for all cores");
  }
  for (CLI::App* sub : {synthetic, real}) {
    sub->add_option("--p", bench_flags.ps, "moment orders")->delimiter(',');
    sub->add_option("--r", bench_flags.r, "sketch width");
    sub->add_option("--q", bench_flags.q, "per-row keep probability");
  }
  synthetic->add_option("--distribution", bench_flags.distribution,
                        "uniform, binomial or zipf");
  synthetic->add_option("--n", bench_flags.n, "stream length");
  synthetic->add_option("--key-domain", bench_flags.key_domain, "number of keys");
  synthetic->add_option("--value", bench_flags.value, "value of every item");
  synthetic->add_option("--binomial-success", bench_flags.binomial_success,
                        "success probability of the binomial key law");
  synthetic->add_option("--zipf-exponent", bench_flags.zipf_exponent,
                        "exponent of the Zipf key law");
  for (CLI::App* sub : {real, figures}) {
    sub->add_option("--input,-i", bench_flags.input, "key,value CSV dataset");
    sub->add_flag("--surrogate", bench_flags.surrogate,
                  "use the Zipf surrogate when no dataset is given");
    sub->add_option("--surrogate-n", bench_flags.surrogate_n, "surrogate stream length");
  }
  figures->add_option("--figure", bench_flags.figures,
                      "figure ids, or 'all' (the dataset figure only with data)")
      ->delimiter(',');
  figures->add_option("--output-dir", bench_flags.output_dir,
                      "write <figure>.csv files here instead of stdout");
  figures->add_option("--max-n", bench_flags.max_n, "skip longer synthetic streams");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ConversionError& e) {
    err << "fpsketch: error: " << e.what() << "\n";
    return kExitInvalidArgument;
  } catch (const CLI::ValidationError& e) {
    err << "fpsketch: error: " << e.what() << "\n";
    return kExitInvalidArgument;
  } catch (const CLI::ParseError& e) {
    err << "fpsketch: error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::ofstream log_file;
  if (!log_path.empty()) {
    log_file.open(log_path, std::ios::app);
    if (!log_file) {
      err << "fpsketch: error: cannot open log file " << log_path << "\n";
      return kExitIo;
    }
  }
  std::ostream& log = log_path.empty() ? err : log_file;
  log << ResolvedConfig(app).dump() << "\n";
  log.flush();

  Streams io{in, out, log};
  absl::Status status;
  bool check_passed = true;
  try {
    if (build->parsed()) {
      status = SketchBuild(sketch_flags, io);
    } else if (update->parsed()) {
      status = SketchUpdate(sketch_flags, io);
    } else if (merge->parsed()) {
      status = SketchMerge(sketch_flags, io);
    } else if (query->parsed()) {
      status = SketchQuery(sketch_flags, io);
    } else if (epsilon->parsed()) {
      status = EpsilonCommand(privacy_flags, io);
    } else if (sensitivity->parsed()) {
      status = SensitivityCurve(privacy_flags, io);
    } else if (density->parsed()) {
      status = DensityCommand(density_flags, io);
    } else if (ratio->parsed()) {
      status = RatioCurveCommand(density_flags, io);
    } else if (synthetic->parsed()) {
      status = BenchSynthetic(bench_flags, io);
    } else if (real->parsed()) {
      status = BenchReal(bench_flags, io);
    } else if (figures->parsed()) {
      status = BenchFigures(bench_flags, io);
    } else {
      CheckOutcome outcome;
      if (laplace->parsed()) outcome = LaplaceCommand(check_flags, io);
      if (bounds->parsed()) outcome = RatioBoundsCommand(check_flags, io);
      if (oracle->parsed()) outcome = OracleCommand(check_flags, io);
      status = outcome.status;
      check_passed = outcome.passed;
    }
  } catch (const std::exception& e) {
    status = absl::InternalError(e.what());
  }
  out.flush();
  if (!status.ok()) {
    err << "fpsketch: error: " << status.message() << "\n";
    if (!log_path.empty()) {
      log << Json{{"event", "error"}, {"message", std::string(status.message())}}.dump()
          << "\n";
    }
    return ExitCodeFor(status);
  }
  if (!check_passed) {
    err << "fpsketch: check failed\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace fpsketch::cli
