// Copyright 2026 The ABLQ Accounting Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ablq/batch_sampler.h"
#include "ablq/calibration.h"
#include "ablq/dpsgd.h"
#include "ablq/errors.h"
#include "ablq/gaussian_mechanism.h"
#include "ablq/poisson_accounting.h"
#include "ablq/sampler_config.h"

namespace py = pybind11;

namespace ablq {
namespace {

py::object& ErrorType() {
  static py::object* type = nullptr;
  if (type == nullptr) type = new py::object();
  return *type;
}

[[noreturn]] void Raise(const absl::Status& status) {
  py::object error = ErrorType()(ErrorName(status),
                                 std::string(status.message()));
  PyErr_SetObject(ErrorType().ptr(), error.ptr());
  throw py::error_already_set();
}

template <typename T>
T Unwrap(absl::StatusOr<T> value) {
  if (!value.ok()) Raise(value.status());
  return *std::move(value);
}

SamplerConfig MakeConfig(const std::string& sampler, int64_t n, int64_t b,
                         int64_t steps, std::optional<int64_t> max_batch) {
  SamplerConfig config{Unwrap(ParseSamplerKind(sampler)), n, b, max_batch,
                       steps};
  if (absl::Status s = ValidateConfig(config); !s.ok()) Raise(s);
  return config;
}

PldOptions Pld(double grid_step) {
  PldOptions options;
  options.grid_step = grid_step;
  return options;
}

py::dict Delta(const std::string& sampler, int64_t n, int64_t b,
               int64_t steps, double sigma, double epsilon,
               std::optional<int64_t> max_batch_size, double grid_step) {
  const SamplerConfig config = MakeConfig(sampler, n, b, steps, max_batch_size);
  absl::StatusOr<DeltaResult> computed;
  {
    py::gil_scoped_release release;
    computed = ComputeDelta(config, sigma, epsilon, Pld(grid_step));
  }
  const DeltaResult r = Unwrap(std::move(computed));
  py::dict out;
  out["delta"] = r.delta;
  out["bound"] = std::string(BoundKindName(r.bound));
  return out;
}

py::dict Epsilon(const std::string& sampler, int64_t n, int64_t b,
                 int64_t steps, double sigma, double delta,
                 std::optional<int64_t> max_batch_size, double grid_step) {
  const SamplerConfig config = MakeConfig(sampler, n, b, steps, max_batch_size);
  CalibrationOptions options;
  options.pld = Pld(grid_step);
  absl::StatusOr<EpsilonResult> computed;
  {
    py::gil_scoped_release release;
    computed = EpsilonAtDelta(config, sigma, delta, options);
  }
  const EpsilonResult r = Unwrap(std::move(computed));
  py::dict out;
  out["epsilon"] = r.epsilon;
  out["bound"] = std::string(BoundKindName(r.bound));
  return out;
}

py::dict Calibrate(const std::string& sampler, int64_t n, int64_t b,
                   int64_t steps, double epsilon, double delta,
                   std::optional<int64_t> max_batch_size, double grid_step,
                   double rel_tol) {
  const SamplerConfig config = MakeConfig(sampler, n, b, steps, max_batch_size);
  CalibrationOptions options;
  options.pld = Pld(grid_step);
  options.rel_tol = rel_tol;
  absl::StatusOr<SigmaResult> computed;
  {
    py::gil_scoped_release release;
    computed = CalibrateSigma(config, epsilon, delta, options);
  }
  const SigmaResult r = Unwrap(std::move(computed));
  py::dict out;
  out["sigma"] = r.sigma;
  out["bound"] = std::string(BoundKindName(r.bound));
  out["optimistic"] = r.optimistic;
  out["bracket_failure"] = r.bracket_failure;
  return out;
}

std::string SweepCsv(const std::string& axis, const std::vector<double>& values,
                     int64_t n, int64_t b, int64_t epochs, double epsilon,
                     double delta, const std::vector<std::string>& samplers,
                     double grid_step, int threads) {
  SweepScenario scenario;
  scenario.dataset_size = n;
  scenario.batch_size = b;
  scenario.epochs = epochs;
  scenario.epsilon = epsilon;
  scenario.delta = delta;
  scenario.threads = threads;
  scenario.calibration.pld = Pld(grid_step);
  scenario.samplers.clear();
  for (const std::string& name : samplers) {
    scenario.samplers.push_back(Unwrap(ParseSamplerKind(name)));
  }
  const SweepAxis parsed = Unwrap(ParseSweepAxis(axis));
  absl::StatusOr<std::vector<CurvePoint>> computed;
  {
    py::gil_scoped_release release;
    computed = Sweep(parsed, values, scenario);
  }
  const std::vector<CurvePoint> points = Unwrap(std::move(computed));
  std::ostringstream csv;
  WriteCurveCsv(points, csv);
  return csv.str();
}

std::vector<std::vector<std::pair<int64_t, double>>> ToLists(
    const BatchManifest& manifest) {
  std::vector<std::vector<std::pair<int64_t, double>>> out;
  out.reserve(manifest.batches.size());
  for (const auto& batch : manifest.batches) {
    auto& row = out.emplace_back();
    row.reserve(batch.size());
    for (const WeightedEntry& e : batch) row.emplace_back(e.record_id, e.weight);
  }
  return out;
}

py::dict Sample(const std::string& kind_name, int64_t n, int64_t b,
                int64_t steps, uint64_t seed,
                std::optional<int64_t> max_batch_size, int shards) {
  const SamplerKind kind = Unwrap(ParseSamplerKind(kind_name));
  if (kind == SamplerKind::kTruncatedPoisson && !max_batch_size.has_value()) {
    Raise(MakeError(ErrorKind::kInvalidConfig,
                    "poisson sampling needs max_batch_size"));
  }
  absl::StatusOr<BatchManifest> computed;
  {
    py::gil_scoped_release release;
    if (kind == SamplerKind::kTruncatedPoisson) {
      SamplerOptions options;
      options.shards = shards;
      computed = GenerateTruncatedPoisson(n, b, *max_batch_size, steps, seed,
                                          options);
    } else {
      computed = GeneratePermutation(kind, n, b, steps, seed);
    }
  }
  const BatchManifest manifest = Unwrap(std::move(computed));
  std::ostringstream text;
  if (absl::Status s = WriteManifest(manifest, text); !s.ok()) Raise(s);
  py::dict out;
  out["batches"] = ToLists(manifest);
  out["pre_truncation_sizes"] = manifest.pre_truncation_sizes;
  out["manifest"] = text.str();
  return out;
}

py::dict Simulate(const std::string& manifest_text, double sigma,
                  double clip_norm, double learning_rate, bool cosine_decay,
                  uint64_t seed, int dimension, double separation,
                  uint64_t data_seed) {
  std::istringstream in(manifest_text);
  const BatchManifest manifest = Unwrap(ReadManifest(in));
  SyntheticOptions synthetic;
  synthetic.size = manifest.header.dataset_size;
  synthetic.dimension = dimension;
  synthetic.separation = separation;
  synthetic.seed = data_seed;
  const Dataset dataset = Unwrap(MakeSyntheticDataset(synthetic));
  TrainConfig config;
  config.sigma = sigma;
  config.clip_norm = clip_norm;
  config.learning_rate = learning_rate;
  config.cosine_decay = cosine_decay;
  config.seed = seed;
  config.target_batch_size = manifest.header.batch_size;
  config.steps = manifest.header.steps;
  absl::StatusOr<TrainResult> computed;
  {
    py::gil_scoped_release release;
    computed = Train(dataset, manifest, config);
  }
  const TrainResult result = Unwrap(std::move(computed));
  py::dict out;
  out["weights"] = result.weights;
  out["loss_trace"] = result.loss_trace;
  out["final_accuracy"] = result.final_accuracy;
  return out;
}

}  // namespace
}  // namespace ablq

PYBIND11_MODULE(_core, m) {
  using namespace ablq;
  m.doc() = "Privacy accounting for ABLQ batch samplers.";
  m.attr("__version__") = kToolVersion;

  py::object base = py::module_::import("ablq_accounting._errors")
                        .attr("AccountingError");
  ErrorType() = base;

  m.def("gaussian_delta", &GaussianDelta, py::arg("sigma_eff"),
        py::arg("epsilon"));
  m.def("binomial_tail", &BinomialTail, py::arg("n"), py::arg("p"),
        py::arg("max_batch_size"));
  m.def(
      "choose_max_batch",
      [](int64_t n, int64_t b, int64_t steps, double epsilon, double delta,
         double budget_fraction) {
        return Unwrap(
            ChooseMaxBatch(n, b, steps, epsilon, delta, budget_fraction));
      },
      py::arg("n"), py::arg("b"), py::arg("steps"), py::arg("epsilon"),
      py::arg("delta"),
      py::arg("budget_fraction") = kDefaultTruncationBudgetFraction);
  m.def("delta", &Delta, py::arg("sampler"), py::arg("n"), py::arg("b"),
        py::arg("steps"), py::arg("sigma"), py::arg("epsilon"),
        py::arg("max_batch_size") = py::none(), py::arg("grid_step") = 1e-4);
  m.def("epsilon", &Epsilon, py::arg("sampler"), py::arg("n"), py::arg("b"),
        py::arg("steps"), py::arg("sigma"), py::arg("delta") = 2.7e-8,
        py::arg("max_batch_size") = py::none(), py::arg("grid_step") = 1e-4);
  m.def("calibrate_sigma", &Calibrate, py::arg("sampler"), py::arg("n"),
        py::arg("b"), py::arg("steps"), py::arg("epsilon"),
        py::arg("delta") = 2.7e-8, py::arg("max_batch_size") = py::none(),
        py::arg("grid_step") = 1e-4, py::arg("rel_tol") = 1e-4);
  m.def("sweep_csv", &SweepCsv, py::arg("axis"), py::arg("values"),
        py::arg("n") = int64_t{1} << 20, py::arg("b") = int64_t{1} << 16,
        py::arg("epochs") = 1, py::arg("epsilon") = 5.0,
        py::arg("delta") = 2.7e-8,
        py::arg("samplers") =
            std::vector<std::string>{"deterministic", "poisson",
                                     "shuffle-persistent", "shuffle-dynamic"},
        py::arg("grid_step") = 1e-4, py::arg("threads") = 0);
  m.def("sample", &Sample, py::arg("kind"), py::arg("n"), py::arg("b"),
        py::arg("steps"), py::arg("seed") = 0,
        py::arg("max_batch_size") = py::none(), py::arg("shards") = 1);
  m.def("simulate", &Simulate, py::arg("manifest"), py::arg("sigma") = 1.0,
        py::arg("clip_norm") = 1.0, py::arg("learning_rate") = 0.5,
        py::arg("cosine_decay") = false, py::arg("seed") = 0,
        py::arg("dimension") = 20, py::arg("separation") = 4.0,
        py::arg("data_seed") = 0);
}
