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

#include "ablq/cli.h"

#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "ablq/batch_sampler.h"
#include "ablq/calibration.h"
#include "ablq/dpsgd.h"
#include "ablq/errors.h"
#include "ablq/poisson_accounting.h"
#include "ablq/sampler_config.h"

namespace ablq {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr double kDefaultDelta = 2.7e-8;

std::string Num(double value) { return absl::StrFormat("%.8e", value); }

struct SamplerFlags {
  std::string sampler = "deterministic";
  int64_t n = 0;
  int64_t b = 0;
  std::optional<int64_t> max_batch_size;
  int64_t steps = 0;
};

void AddSamplerFlags(CLI::App* cmd, SamplerFlags& f) {
  cmd->add_option("--sampler", f.sampler,
                  "deterministic | poisson | shuffle-persistent | "
                  "shuffle-dynamic")
      ->default_val("deterministic");
  cmd->add_option("--n", f.n, "dataset size")->required();
  cmd->add_option("--b", f.b, "(expected) batch size")->required();
  cmd->add_option("--max-batch-size", f.max_batch_size,
                  "B for poisson; omit for untruncated Poisson");
  cmd->add_option("--steps", f.steps, "number of steps T")->required();
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  // Reports a failed status and returns the matching exit code.
  int Fail(const absl::Status& status) {
    err_ << "error: " << ErrorName(status) << ": " << status.message() << "\n";
    if (IsError(status, ErrorKind::kInvalidConfig) ||
        IsError(status, ErrorKind::kInvalidArgument) ||
        IsError(status, ErrorKind::kParseError)) {
      err_ << "run with --help for usage\n";
      return kExitUsage;
    }
    return kExitFailure;
  }

  absl::StatusOr<SamplerConfig> Config(const SamplerFlags& f) {
    auto kind = ParseSamplerKind(f.sampler);
    if (!kind.ok()) return kind.status();
    SamplerConfig config{*kind, f.n, f.b, std::nullopt, f.steps};
    if (*kind == SamplerKind::kTruncatedPoisson) {
      config.max_batch_size = f.max_batch_size;
    } else if (f.max_batch_size.has_value()) {
      return MakeError(ErrorKind::kInvalidConfig,
                       "--max-batch-size only applies to --sampler poisson");
    }
    if (absl::Status s = ValidateConfig(config); !s.ok()) return s;
    return config;
  }

  // Applies ABLQ_GRID_STEP when set.
  absl::Status GridStep(PldOptions& pld) {
    const char* env = std::getenv("ABLQ_GRID_STEP");
    if (env == nullptr || *env == '\0') return absl::OkStatus();
    double step = 0.0;
    if (!absl::SimpleAtod(env, &step) || !(step > 0.0)) {
      return MakeError(ErrorKind::kInvalidArgument,
                       absl::StrCat("ABLQ_GRID_STEP='", env,
                                    "' is not a positive number"));
    }
    pld.grid_step = step;
    return absl::OkStatus();
  }

  std::ostream& out() { return out_; }

 private:
  std::ostream& out_;
  std::ostream& err_;
};

std::vector<double> ParseValues(const std::string& text, bool* ok) {
  std::vector<double> values;
  *ok = true;
  for (absl::string_view item : absl::StrSplit(text, ',', absl::SkipEmpty())) {
    double v = 0.0;
    if (!absl::SimpleAtod(item, &v)) {
      *ok = false;
      return {};
    }
    values.push_back(v);
  }
  if (values.empty()) *ok = false;
  return values;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Privacy accounting for ABLQ batch samplers", "ablq"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  Runner runner(out, err);

  // delta
  SamplerFlags delta_flags;
  double delta_sigma = 0.0;
  double delta_epsilon = 0.0;
  CLI::App* delta_cmd = app.add_subcommand("delta", "delta(epsilon) at sigma");
  AddSamplerFlags(delta_cmd, delta_flags);
  delta_cmd->add_option("--sigma", delta_sigma, "noise multiplier")->required();
  delta_cmd->add_option("--epsilon", delta_epsilon, "epsilon (nats)")
      ->required();

  // epsilon
  SamplerFlags eps_flags;
  double eps_sigma = 0.0;
  double eps_delta = kDefaultDelta;
  CLI::App* eps_cmd = app.add_subcommand("epsilon", "epsilon at fixed delta");
  AddSamplerFlags(eps_cmd, eps_flags);
  eps_cmd->add_option("--sigma", eps_sigma, "noise multiplier")->required();
  eps_cmd->add_option("--delta", eps_delta, "target delta")
      ->default_val(kDefaultDelta);

  // calibrate-sigma
  SamplerFlags cal_flags;
  double cal_epsilon = 0.0;
  double cal_delta = kDefaultDelta;
  double cal_rel_tol = 1e-4;
  CLI::App* cal_cmd = app.add_subcommand(
      "calibrate-sigma", "smallest sigma meeting (epsilon, delta)");
  AddSamplerFlags(cal_cmd, cal_flags);
  cal_cmd->add_option("--epsilon", cal_epsilon, "epsilon (nats)")->required();
  cal_cmd->add_option("--delta", cal_delta, "target delta")
      ->default_val(kDefaultDelta);
  cal_cmd->add_option("--rel-tol", cal_rel_tol, "relative bracket width")
      ->default_val(1e-4);

  // choose-max-batch
  int64_t cmb_n = 0, cmb_b = 0, cmb_steps = 0;
  double cmb_epsilon = 0.0, cmb_delta = kDefaultDelta;
  double cmb_fraction = kDefaultTruncationBudgetFraction;
  CLI::App* cmb_cmd = app.add_subcommand(
      "choose-max-batch", "smallest B whose truncation term fits the budget");
  cmb_cmd->add_option("--n", cmb_n, "dataset size")->required();
  cmb_cmd->add_option("--b", cmb_b, "expected batch size")->required();
  cmb_cmd->add_option("--steps", cmb_steps, "number of steps T")->required();
  cmb_cmd->add_option("--epsilon", cmb_epsilon, "epsilon (nats)")->required();
  cmb_cmd->add_option("--delta", cmb_delta, "target delta")
      ->default_val(kDefaultDelta);
  cmb_cmd->add_option("--budget-fraction", cmb_fraction,
                      "fraction of delta reserved for truncation")
      ->default_val(kDefaultTruncationBudgetFraction);

  // sweep
  std::string sweep_axis;
  std::string sweep_values;
  std::string sweep_samplers =
      "deterministic,poisson,shuffle-persistent,shuffle-dynamic";
  SweepScenario scenario;
  std::string sweep_out;
  std::string sweep_json;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "calibrated sigma across one axis");
  sweep_cmd->add_option("--axis", sweep_axis, "batch-size | epsilon | epochs")
      ->required()
      ->check(CLI::IsMember({"batch-size", "epsilon", "epochs"}));
  sweep_cmd->add_option("--values", sweep_values, "comma-separated values")
      ->required();
  sweep_cmd->add_option("--n", scenario.dataset_size, "dataset size")
      ->default_val(int64_t{1} << 20);
  sweep_cmd->add_option("--b", scenario.batch_size, "batch size")
      ->default_val(int64_t{1} << 16);
  sweep_cmd->add_option("--epochs", scenario.epochs, "epochs E")
      ->default_val(1);
  sweep_cmd->add_option("--epsilon", scenario.epsilon, "epsilon (nats)")
      ->default_val(5.0);
  sweep_cmd->add_option("--delta", scenario.delta, "target delta")
      ->default_val(kDefaultDelta);
  sweep_cmd->add_option("--samplers", sweep_samplers,
                        "comma-separated sampler list")
      ->default_val(sweep_samplers);
  sweep_cmd->add_option("--threads", scenario.threads, "worker threads")
      ->default_val(0);
  sweep_cmd->add_option("--out", sweep_out, "CSV path (default stdout)");
  sweep_cmd->add_option("--json", sweep_json, "JSON mirror path");

  // sample
  std::string sample_kind = "poisson";
  int64_t sample_n = 0, sample_b = 0, sample_steps = 0;
  std::optional<int64_t> sample_max;
  uint64_t sample_seed = 0;
  int sample_shards = 1;
  std::string sample_out;
  CLI::App* sample_cmd = app.add_subcommand("sample", "write a batch manifest");
  sample_cmd->add_option("--kind", sample_kind,
                         "poisson | deterministic | shuffle-persistent | "
                         "shuffle-dynamic")
      ->default_val("poisson");
  sample_cmd->add_option("--n", sample_n, "dataset size")->required();
  sample_cmd->add_option("--b", sample_b, "(expected) batch size")->required();
  sample_cmd->add_option("--max-batch-size", sample_max, "B (poisson)");
  sample_cmd->add_option("--steps", sample_steps, "number of steps T")
      ->required();
  sample_cmd->add_option("--seed", sample_seed, "64-bit seed")->default_val(0);
  sample_cmd->add_option("--shards", sample_shards, "record shards")
      ->default_val(1)
      ->check(CLI::PositiveNumber);
  sample_cmd->add_option("--out", sample_out, "manifest path")->required();

  // simulate
  std::string sim_manifest;
  std::string sim_report;
  TrainConfig train;
  SyntheticOptions synthetic;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "DP-SGD on synthetic data");
  sim_cmd->add_option("--manifest", sim_manifest, "manifest path")->required();
  sim_cmd->add_option("--sigma", train.sigma, "noise multiplier")
      ->default_val(1.0);
  sim_cmd->add_option("--clip", train.clip_norm, "clip norm C")
      ->default_val(1.0);
  sim_cmd->add_option("--lr", train.learning_rate, "learning rate")
      ->default_val(0.5);
  sim_cmd->add_flag("--cosine", train.cosine_decay, "cosine learning rate");
  sim_cmd->add_option("--seed", train.seed, "noise seed")->default_val(0);
  sim_cmd->add_option("--dim", synthetic.dimension, "feature dimension")
      ->default_val(20);
  sim_cmd->add_option("--separation", synthetic.separation,
                      "distance between class means")
      ->default_val(4.0);
  sim_cmd->add_option("--data-seed", synthetic.seed, "dataset seed")
      ->default_val(0);
  sim_cmd->add_option("--report", sim_report, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  PldOptions pld;
  if (absl::Status s = runner.GridStep(pld); !s.ok()) return runner.Fail(s);

  if (delta_cmd->parsed()) {
    auto config = runner.Config(delta_flags);
    if (!config.ok()) return runner.Fail(config.status());
    if (config->kind == SamplerKind::kTruncatedPoisson) {
      auto r = TruncatedPoissonDeltaBreakdown(*config, delta_sigma,
                                              delta_epsilon, pld);
      if (!r.ok()) return runner.Fail(r.status());
      out << "delta=" << Num(r->delta) << " bound=upper pld_delta="
          << Num(r->pld_delta) << " psi=" << Num(r->truncation.psi)
          << " correction=" << Num(r->truncation.correction) << "\n";
      return kExitOk;
    }
    auto r = ComputeDelta(*config, delta_sigma, delta_epsilon, pld);
    if (!r.ok()) return runner.Fail(r.status());
    out << "delta=" << Num(r->delta) << " bound=" << BoundKindName(r->bound)
        << "\n";
    return kExitOk;
  }

  if (eps_cmd->parsed()) {
    auto config = runner.Config(eps_flags);
    if (!config.ok()) return runner.Fail(config.status());
    CalibrationOptions options;
    options.pld = pld;
    auto r = EpsilonAtDelta(*config, eps_sigma, eps_delta, options);
    if (!r.ok()) return runner.Fail(r.status());
    out << "epsilon=" << Num(r->epsilon) << " bound=" << BoundKindName(r->bound)
        << "\n";
    return kExitOk;
  }

  if (cal_cmd->parsed()) {
    auto config = runner.Config(cal_flags);
    if (!config.ok()) return runner.Fail(config.status());
    CalibrationOptions options;
    options.pld = pld;
    options.rel_tol = cal_rel_tol;
    auto r = CalibrateSigma(*config, cal_epsilon, cal_delta, options);
    if (!r.ok()) return runner.Fail(r.status());
    if (r->bracket_failure) {
      return runner.Fail(MakeError(
          ErrorKind::kBracketFailure,
          absl::StrCat("delta target already met at sigma_min=",
                       Num(r->sigma))));
    }
    out << "sigma=" << Num(r->sigma) << " bound=" << BoundKindName(r->bound);
    if (r->optimistic) out << " optimistic=true";
    out << "\n";
    return kExitOk;
  }

  if (cmb_cmd->parsed()) {
    auto r = ChooseMaxBatch(cmb_n, cmb_b, cmb_steps, cmb_epsilon, cmb_delta,
                            cmb_fraction);
    if (!r.ok()) return runner.Fail(r.status());
    out << "B=" << *r << " psi="
        << Num(BinomialTail(cmb_n,
                            static_cast<double>(cmb_b) /
                                static_cast<double>(cmb_n),
                            *r))
        << "\n";
    return kExitOk;
  }

  if (sweep_cmd->parsed()) {
    auto axis = ParseSweepAxis(sweep_axis);
    if (!axis.ok()) return runner.Fail(axis.status());
    bool ok = false;
    std::vector<double> values = ParseValues(sweep_values, &ok);
    if (!ok) {
      return runner.Fail(MakeError(ErrorKind::kInvalidArgument,
                                   "--values needs comma-separated numbers"));
    }
    scenario.samplers.clear();
    for (absl::string_view name :
         absl::StrSplit(sweep_samplers, ',', absl::SkipEmpty())) {
      auto kind = ParseSamplerKind(name);
      if (!kind.ok()) return runner.Fail(kind.status());
      scenario.samplers.push_back(*kind);
    }
    scenario.calibration.pld = pld;
    auto points = Sweep(*axis, values, scenario);
    if (!points.ok()) return runner.Fail(points.status());
    if (sweep_out.empty()) {
      WriteCurveCsv(*points, out);
    } else {
      std::ofstream file(sweep_out, std::ios::binary);
      if (!file) {
        return runner.Fail(MakeError(ErrorKind::kInvalidArgument,
                                     "cannot open --out for writing"));
      }
      WriteCurveCsv(*points, file);
    }
    if (!sweep_json.empty()) {
      std::ofstream file(sweep_json, std::ios::binary);
      if (!file) {
        return runner.Fail(MakeError(ErrorKind::kInvalidArgument,
                                     "cannot open --json for writing"));
      }
      WriteCurveJson(*points, file);
    }
    return kExitOk;
  }

  if (sample_cmd->parsed()) {
    auto kind = ParseSamplerKind(sample_kind);
    if (!kind.ok()) return runner.Fail(kind.status());
    std::ofstream file(sample_out, std::ios::binary);
    if (!file) {
      return runner.Fail(MakeError(ErrorKind::kInvalidArgument,
                                   "cannot open --out for writing"));
    }
    if (*kind == SamplerKind::kTruncatedPoisson) {
      if (!sample_max.has_value()) {
        return runner.Fail(MakeError(ErrorKind::kInvalidConfig,
                                     "poisson sampling needs --max-batch-size"));
      }
      ManifestHeader header{*kind,       sample_n,     sample_b,
                            *sample_max, sample_steps, sample_seed};
      auto config = runner.Config(
          {"poisson", sample_n, sample_b, sample_max, sample_steps});
      if (!config.ok()) return runner.Fail(config.status());
      file << ManifestHeaderLine(header) << "\n";
      SamplerOptions options;
      options.shards = sample_shards;
      auto sizes = StreamTruncatedPoisson(
          sample_n, sample_b, *sample_max, sample_steps, sample_seed, options,
          [&](int64_t batch_id, const std::vector<WeightedEntry>& entries) {
            file << ManifestBatchLine(batch_id, entries) << "\n";
            return file ? absl::OkStatus()
                        : MakeError(ErrorKind::kInvalidArgument,
                                    "manifest write failed");
          });
      if (!sizes.ok()) return runner.Fail(sizes.status());
      int64_t truncated = 0;
      for (int64_t s : *sizes) truncated += s > *sample_max ? 1 : 0;
      out << "batches=" << sizes->size() << " truncated=" << truncated << "\n";
      return kExitOk;
    }
    auto manifest =
        GeneratePermutation(*kind, sample_n, sample_b, sample_steps,
                            sample_seed);
    if (!manifest.ok()) return runner.Fail(manifest.status());
    if (absl::Status s = WriteManifest(*manifest, file); !s.ok()) {
      return runner.Fail(s);
    }
    out << "batches=" << manifest->batches.size() << " truncated=0\n";
    return kExitOk;
  }

  if (sim_cmd->parsed()) {
    std::ifstream file(sim_manifest, std::ios::binary);
    if (!file) {
      return runner.Fail(MakeError(ErrorKind::kInvalidArgument,
                                   "cannot open --manifest"));
    }
    auto manifest = ReadManifest(file);
    if (!manifest.ok()) return runner.Fail(manifest.status());
    synthetic.size = manifest->header.dataset_size;
    auto dataset = MakeSyntheticDataset(synthetic);
    if (!dataset.ok()) return runner.Fail(dataset.status());
    train.target_batch_size = manifest->header.batch_size;
    train.steps = manifest->header.steps;
    auto result = Train(*dataset, *manifest, train);
    if (!result.ok()) return runner.Fail(result.status());
    if (!sim_report.empty()) {
      std::ofstream report(sim_report, std::ios::binary);
      if (!report) {
        return runner.Fail(MakeError(ErrorKind::kInvalidArgument,
                                     "cannot open --report for writing"));
      }
      WriteRunReport(train, manifest->header, *result, report);
    }
    out << "final_accuracy=" << Num(result->final_accuracy)
        << " final_loss=" << Num(result->loss_trace.back()) << "\n";
    return kExitOk;
  }
  return kExitUsage;
}

}  // namespace ablq
