// Copyright 2026 The QRDR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qrdr: command-line runner for the simulator experiments.
//
//   qrdr reduce     --dataset data/sonar.all-data --r 16 --c 0.004
//   qrdr sweep-c    --dataset data/sonar.all-data --r 16 --csv sweep.csv
//   qrdr qsvm       --dataset data/sonar.all-data --r 16 --folds 8 --seed 7
//   qrdr tfim-gen   --n-sites 8 --count 200 --out tfim.jsonl
//   qrdr qcnn-train --dataset tfim.jsonl --r 16 --seeds 1,2,3,4,5
//   qrdr verify
//
// Exit status: 0 success, 1 validation error, 2 runtime error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "qrdr/qrdr.hpp"
#include "selfcheck.hpp"

namespace {

using nlohmann::json;
using namespace qrdr;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

/// Module failure tagged with the pipeline stage that raised it.
struct StageError : std::runtime_error {
  StageError(std::string stage, const std::exception& e, bool validation)
      : std::runtime_error(e.what()), stage(std::move(stage)), validation(validation) {}
  std::string stage;
  bool validation;
};

template <class F>
auto stage(const std::string& name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const ValidationError& e) {
    throw StageError(name, e, true);
  } catch (const std::exception& e) {
    throw StageError(name, e, false);
  }
}

struct Common {
  std::string output;
  std::uint64_t seed = 7;
  unsigned threads = 0;

  unsigned resolved_threads() const { return threads > 0 ? threads : default_threads(); }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--output,-o", c.output, "Write the JSON report here instead of stdout");
  app->add_option("--seed", c.seed, "Seed for every random choice")->capture_default_str();
  app->add_option("--threads", c.threads, "Worker threads (default: QRDR_THREADS or 1)")
      ->check(CLI::Range(0u, 1024u));
}

std::string c_validator(const std::string& v) {
  if (v == "auto") return {};
  try {
    std::size_t used = 0;
    const double c = std::stod(v, &used);
    if (used != v.size() || !(c > 0.0) || !std::isfinite(c)) return "c must be a positive number or 'auto'";
  } catch (const std::exception&) {
    return "c must be a positive number or 'auto'";
  }
  return {};
}

CSetting parse_c(const std::string& v) {
  return v == "auto" ? CSetting::automatic() : CSetting::fixed(std::stod(v));
}

json c_echo(const std::string& v) {
  if (v == "auto") return "auto";
  return std::stod(v);
}

/// Feature matrix from a Sonar file or a TFIM JSON-lines file.
RMatrix load_matrix(const std::string& path) {
  if (path.size() >= 6 && path.substr(path.size() - 6) == ".jsonl") return read_dataset(path).data_matrix();
  return load_sonar(path).x;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << text;
  out.close();
  if (!out) throw Error("failed writing " + path);
}

void emit(const ReportRecord& rec, const Common& common) {
  stage("emit_report", [&] {
    if (common.output.empty()) {
      std::cout << serialize_report(rec);
    } else {
      emit_report(rec, common.output);
    }
    return 0;
  });
}

ReportRecord make_record(const std::string& experiment, json config, const Common& common) {
  ReportRecord rec;
  rec.experiment = experiment;
  rec.timestamp = report_timestamp();
  config["seed"] = common.seed;
  config["threads"] = common.resolved_threads();
  rec.config = std::move(config);
  return rec;
}

QrdrOptions qrdr_options(const std::string& path, unsigned threads) {
  QrdrOptions o;
  o.path = path == "dense" ? EvolutionPath::kDense : EvolutionPath::kBlockwise;
  o.threads = threads;
  return o;
}

template <class T>
std::string csv_line(const std::vector<T>& v) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  return out.str();
}

// ---------------------------------------------------------------- reduce

struct ReduceArgs {
  Common common;
  std::string dataset;
  int r = 16;
  std::string c = "auto";
  std::string path = "blockwise";
  std::string features_out;
};

int run_reduce(const ReduceArgs& a) {
  const unsigned threads = a.common.resolved_threads();
  const RMatrix x = stage("load_dataset", [&] { return load_matrix(a.dataset); });
  const QrdrProblem p = stage("pca", [&] { return prepare_qrdr(x, a.r); });
  const QrdrOutcome o = stage("qrdr", [&] {
    const QrdrOptions opt = qrdr_options(a.path, threads);
    return run_qrdr(p, resolve_c(p, parse_c(a.c), opt.hamiltonian), opt);
  });
  ReportRecord rec = make_record(
      "reduce", {{"dataset", a.dataset}, {"r", a.r}, {"c", c_echo(a.c)}, {"path", a.path}, {"features_out", a.features_out}},
      a.common);
  rec.metrics = o;
  rec.metrics["warnings"] = o.warnings;
  rec.metrics["samples"] = x.rows();
  rec.metrics["features"] = x.cols();
  rec.metrics["data_register_weight"] = o.data_register_weight;
  rec.metrics["eigenvalues"] = std::vector<double>(p.pca.eigenvalues.data(), p.pca.eigenvalues.data() + a.r);
  if (!a.features_out.empty()) {
    stage("write_features", [&] {
      const RMatrix z = reduced_features(o, p.pca, x.rows());
      std::ostringstream out;
      out.precision(17);
      for (Index i = 0; i < z.rows(); ++i) {
        for (Index j = 0; j < z.cols(); ++j) out << (j ? "," : "") << z(i, j);
        out << '\n';
      }
      write_text(a.features_out, out.str());
      return 0;
    });
    rec.artifacts.push_back(a.features_out);
  }
  emit(rec, a.common);
  return 0;
}

// --------------------------------------------------------------- sweep-c

struct SweepArgs {
  Common common;
  std::string dataset;
  int r = 16;
  std::vector<double> c_grid = default_c_grid();
  std::string csv;
};

int run_sweep(const SweepArgs& a) {
  const RMatrix x = stage("load_dataset", [&] { return load_matrix(a.dataset); });
  QrdrOptions opt;
  opt.threads = a.common.resolved_threads();
  const SweepResult s = stage("sweep_c", [&] { return sweep_c(x, a.r, a.c_grid, opt); });
  ReportRecord rec = make_record("sweep-c", {{"dataset", a.dataset}, {"r", a.r}, {"c_grid", a.c_grid}, {"csv", a.csv}},
                                 a.common);
  json points = json::array();
  for (const auto& pt : s.points) {
    points.push_back({{"c", pt.c}, {"epsilon", pt.epsilon}, {"success_probability", pt.success_probability}});
  }
  json skipped = json::array();
  for (const auto& [c, why] : s.skipped) skipped.push_back({{"c", c}, {"reason", why}});
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  rec.metrics = {{"points", points},
                 {"skipped", skipped},
                 {"slope", num(s.slope)},
                 {"intercept", num(s.intercept)},
                 {"correlation", num(s.correlation)},
                 {"epsilon_slope", num(s.epsilon_slope)},
                 {"below_floor", s.below_floor},
                 {"degenerate_fit", s.degenerate_fit},
                 {"warnings", s.warnings}};
  if (!a.csv.empty()) {
    stage("write_csv", [&] {
      std::ostringstream out;
      write_sweep_csv(s, out);
      write_text(a.csv, out.str());
      return 0;
    });
    rec.artifacts.push_back(a.csv);
  }
  emit(rec, a.common);
  return 0;
}

// ------------------------------------------------------------------ qsvm

struct QsvmArgs {
  Common common;
  std::string dataset;
  int r = 16;
  int folds = 8;
  std::vector<double> gamma_grid = default_gamma_grid();
  std::string c = "auto";
  std::vector<int> r_values;
  std::size_t test_count = 20;
  int repeats = 8;
  std::string csv;
};

int run_qsvm(const QsvmArgs& a) {
  const unsigned threads = a.common.resolved_threads();
  const LabeledDataset ds = stage("load_dataset", [&] { return load_sonar(a.dataset); });
  const FoldPlan plan = stage("kfold_split", [&] { return kfold_split(ds, a.folds, a.common.seed); });
  const FeatureReducer reducer = qrdr_reducer(parse_c(a.c));

  ReportRecord rec = make_record("qsvm",
                                 {{"dataset", a.dataset},
                                  {"r", a.r},
                                  {"folds", a.folds},
                                  {"gamma_grid", a.gamma_grid},
                                  {"c", c_echo(a.c)},
                                  {"r_values", a.r_values},
                                  {"test_count", a.test_count},
                                  {"repeats", a.repeats},
                                  {"csv", a.csv}},
                                 a.common);

  json raw = stage("cross_validate", [&] { return json(cross_validate(ds, plan, a.gamma_grid, threads)); });
  raw["r"] = ds.features();
  rec.metrics["raw"] = raw;
  if (a.r > 0) {
    LabeledDataset reduced = ds;
    reduced.x = stage("qrdr", [&] { return reducer(ds.x, a.r); });
    json red = stage("cross_validate", [&] { return json(cross_validate(reduced, plan, a.gamma_grid, threads)); });
    red["r"] = a.r;
    rec.metrics["reduced"] = red;
  }
  if (!a.r_values.empty()) {
    const HoldoutSpec spec{a.test_count, a.repeats, a.common.seed, a.folds};
    const auto rows = stage("r_sweep", [&] { return r_sweep(ds, a.r_values, spec, reducer, a.gamma_grid, threads); });
    rec.metrics["r_sweep"] = rows;
    if (!a.csv.empty()) {
      stage("write_csv", [&] {
        std::ostringstream out;
        out.precision(17);
        out << "r,mean,min,max,accuracies\n";
        for (const auto& row : rows) {
          out << row.r << ',' << row.mean << ',' << row.min << ',' << row.max << ",\"" << csv_line(row.accuracies)
              << "\"\n";
        }
        write_text(a.csv, out.str());
        return 0;
      });
      rec.artifacts.push_back(a.csv);
    }
  }
  emit(rec, a.common);
  return 0;
}

// -------------------------------------------------------------- tfim-gen

struct TfimArgs {
  Common common;
  int n_sites = 8;
  int count = 200;
  double j = 1.0;
  std::vector<double> ratio_range{0.2, 1.8};
  std::vector<double> exclusion{0.95, 1.05};
  std::string out;
};

int run_tfim(const TfimArgs& a) {
  const TfimDataset ds = stage("generate_dataset", [&] {
    return generate_dataset(a.n_sites, a.count, {a.ratio_range[0], a.ratio_range[1]}, {a.exclusion[0], a.exclusion[1]},
                            a.common.seed, a.j, a.common.resolved_threads());
  });
  stage("write_dataset", [&] {
    write_dataset(ds, a.out);
    return 0;
  });
  ReportRecord rec = make_record("tfim-gen",
                                 {{"n_sites", a.n_sites},
                                  {"count", a.count},
                                  {"J", a.j},
                                  {"ratio_range", a.ratio_range},
                                  {"exclusion", a.exclusion},
                                  {"out", a.out}},
                                 a.common);
  int para = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  int flagged = 0;
  for (const auto& s : ds.samples) {
    para += s.label > 0;
    min_gap = std::min(min_gap, s.gap);
    flagged += s.near_degenerate;
  }
  rec.metrics = {{"samples", ds.samples.size()},
                 {"paramagnetic", para},
                 {"ferromagnetic", static_cast<int>(ds.samples.size()) - para},
                 {"min_ground_gap", min_gap},
                 {"near_degenerate", flagged}};
  rec.artifacts.push_back(a.out);
  emit(rec, a.common);
  return 0;
}

// ------------------------------------------------------------ qcnn-train

struct QcnnArgs {
  Common common;
  std::string dataset;
  int r = 16;
  std::string c = "auto";
  int layers = 1;
  int epochs = 20;
  int batch = 20;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::string gradient = "fd";
  double fd_step = 1e-5;
  std::vector<std::uint64_t> seeds;
  std::size_t test_count = 40;
  bool no_mlp = false;
  std::string csv;
};

int run_qcnn(const QcnnArgs& a) {
  const TfimDataset ds = stage("load_dataset", [&] { return read_dataset(a.dataset); });
  PhaseConfig cfg;
  cfg.retained = a.r;
  cfg.c = parse_c(a.c);
  cfg.test_count = a.test_count;
  cfg.layers = a.layers;
  cfg.run_mlp = !a.no_mlp;
  cfg.train.adam = {a.lr, a.beta1, a.beta2, a.adam_eps};
  cfg.train.batch_size = a.batch;
  cfg.train.epochs = a.epochs;
  cfg.train.gradient = a.gradient == "shift" ? qcnn::GradientMethod::kParameterShift
                                             : qcnn::GradientMethod::kFiniteDifference;
  cfg.train.fd_step = a.fd_step;
  cfg.train.threads = a.common.resolved_threads();
  const std::vector<std::uint64_t> seeds = a.seeds.empty() ? std::vector<std::uint64_t>{a.common.seed} : a.seeds;

  QrdrOptions opt;
  opt.threads = cfg.train.threads;
  const PhaseInputs in = stage("qrdr", [&] { return prepare_phase_inputs(ds, cfg, opt); });

  ReportRecord rec = make_record("qcnn-train",
                                 {{"dataset", a.dataset},
                                  {"r", a.r},
                                  {"c", c_echo(a.c)},
                                  {"layers", a.layers},
                                  {"epochs", a.epochs},
                                  {"batch", a.batch},
                                  {"lr", a.lr},
                                  {"beta1", a.beta1},
                                  {"beta2", a.beta2},
                                  {"adam_eps", a.adam_eps},
                                  {"gradient", a.gradient},
                                  {"fd_step", a.fd_step},
                                  {"seeds", seeds},
                                  {"test_count", a.test_count},
                                  {"no_mlp", a.no_mlp},
                                  {"csv", a.csv}},
                                 a.common);
  rec.metrics["qrdr"] = in.qrdr;
  rec.metrics["qrdr"]["warnings"] = in.qrdr.warnings;

  std::map<std::string, std::vector<double>> finals;
  std::vector<qcnn::History> all;
  json runs = json::array();
  for (auto s : seeds) {
    PhaseRun run = stage("train", [&] { return run_phase_arms(in, cfg, s); });
    for (auto& h : run.arms) {
      finals[h.arm].push_back(h.epochs.back().test_accuracy);
      qcnn::History tagged = h;
      tagged.arm = h.arm + "@" + std::to_string(s);
      all.push_back(std::move(tagged));
    }
    runs.push_back({{"seed", s}, {"arms", run.arms}, {"models", run.models}});
  }
  json summary = json::object();
  for (const auto& [arm, acc] : finals) {
    double mean = 0;
    for (double v : acc) mean += v;
    summary[arm] = {{"final_test_accuracy", acc}, {"mean_final_test_accuracy", mean / acc.size()}};
  }
  rec.metrics["runs"] = runs;
  rec.metrics["summary"] = summary;
  if (!a.csv.empty()) {
    stage("write_csv", [&] {
      std::ostringstream out;
      qcnn::write_history_csv(all, out);
      write_text(a.csv, out.str());
      return 0;
    });
    rec.artifacts.push_back(a.csv);
  }
  emit(rec, a.common);
  return 0;
}

// ---------------------------------------------------------------- verify

int run_verify(const Common& common) {
  const auto checks = tools::run_selfchecks(common.seed);
  ReportRecord rec = make_record("verify", json::object(), common);
  bool all = true;
  for (const auto& c : checks) {
    std::cerr << (c.passed ? "ok    " : "FAIL  ") << c.name << (c.passed ? "" : ": " + c.detail) << '\n';
    rec.metrics["checks"][c.name] = c.passed;
    all = all && c.passed;
  }
  rec.metrics["passed"] = all;
  emit(rec, common);
  return all ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QRDR simulator experiments"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");

  ReduceArgs reduce;
  auto* cmd_reduce = app.add_subcommand("reduce", "Run QRDR on a dataset and report fidelity");
  add_common(cmd_reduce, reduce.common);
  cmd_reduce->add_option("--dataset", reduce.dataset, "Sonar CSV or TFIM .jsonl")->required()->check(CLI::ExistingFile);
  cmd_reduce->add_option("--r", reduce.r, "Retained dimension R")->capture_default_str()->check(CLI::Range(1, 4096));
  cmd_reduce->add_option("--c", reduce.c, "Resonant parameter, or 'auto'")->capture_default_str()->check(CLI::Validator(c_validator, "C"));
  cmd_reduce->add_option("--path", reduce.path, "Evolution path")->capture_default_str()->check(CLI::IsMember({"blockwise", "dense"}));
  cmd_reduce->add_option("--features-out", reduce.features_out, "CSV of reduced features");

  SweepArgs sweep;
  auto* cmd_sweep = app.add_subcommand("sweep-c", "Error against resonant parameter c");
  add_common(cmd_sweep, sweep.common);
  cmd_sweep->add_option("--dataset", sweep.dataset, "Sonar CSV or TFIM .jsonl")->required()->check(CLI::ExistingFile);
  cmd_sweep->add_option("--r", sweep.r, "Retained dimension R")->capture_default_str()->check(CLI::Range(1, 4096));
  cmd_sweep->add_option("--c-grid", sweep.c_grid, "c values")->delimiter(',')->check(CLI::PositiveNumber);
  cmd_sweep->add_option("--csv", sweep.csv, "CSV of (c, epsilon, success_probability)");

  QsvmArgs qsvm;
  auto* cmd_qsvm = app.add_subcommand("qsvm", "LS-SVM cross-validation on raw and reduced data");
  add_common(cmd_qsvm, qsvm.common);
  cmd_qsvm->add_option("--dataset", qsvm.dataset, "Sonar CSV")->required()->check(CLI::ExistingFile);
  cmd_qsvm->add_option("--r", qsvm.r, "Retained dimension R (0 skips the reduced arm)")->capture_default_str()->check(CLI::Range(0, 4096));
  cmd_qsvm->add_option("--folds", qsvm.folds, "Outer folds")->capture_default_str()->check(CLI::Range(2, 1000));
  cmd_qsvm->add_option("--gamma-grid", qsvm.gamma_grid, "Regularizer grid")->delimiter(',')->check(CLI::PositiveNumber);
  cmd_qsvm->add_option("--c", qsvm.c, "Resonant parameter, or 'auto'")->capture_default_str()->check(CLI::Validator(c_validator, "C"));
  cmd_qsvm->add_option("--r-values", qsvm.r_values, "R values for the holdout sweep")->delimiter(',');
  cmd_qsvm->add_option("--test-count", qsvm.test_count, "Holdout size")->capture_default_str()->check(CLI::Range(1, 100000));
  cmd_qsvm->add_option("--repeats", qsvm.repeats, "Holdout repeats")->capture_default_str()->check(CLI::Range(1, 1000));
  cmd_qsvm->add_option("--csv", qsvm.csv, "CSV of the R sweep");

  TfimArgs tfim;
  auto* cmd_tfim = app.add_subcommand("tfim-gen", "Generate TFIM ground-state dataset");
  add_common(cmd_tfim, tfim.common);
  cmd_tfim->add_option("--n-sites", tfim.n_sites, "Chain length")->capture_default_str()->check(CLI::Range(2, 14));
  cmd_tfim->add_option("--count", tfim.count, "Samples (even)")->capture_default_str()->check(CLI::Range(2, 100000));
  cmd_tfim->add_option("--j", tfim.j, "Coupling J")->capture_default_str()->check(CLI::PositiveNumber);
  cmd_tfim->add_option("--ratio-range", tfim.ratio_range, "h/J range")->delimiter(',')->expected(2);
  cmd_tfim->add_option("--exclusion", tfim.exclusion, "Excluded h/J window")->delimiter(',')->expected(2);
  cmd_tfim->add_option("--out", tfim.out, "Output .jsonl")->required();

  QcnnArgs qc;
  auto* cmd_qcnn = app.add_subcommand("qcnn-train", "Train QCNN and MLP arms on a TFIM dataset");
  add_common(cmd_qcnn, qc.common);
  cmd_qcnn->add_option("--dataset", qc.dataset, "TFIM .jsonl")->required()->check(CLI::ExistingFile);
  cmd_qcnn->add_option("--r", qc.r, "Retained dimension R")->capture_default_str()->check(CLI::Range(1, 4096));
  cmd_qcnn->add_option("--c", qc.c, "Resonant parameter, or 'auto'")->capture_default_str()->check(CLI::Validator(c_validator, "C"));
  cmd_qcnn->add_option("--layers", qc.layers, "Conv+pool stages")->capture_default_str()->check(CLI::Range(1, 8));
  cmd_qcnn->add_option("--epochs", qc.epochs)->capture_default_str()->check(CLI::Range(1, 100000));
  cmd_qcnn->add_option("--batch", qc.batch)->capture_default_str()->check(CLI::Range(1, 100000));
  cmd_qcnn->add_option("--lr", qc.lr)->capture_default_str()->check(CLI::PositiveNumber);
  cmd_qcnn->add_option("--beta1", qc.beta1)->capture_default_str()->check(CLI::Range(0.0, 0.999999));
  cmd_qcnn->add_option("--beta2", qc.beta2)->capture_default_str()->check(CLI::Range(0.0, 0.999999));
  cmd_qcnn->add_option("--adam-eps", qc.adam_eps)->capture_default_str()->check(CLI::PositiveNumber);
  cmd_qcnn->add_option("--gradient", qc.gradient)->capture_default_str()->check(CLI::IsMember({"fd", "shift"}));
  cmd_qcnn->add_option("--fd-step", qc.fd_step)->capture_default_str()->check(CLI::PositiveNumber);
  cmd_qcnn->add_option("--seeds", qc.seeds, "Training seeds (default: --seed)")->delimiter(',');
  cmd_qcnn->add_option("--test-count", qc.test_count)->capture_default_str()->check(CLI::Range(1, 100000));
  cmd_qcnn->add_flag("--no-mlp", qc.no_mlp, "Skip the classical arms");
  cmd_qcnn->add_option("--csv", qc.csv, "Per-epoch history CSV");

  Common verify;
  auto* cmd_verify = app.add_subcommand("verify", "Run the invariant self-checks");
  add_common(cmd_verify, verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*cmd_reduce) return run_reduce(reduce);
    if (*cmd_sweep) return run_sweep(sweep);
    if (*cmd_qsvm) return run_qsvm(qsvm);
    if (*cmd_tfim) return run_tfim(tfim);
    if (*cmd_qcnn) return run_qcnn(qc);
    if (*cmd_verify) return run_verify(verify);
  } catch (const StageError& e) {
    std::cerr << "qrdr: " << e.stage << ": " << e.what() << '\n';
    return e.validation ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "qrdr: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
