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

#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qrdr/dataset.hpp"
#include "qrdr/engine.hpp"
#include "qrdr/errors.hpp"
#include "qrdr/lssvm.hpp"
#include "qrdr/mlp.hpp"
#include "qrdr/qcnn.hpp"
#include "qrdr/tfim.hpp"

namespace qrdr {

/// A fixed resonant parameter, or "auto" = delta_min / 100.
struct CSetting {
  std::optional<double> value;

  static CSetting automatic() { return {}; }
  static CSetting fixed(double c) { return {c}; }
  bool is_auto() const { return !value.has_value(); }

  std::string to_string() const {
    if (is_auto()) return "auto";
    nlohmann::json j = *value;
    return j.dump();
  }
};

inline constexpr double kAutoCFraction = 0.01;

/// Delta_min of the problem's Hamiltonian, independent of c.
inline double delta_min(const QrdrProblem& p, const HamiltonianOptions& o = {}) {
  return detail::resonance_gap(p.pca, static_cast<int>(p.retained()), p.layout.ancilla_dim(),
                               o.pad_value.value_or(p.pca.eigenvalues(0)), p.layout.data_dim());
}

inline double resolve_c(const QrdrProblem& p, const CSetting& c, const HamiltonianOptions& o = {}) {
  return c.is_auto() ? kAutoCFraction * delta_min(p, o) : *c.value;
}

/// Reduced features from the simulated QRDR output state, run on the full
/// data matrix.
inline FeatureReducer qrdr_reducer(CSetting c, QrdrOptions options = {}) {
  return [c, options](const RMatrix& x, int r) {
    const QrdrProblem p = prepare_qrdr(x, r);
    const QrdrOutcome o = run_qrdr(p, resolve_c(p, c, options.hamiltonian), options);
    return reduced_features(o, p.pca, x.rows());
  };
}

// ------------------------------------------------------- phase experiment

struct PhaseConfig {
  int retained = 16;
  CSetting c;
  std::size_t test_count = 40;
  int layers = 1;
  bool run_mlp = true;
  qcnn::TrainConfig train;
};

/// Inputs for every arm, derived once per dataset.
struct PhaseInputs {
  qcnn::StateBatch raw_states;
  qcnn::StateBatch reduced_states;
  RMatrix raw_features;
  RMatrix reduced_features;
  std::vector<int> labels;
  QrdrOutcome qrdr;
};

inline PhaseInputs prepare_phase_inputs(const TfimDataset& ds, const PhaseConfig& cfg,
                                        const QrdrOptions& options = {}) {
  PhaseInputs in;
  in.labels = ds.labels();
  in.raw_features = ds.data_matrix();
  const QrdrProblem p = prepare_qrdr(in.raw_features, cfg.retained);
  in.qrdr = run_qrdr(p, resolve_c(p, cfg.c, options.hamiltonian), options);
  in.reduced_features = reduced_features(in.qrdr, p.pca, in.raw_features.rows());
  const auto states = per_sample_states(in.qrdr, in.raw_features.rows());
  for (Index i = 0; i < in.raw_features.rows(); ++i) {
    in.raw_states.states.push_back(in.raw_features.row(i).transpose().cast<Complex>());
    in.reduced_states.states.push_back(states[static_cast<std::size_t>(i)]);
  }
  in.raw_states.labels = in.labels;
  in.reduced_states.labels = in.labels;
  return in;
}

struct PhaseRun {
  std::uint64_t seed = 0;
  std::vector<qcnn::History> arms;  // qcnn+qrdr, qcnn, mlp+dr, mlp
  nlohmann::json models = nlohmann::json::object();  // final quantum parameters per arm

  const qcnn::History& arm(const std::string& name) const {
    for (const auto& h : arms) {
      if (h.arm == name) return h;
    }
    throw ValidationError("phase run has no arm " + name);
  }
};

inline PhaseRun run_phase_arms(const PhaseInputs& in, const PhaseConfig& cfg, std::uint64_t seed) {
  const auto split = holdout_split(in.labels.size(), cfg.test_count, seed);
  qcnn::TrainConfig tc = cfg.train;
  tc.seed = seed;
  PhaseRun run;
  run.seed = seed;

  auto quantum_arm = [&](const qcnn::StateBatch& data, const std::string& name) {
    const int qubits = qubits_for(data.states.front().size());
    qcnn::QcnnModel model = qcnn::init_qcnn(qubits, cfg.layers, seed);
    run.arms.push_back(qcnn::train(model, qcnn::take(data, split.train), qcnn::take(data, split.test), tc, name));
    run.models[name] = model;
  };
  quantum_arm(in.reduced_states, "qcnn+qrdr");
  quantum_arm(in.raw_states, "qcnn");

  if (cfg.run_mlp) {
    std::vector<int> ytr, yte;
    for (auto i : split.train) ytr.push_back(in.labels[i]);
    for (auto i : split.test) yte.push_back(in.labels[i]);
    auto classical_arm = [&](const RMatrix& x, const std::string& name) {
      mlp::MlpModel model = mlp::init_mlp(x.cols(), seed);
      run.arms.push_back(mlp::train(model, mlp::take_rows(x, split.train), ytr, mlp::take_rows(x, split.test),
                                    yte, tc, name));
    };
    classical_arm(in.reduced_features, "mlp+dr");
    classical_arm(in.raw_features, "mlp");
  }
  return run;
}

}  // namespace qrdr
