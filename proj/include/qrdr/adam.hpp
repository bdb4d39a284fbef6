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

#include <cmath>

#include "qrdr/errors.hpp"
#include "qrdr/tensor.hpp"

namespace qrdr {

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(Index parameters, AdamConfig cfg = {})
      : cfg_(cfg), m_(RVector::Zero(parameters)), v_(RVector::Zero(parameters)) {
    if (!(cfg.learning_rate > 0.0)) throw ValidationError("adam: learning rate must be > 0");
    if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) {
      throw ValidationError("adam: betas must lie in [0, 1)");
    }
  }

  void step(RVector& params, const RVector& grad) {
    if (grad.size() != m_.size() || params.size() != m_.size()) throw DimensionError("adam: parameter count");
    ++t_;
    m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grad;
    v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double c2 = 1.0 - std::pow(cfg_.beta2, t_);
    params.array() -= cfg_.learning_rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + cfg_.epsilon);
  }

  long steps() const noexcept { return t_; }

 private:
  AdamConfig cfg_;
  RVector m_;
  RVector v_;
  long t_ = 0;
};

}  // namespace qrdr
