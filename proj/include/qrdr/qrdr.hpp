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

#include "qrdr/adam.hpp"
#include "qrdr/dataset.hpp"
#include "qrdr/engine.hpp"
#include "qrdr/errors.hpp"
#include "qrdr/experiments.hpp"
#include "qrdr/lssvm.hpp"
#include "qrdr/mlp.hpp"
#include "qrdr/parallel.hpp"
#include "qrdr/pca.hpp"
#include "qrdr/qcnn.hpp"
#include "qrdr/report.hpp"
#include "qrdr/resonance.hpp"
#include "qrdr/rng.hpp"
#include "qrdr/tensor.hpp"
#include "qrdr/tfim.hpp"
