// Copyright 2026 The synret Authors.
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

#include "synret/optimizer.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace synret {

double CosineSchedule::At(int64_t step) const {
  if (step < 1) return 0.0;
  if (step <= warmup_steps) {
    return peak * static_cast<double>(step) / static_cast<double>(warmup_steps);
  }
  const int64_t decay_steps = std::max<int64_t>(1, total_steps - warmup_steps);
  const double progress =
      std::min(1.0, static_cast<double>(step - warmup_steps) / decay_steps);
  return peak * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

AdamState::AdamState(Eigen::Index rows, Eigen::Index cols, double weight_decay)
    : m_(RowMajorMatrix::Zero(rows, cols)),
      v_(RowMajorMatrix::Zero(rows, cols)),
      weight_decay_(weight_decay) {}

void AdamState::Step(const RowGradient& grad, double lr,
                     RowMajorMatrix& params) {
  if (params.rows() != m_.rows() || params.cols() != m_.cols()) {
    throw std::invalid_argument("AdamState: parameter shape mismatch");
  }
  ++step_;
  m_ *= kBeta1;
  v_ *= kBeta2;
  for (const auto& [bucket, g] : grad.rows()) {
    m_.row(bucket) += (1.0 - kBeta1) * g.transpose();
    v_.row(bucket) += (1.0 - kBeta2) * g.cwiseAbs2().transpose();
  }
  const double bias1 = 1.0 - std::pow(kBeta1, static_cast<double>(step_));
  const double bias2 = 1.0 - std::pow(kBeta2, static_cast<double>(step_));
  if (weight_decay_ != 0.0) params *= (1.0 - lr * weight_decay_);
  params.array() -= lr * (m_.array() / bias1) /
                    ((v_.array() / bias2).sqrt() + kEpsilon);
}

}  // namespace synret
