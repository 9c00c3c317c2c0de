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

#ifndef SYNRET_OPTIMIZER_H_
#define SYNRET_OPTIMIZER_H_

#include <cstdint>

#include "synret/encoder.h"

namespace synret {

// Linear warmup to `peak` over `warmup_steps`, then cosine decay to zero at
// `total_steps`. Steps are 1-based.
struct CosineSchedule {
  double peak = 5e-2;
  int64_t warmup_steps = 1000;
  int64_t total_steps = 1;

  double At(int64_t step) const;
};

// Adam with decoupled weight decay over the full embedding table.
class AdamState {
 public:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  AdamState(Eigen::Index rows, Eigen::Index cols, double weight_decay);
  explicit AdamState(const EncoderModel& model, double weight_decay = 0.01)
      : AdamState(model.embeddings().rows(), model.embeddings().cols(),
                  weight_decay) {}

  // Applies one update with learning rate `lr`. Rows absent from `grad` are
  // treated as zero gradient.
  void Step(const RowGradient& grad, double lr, RowMajorMatrix& params);

  int64_t step() const { return step_; }
  const RowMajorMatrix& first_moment() const { return m_; }
  const RowMajorMatrix& second_moment() const { return v_; }

 private:
  RowMajorMatrix m_;
  RowMajorMatrix v_;
  double weight_decay_;
  int64_t step_ = 0;
};

}  // namespace synret

#endif  // SYNRET_OPTIMIZER_H_
