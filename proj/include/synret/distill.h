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

// Stage-1 training: every query is pulled toward its gold passage, its
// synthetic positive (unless relabeled) and its CoT expansion, and pushed
// away from everything else in the batch including all synthetic negatives.

#ifndef SYNRET_DISTILL_H_
#define SYNRET_DISTILL_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "synret/data_model.h"
#include "synret/encoder.h"
#include "synret/losses.h"
#include "synret/optimizer.h"

namespace synret {

inline constexpr double kDefaultLearningRate = 5e-2;

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  int batch_size = 60;
  double learning_rate = kDefaultLearningRate;
  int epochs = 1;
  int64_t warmup_steps = 1000;
  double weight_decay = 0.01;
  uint64_t seed = 0;
  std::string lr_schedule = "cosine";
  EncoderConfig encoder;

  // Every violated constraint, empty when valid.
  std::vector<std::string> Validate() const;
};

struct DistillExample {
  Query query;
  Passage gold;
  std::string q_cot;
  std::string p_plus;
  std::string p_minus;
  bool relabeled = false;
};

// Joins records with the dataset. The gold passage is the query's
// highest-grade judged passage. Throws ValidationError for records whose
// query is unknown or has no relevant passage.
std::vector<DistillExample> JoinExamples(
    const Dataset& dataset, const std::vector<SynthesisRecord>& records);

using Batch = std::vector<size_t>;

// Packs `order` into batches of at most `batch_size` whose keys are
// pairwise distinct. An item whose key already sits in the open batch is
// deferred to a later batch. Batches smaller than `min_size` are dropped.
std::vector<Batch> PackDistinct(const std::vector<std::string>& keys,
                                const std::vector<size_t>& order,
                                int batch_size, int min_size);

// Seeded shuffle for `epoch`, then PackDistinct by query id with a minimum
// batch size of 2.
std::vector<Batch> BuildBatches(const std::vector<DistillExample>& examples,
                                const TrainConfig& config, int epoch);

// Token bags of one example's five texts, computed once per training run.
struct EncodedExample {
  std::string query_id;
  TokenBag query;
  TokenBag gold;
  TokenBag synth_pos;
  TokenBag cot;
  TokenBag synth_neg;
  bool relabeled = false;
};

std::vector<EncodedExample> TokenizeExamples(
    const EncoderModel& model, const std::vector<DistillExample>& examples);

// Called once per anchor with the exact loss inputs and outputs.
using DistillObserver = std::function<void(const DistillBatchScores<double>&,
                                           const DistillLossResult<double>&)>;

struct BatchGradient {
  double mean_loss = 0;
  RowGradient grad;
  double max_abs_similarity = 0;
};

// Mean distill loss over the batch anchors and its gradient with respect
// to the embedding table. Throws TrainingError on a non-finite loss.
BatchGradient DistillLossAndGradient(const EncoderModel& model,
                                     const std::vector<EncodedExample>& examples,
                                     const Batch& batch,
                                     const DistillObserver& observer = nullptr);

// One Adam update at learning rate `lr`; returns the pre-update mean loss.
double DistillStep(EncoderModel& model,
                   const std::vector<EncodedExample>& examples,
                   const Batch& batch, AdamState& optimizer, double lr,
                   const DistillObserver& observer = nullptr);

struct LossPoint {
  int64_t step = 0;
  double mean_loss = 0;
  double lr = 0;
};

struct TrainResult {
  EncoderModel model;
  std::vector<LossPoint> curve;
};

// Writes `step,mean_loss,lr`.
void WriteLossCurve(const std::vector<LossPoint>& curve,
                    const std::filesystem::path& path);

// Trains from `initial`. When `out_dir` is set, `latest.ckpt` is rewritten
// after every epoch and `model.ckpt` plus `loss_curve.csv` at the end.
TrainResult TrainDistill(EncoderModel initial,
                         const std::vector<DistillExample>& examples,
                         const TrainConfig& config,
                         const std::optional<std::filesystem::path>& out_dir =
                             std::nullopt);

// Initializes a model from `config.encoder` and `config.seed`, joins the
// records and trains.
TrainResult TrainDistill(const Dataset& dataset,
                         const std::vector<SynthesisRecord>& records,
                         const TrainConfig& config,
                         const std::optional<std::filesystem::path>& out_dir =
                             std::nullopt);

// Seed used for the embedding initialization of a run seeded with `seed`.
uint64_t InitSeed(uint64_t seed);

}  // namespace synret

#endif  // SYNRET_DISTILL_H_
