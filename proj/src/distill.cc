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

#include "synret/distill.h"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include "synret/rng.h"

namespace synret {

namespace fs = std::filesystem;

std::vector<std::string> TrainConfig::Validate() const {
  std::vector<std::string> errors;
  if (batch_size < 2) errors.push_back("stage1.batch_size must be >= 2");
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) {
    errors.push_back("stage1.learning_rate must be positive");
  }
  if (epochs < 0) errors.push_back("stage1.epochs must be >= 0");
  if (warmup_steps < 0) errors.push_back("stage1.warmup_steps must be >= 0");
  if (weight_decay < 0) errors.push_back("stage1.weight_decay must be >= 0");
  if (lr_schedule != "cosine") {
    errors.push_back("stage1.lr_schedule must be 'cosine'");
  }
  if (encoder.dim < 2) errors.push_back("encoder.dim must be >= 2");
  if (encoder.vocab_buckets < 2) {
    errors.push_back("encoder.vocab_buckets must be >= 2");
  }
  if (!(encoder.tau > 0)) errors.push_back("encoder.tau must be positive");
  return errors;
}

uint64_t InitSeed(uint64_t seed) { return DeriveSeed(seed, "encoder-init"); }

std::vector<DistillExample> JoinExamples(
    const Dataset& dataset, const std::vector<SynthesisRecord>& records) {
  std::vector<DistillExample> examples;
  examples.reserve(records.size());
  for (const auto& r : records) {
    if (!dataset.queries.Find(r.query_id)) {
      throw ValidationError("record references unknown query '" + r.query_id +
                            "'");
    }
    auto gold_id = dataset.qrels.BestPassage(r.query_id);
    if (!gold_id) {
      throw ValidationError("query '" + r.query_id +
                            "' has no relevant passage in qrels");
    }
    DistillExample ex;
    ex.query = dataset.queries.Get(r.query_id);
    ex.gold = dataset.corpus.Get(*gold_id);
    ex.q_cot = r.q_cot;
    ex.p_plus = r.p_plus;
    ex.p_minus = r.p_minus;
    ex.relabeled = r.relabeled;
    examples.push_back(std::move(ex));
  }
  return examples;
}

std::vector<Batch> PackDistinct(const std::vector<std::string>& keys,
                                const std::vector<size_t>& order,
                                int batch_size, int min_size) {
  std::vector<Batch> batches;
  std::vector<size_t> pending = order;
  while (!pending.empty()) {
    Batch batch;
    std::set<std::string_view> used;
    std::vector<size_t> deferred;
    for (size_t idx : pending) {
      if (static_cast<int>(batch.size()) < batch_size &&
          used.insert(keys[idx]).second) {
        batch.push_back(idx);
      } else {
        deferred.push_back(idx);
      }
    }
    if (static_cast<int>(batch.size()) >= min_size) {
      batches.push_back(std::move(batch));
    }
    pending = std::move(deferred);
  }
  return batches;
}

std::vector<Batch> BuildBatches(const std::vector<DistillExample>& examples,
                                const TrainConfig& config, int epoch) {
  std::vector<size_t> order(examples.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(DeriveSeed(config.seed, "distill-epoch:" + std::to_string(epoch)));
  rng.Shuffle(order);
  std::vector<std::string> keys;
  keys.reserve(examples.size());
  for (const auto& ex : examples) keys.push_back(ex.query.id);
  return PackDistinct(keys, order, config.batch_size, 2);
}

std::vector<EncodedExample> TokenizeExamples(
    const EncoderModel& model, const std::vector<DistillExample>& examples) {
  std::vector<EncodedExample> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    EncodedExample e;
    e.query_id = ex.query.id;
    e.query = Tokenize(model, ex.query.text);
    e.gold = Tokenize(model, ex.gold.Text());
    e.synth_pos = Tokenize(model, ex.p_plus);
    e.cot = Tokenize(model, ex.q_cot);
    e.synth_neg = Tokenize(model, ex.p_minus);
    e.relabeled = ex.relabeled;
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

const TokenBag& SlotBag(const EncodedExample& ex, int slot) {
  switch (slot) {
    case kGoldSlot:
      return ex.gold;
    case kSynthPosSlot:
      return ex.synth_pos;
    case kCotSlot:
      return ex.cot;
    default:
      return ex.synth_neg;
  }
}

std::string BatchIds(const std::vector<EncodedExample>& examples,
                     const Batch& batch) {
  std::string ids;
  for (size_t idx : batch) {
    if (!ids.empty()) ids += ",";
    ids += examples[idx].query_id;
  }
  return ids;
}

}  // namespace

BatchGradient DistillLossAndGradient(const EncoderModel& model,
                                     const std::vector<EncodedExample>& examples,
                                     const Batch& batch,
                                     const DistillObserver& observer) {
  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());
  const int d = model.dim();
  if (n < 1) throw std::invalid_argument("empty batch");

  Eigen::MatrixXd queries(n, d);
  std::array<Eigen::MatrixXd, 4> cands;
  for (auto& c : cands) c.resize(n, d);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& ex = examples[batch[j]];
    queries.row(j) = Encode(model, ex.query).transpose();
    for (int k = 0; k < 4; ++k) {
      cands[k].row(j) = Encode(model, SlotBag(ex, k)).transpose();
    }
  }
  const double inv_tau = 1.0 / model.tau();
  std::array<Eigen::MatrixXd, 4> sims;  // sims[k](i, j) = s(q_i, slot k of j)
  double max_abs = 0;
  for (int k = 0; k < 4; ++k) {
    sims[k] = queries * cands[k].transpose() * inv_tau;
    max_abs = std::max(max_abs, sims[k].cwiseAbs().maxCoeff());
  }
  auto fail = [&] {
    std::ostringstream os;
    os << "non-finite distill loss; max |similarity| = " << max_abs
       << "; batch query ids = " << BatchIds(examples, batch);
    throw TrainingError(os.str());
  };
  if (!std::isfinite(max_abs)) fail();

  // dloss[k](i, j) = d(mean loss) / d sims[k](i, j)
  std::array<Eigen::MatrixXd, 4> dloss;
  for (auto& g : dloss) g = Eigen::MatrixXd::Zero(n, n);
  double total = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    DistillBatchScores<double> scores;
    scores.scores.resize(n, 4);
    for (int k = 0; k < 4; ++k) scores.scores.col(k) = sims[k].row(i).transpose();
    scores.anchor = i;
    scores.positive_mask = {true, !examples[batch[i]].relabeled, true};
    auto result = DistillLoss(scores);
    if (observer) observer(scores, result);
    total += result.loss;
    for (int k = 0; k < 4; ++k) {
      dloss[k].row(i) = result.grad.col(k).transpose() / static_cast<double>(n);
    }
  }
  const double mean_loss = total / static_cast<double>(n);
  if (!std::isfinite(mean_loss)) fail();

  Eigen::MatrixXd d_queries = Eigen::MatrixXd::Zero(n, d);
  std::array<Eigen::MatrixXd, 4> d_cands;
  for (int k = 0; k < 4; ++k) {
    d_queries.noalias() += dloss[k] * cands[k] * inv_tau;
    d_cands[k].noalias() = dloss[k].transpose() * queries * inv_tau;
  }

  BatchGradient out{mean_loss, RowGradient(d), max_abs};
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& ex = examples[batch[j]];
    EncodeBackward(model, ex.query, d_queries.row(j).transpose(), out.grad);
    for (int k = 0; k < 4; ++k) {
      EncodeBackward(model, SlotBag(ex, k), d_cands[k].row(j).transpose(),
                     out.grad);
    }
  }
  return out;
}

double DistillStep(EncoderModel& model,
                   const std::vector<EncodedExample>& examples,
                   const Batch& batch, AdamState& optimizer, double lr,
                   const DistillObserver& observer) {
  if (batch.size() < 2) {
    throw std::invalid_argument("distill batches need at least 2 examples");
  }
  auto step = DistillLossAndGradient(model, examples, batch, observer);
  optimizer.Step(step.grad, lr, model.mutable_embeddings());
  return step.mean_loss;
}

void WriteLossCurve(const std::vector<LossPoint>& curve, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  out << "step,mean_loss,lr\n";
  out << std::setprecision(17);
  for (const auto& p : curve) {
    out << p.step << ',' << p.mean_loss << ',' << p.lr << '\n';
  }
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

TrainResult TrainDistill(EncoderModel initial,
                         const std::vector<DistillExample>& examples,
                         const TrainConfig& config,
                         const std::optional<fs::path>& out_dir) {
  if (auto errors = config.Validate(); !errors.empty()) {
    throw ValidationError(errors.front());
  }
  TrainResult result{std::move(initial), {}};
  if (config.epochs == 0 || examples.empty()) {
    if (out_dir) {
      SaveCheckpoint(result.model, *out_dir / "model.ckpt");
      WriteLossCurve(result.curve, *out_dir / "loss_curve.csv");
    }
    return result;
  }

  const auto encoded = TokenizeExamples(result.model, examples);
  std::vector<std::vector<Batch>> epochs;
  int64_t total_steps = 0;
  for (int e = 0; e < config.epochs; ++e) {
    epochs.push_back(BuildBatches(examples, config, e));
    total_steps += static_cast<int64_t>(epochs.back().size());
  }
  CosineSchedule schedule{config.learning_rate, config.warmup_steps,
                          total_steps};
  AdamState optimizer(result.model, config.weight_decay);

  int64_t step = 0;
  for (int e = 0; e < config.epochs; ++e) {
    for (const auto& batch : epochs[e]) {
      ++step;
      const double lr = schedule.At(step);
      const double loss = DistillStep(result.model, encoded, batch, optimizer, lr);
      result.curve.push_back({step, loss, lr});
    }
    if (out_dir) SaveCheckpoint(result.model, *out_dir / "latest.ckpt");
  }
  if (out_dir) {
    SaveCheckpoint(result.model, *out_dir / "model.ckpt");
    WriteLossCurve(result.curve, *out_dir / "loss_curve.csv");
  }
  return result;
}

TrainResult TrainDistill(const Dataset& dataset,
                         const std::vector<SynthesisRecord>& records,
                         const TrainConfig& config,
                         const std::optional<fs::path>& out_dir) {
  EncoderModel initial(config.encoder, InitSeed(config.seed));
  return TrainDistill(std::move(initial), JoinExamples(dataset, records), config,
                      out_dir);
}

}  // namespace synret
