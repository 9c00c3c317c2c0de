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

// Stage 2: retrieve top-K with the distilled encoder, ask the LLM to compare
// N sampled pairs per query, then fine-tune on the resulting preference
// triples with the partial Plackett-Luce loss (or Bradley-Terry).

#ifndef SYNRET_ALIGN_H_
#define SYNRET_ALIGN_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "synret/data_model.h"
#include "synret/distill.h"
#include "synret/encoder.h"
#include "synret/llm_client.h"
#include "synret/losses.h"
#include "synret/prompts.h"
#include "synret/retrieval.h"

namespace synret {

enum class AlignLossKind { kPartialPl, kBt };

std::string_view AlignLossName(AlignLossKind kind);
// "partial-pl" or "bt".
std::optional<AlignLossKind> ParseAlignLoss(std::string_view name);

struct AlignConfig {
  int top_k = 5;
  int num_pairs = 10;
  int batch_size = 100;
  int epochs = 1;
  double learning_rate = kDefaultLearningRate;
  int64_t warmup_steps = 1000;
  double weight_decay = 0.01;
  uint64_t seed = 0;
  AlignLossKind loss = AlignLossKind::kPartialPl;
  double max_skip_ratio = 0.1;
  int parallelism = 4;

  std::vector<std::string> Validate() const;
};

// N distinct unordered pairs of 0-based ranks in [0, K), uniform without
// replacement. Each pair is returned in slot order (first = "Passage #1"),
// which is itself a seeded coin flip. Throws when K < 2 or N is outside
// [1, K(K-1)/2].
std::vector<std::pair<int, int>> SamplePairIndices(int k, int n, uint64_t seed);

// SamplePairIndices applied to the entries of `ranked`; returns passage ids.
std::vector<std::pair<std::string, std::string>> SamplePairs(
    const RankedList& ranked, int n, uint64_t seed);

// Per-query pair sampling seed.
uint64_t PairSeed(uint64_t seed, std::string_view query_id);

// 1 or 2 for the earliest "passage #1"/"passage #2" in the reply
// (case-insensitive), nullopt when neither occurs.
std::optional<int> ResolveCompareAnswer(std::string_view reply);

struct Comparison {
  ComparisonLogEntry log;
  std::optional<PreferenceTriple> triple;  // empty when skipped
};

// Renders the compare prompt for (query, slot1, slot2). An unresolvable reply
// is retried once at temperature 0; if it stays unresolvable the comparison
// is skipped. Ranks are the 1-based positions in the retrieved list.
Comparison ComparePair(ChatClient& client, const PromptLibrary& library,
                       const Query& query, const Passage& slot1, int slot1_rank,
                       const Passage& slot2, int slot2_rank,
                       std::optional<double> temperature = std::nullopt);

struct PreferenceSet {
  std::vector<PreferenceTriple> triples;
  std::vector<ComparisonLogEntry> log;
  int comparisons = 0;  // issued by this run
  int skipped = 0;      // over the whole log
  int resumed_queries = 0;
};

class AlignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// For each judged query: top-K with `model`, sample N pairs, compare each.
// Comparisons run on at most config.parallelism threads. When `log_path`
// exists, queries it already covers are not re-issued; their triples are
// rebuilt from the log. The log is rewritten in query-file order. Throws
// AlignError when more than max_skip_ratio of all comparisons are skipped.
PreferenceSet CollectPreferences(
    ChatClient& client, const PromptLibrary& library, const EncoderModel& model,
    const Dataset& dataset, const AlignConfig& config,
    const std::optional<std::filesystem::path>& log_path = std::nullopt);

// Seeded shuffle for `epoch`, then PackDistinct by query id (no minimum
// size, so a lone leftover triple forms its own batch).
std::vector<Batch> BuildAlignBatches(const std::vector<PreferenceTriple>& triples,
                                     const AlignConfig& config, int epoch);

struct EncodedTriple {
  std::string query_id;
  TokenBag query;
  TokenBag winner;
  TokenBag loser;
};

// Throws ValidationError when a triple references an unknown id.
std::vector<EncodedTriple> TokenizeTriples(
    const EncoderModel& model, const Dataset& dataset,
    const std::vector<PreferenceTriple>& triples);

using AlignObserver = std::function<void(const AlignBatchScores<double>&,
                                         const AlignLossResult<double>&)>;

// Mean per-anchor loss over the batch and its gradient with respect to the
// embedding table. Texts are encoded with the current parameters.
BatchGradient AlignLossAndGradient(const EncoderModel& model,
                                   const std::vector<EncodedTriple>& triples,
                                   const Batch& batch, AlignLossKind loss,
                                   const AlignObserver& observer = nullptr);

double AlignStep(EncoderModel& model, const std::vector<EncodedTriple>& triples,
                 const Batch& batch, AlignLossKind loss, AdamState& optimizer,
                 double lr, const AlignObserver& observer = nullptr);

// Sees every training step's batch before the update.
using AlignBatchHook = std::function<void(int64_t step, const Batch& batch)>;

// Continual fine-tuning from `model` with a fresh optimizer state. When
// `out_dir` is set, writes `latest.ckpt` per epoch and `model.ckpt` plus
// `loss_curve.csv` at the end.
TrainResult TrainAlign(EncoderModel model, const Dataset& dataset,
                       const std::vector<PreferenceTriple>& triples,
                       const AlignConfig& config,
                       const std::optional<std::filesystem::path>& out_dir =
                           std::nullopt,
                       const AlignBatchHook& on_batch = nullptr);

}  // namespace synret

#endif  // SYNRET_ALIGN_H_
