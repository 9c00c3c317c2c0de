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

#include "synret/align.h"

#include <atomic>
#include <cmath>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "synret/optimizer.h"
#include "synret/rng.h"
#include "synret/text.h"

namespace synret {

namespace fs = std::filesystem;

std::string_view AlignLossName(AlignLossKind kind) {
  return kind == AlignLossKind::kBt ? "bt" : "partial-pl";
}

std::optional<AlignLossKind> ParseAlignLoss(std::string_view name) {
  if (name == "partial-pl") return AlignLossKind::kPartialPl;
  if (name == "bt") return AlignLossKind::kBt;
  return std::nullopt;
}

std::vector<std::string> AlignConfig::Validate() const {
  std::vector<std::string> errors;
  if (top_k < 2) errors.push_back("stage2.k must be >= 2");
  const int max_pairs = top_k * (top_k - 1) / 2;
  if (num_pairs < 1 || (top_k >= 2 && num_pairs > max_pairs)) {
    errors.push_back("stage2.n must be in [1, k(k-1)/2]");
  }
  if (batch_size < 1) errors.push_back("stage2.batch_size must be >= 1");
  if (epochs < 0) errors.push_back("stage2.epochs must be >= 0");
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) {
    errors.push_back("stage2.learning_rate must be positive");
  }
  if (warmup_steps < 0) errors.push_back("stage2.warmup_steps must be >= 0");
  if (weight_decay < 0) errors.push_back("stage2.weight_decay must be >= 0");
  if (!(max_skip_ratio >= 0 && max_skip_ratio <= 1)) {
    errors.push_back("stage2.max_skip_ratio must be in [0, 1]");
  }
  if (parallelism < 1) errors.push_back("stage2.parallelism must be >= 1");
  return errors;
}

std::vector<std::pair<int, int>> SamplePairIndices(int k, int n,
                                                   uint64_t seed) {
  if (k < 2) throw std::invalid_argument("pair sampling needs K >= 2");
  const int max_pairs = k * (k - 1) / 2;
  if (n < 1 || n > max_pairs) {
    throw std::invalid_argument("N = " + std::to_string(n) +
                                " outside [1, " + std::to_string(max_pairs) +
                                "]");
  }
  std::vector<std::pair<int, int>> all;
  all.reserve(max_pairs);
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) all.emplace_back(a, b);
  }
  Rng rng(seed);
  rng.Shuffle(all);
  all.resize(n);
  for (auto& p : all) {
    if (rng.Bernoulli(0.5)) std::swap(p.first, p.second);
  }
  return all;
}

std::vector<std::pair<std::string, std::string>> SamplePairs(
    const RankedList& ranked, int n, uint64_t seed) {
  std::vector<std::pair<std::string, std::string>> out;
  for (auto [a, b] : SamplePairIndices(static_cast<int>(ranked.k()), n, seed)) {
    out.emplace_back(ranked.entries[a].passage_id, ranked.entries[b].passage_id);
  }
  return out;
}

uint64_t PairSeed(uint64_t seed, std::string_view query_id) {
  return DeriveSeed(seed, "pairs:" + std::string(query_id));
}

std::optional<int> ResolveCompareAnswer(std::string_view reply) {
  const std::string lower = ToLowerAscii(reply);
  const size_t p1 = lower.find("passage #1");
  const size_t p2 = lower.find("passage #2");
  if (p1 == std::string::npos && p2 == std::string::npos) return std::nullopt;
  return p1 < p2 ? 1 : 2;
}

Comparison ComparePair(ChatClient& client, const PromptLibrary& library,
                       const Query& query, const Passage& slot1, int slot1_rank,
                       const Passage& slot2, int slot2_rank,
                       std::optional<double> temperature) {
  CompletionRequest req;
  req.kind = PromptKind::kCompare;
  req.prompt = library.Render(PromptKind::kCompare,
                              {{"question", query.text},
                               {"passage1", slot1.Text()},
                               {"passage2", slot2.Text()}});
  req.temperature = temperature.value_or(DefaultTemperature(PromptKind::kCompare));
  std::string reply = client.Complete(req);
  auto choice = ResolveCompareAnswer(reply);
  if (!choice) {
    req.temperature = 0.0;
    reply = client.Complete(req);
    choice = ResolveCompareAnswer(reply);
  }
  Comparison c;
  c.log.query_id = query.id;
  c.log.slot1_id = slot1.id;
  c.log.slot2_id = slot2.id;
  c.log.raw_answer = reply;
  if (!choice) {
    c.log.skipped = true;
    return c;
  }
  const bool first = *choice == 1;
  c.log.winner_id = first ? slot1.id : slot2.id;
  c.triple = PreferenceTriple{query.id, c.log.winner_id,
                              first ? slot2.id : slot1.id,
                              first ? slot1_rank : slot2_rank,
                              first ? slot2_rank : slot1_rank};
  return c;
}

namespace {

std::map<std::string, int> RankOf(const RankedList& ranked) {
  std::map<std::string, int> rank;
  for (size_t r = 0; r < ranked.k(); ++r) {
    rank[ranked.entries[r].passage_id] = static_cast<int>(r) + 1;
  }
  return rank;
}

}  // namespace

PreferenceSet CollectPreferences(ChatClient& client,
                                 const PromptLibrary& library,
                                 const EncoderModel& model,
                                 const Dataset& dataset,
                                 const AlignConfig& config,
                                 const std::optional<fs::path>& log_path) {
  if (auto errors = config.Validate(); !errors.empty()) {
    throw ValidationError(errors.front());
  }
  if (static_cast<size_t>(config.top_k) > dataset.corpus.size()) {
    throw ValidationError("stage2.k exceeds the corpus size");
  }
  const std::vector<Query> queries = dataset.JudgedQueries();
  const DenseIndex index = BuildIndex(model, dataset.corpus);

  std::map<std::string, std::vector<ComparisonLogEntry>> existing;
  if (log_path && fs::exists(*log_path)) {
    for (auto& e : ReadComparisonLog(*log_path)) {
      existing[e.query_id].push_back(std::move(e));
    }
  }

  std::vector<size_t> pending;
  for (size_t i = 0; i < queries.size(); ++i) {
    if (!existing.count(queries[i].id)) pending.push_back(i);
  }

  std::vector<std::vector<Comparison>> results(pending.size());
  std::vector<char> done(pending.size(), 0);
  std::atomic<size_t> next{0};

  auto assemble = [&](size_t limit, PreferenceSet* set) {
    std::map<std::string, const std::vector<Comparison>*> fresh;
    for (size_t j = 0; j < limit; ++j) {
      if (done[j]) fresh[queries[pending[j]].id] = &results[j];
    }
    for (const auto& q : queries) {
      if (auto it = existing.find(q.id); it != existing.end()) {
        const auto rank = RankOf(RetrieveTopK(index, model, q, config.top_k));
        for (const auto& e : it->second) {
          set->log.push_back(e);
          if (e.skipped) continue;
          const std::string& loser =
              e.winner_id == e.slot1_id ? e.slot2_id : e.slot1_id;
          if (!rank.count(e.winner_id) || !rank.count(loser)) {
            throw AlignError("comparison log for query '" + q.id +
                             "' does not match the checkpoint's top-K");
          }
          set->triples.push_back({q.id, e.winner_id, loser,
                                  rank.at(e.winner_id), rank.at(loser)});
        }
      } else if (auto f = fresh.find(q.id); f != fresh.end()) {
        for (const auto& c : *f->second) {
          set->log.push_back(c.log);
          if (c.triple) set->triples.push_back(*c.triple);
        }
      }
    }
  };

  std::mutex commit_mu;
  size_t committed = 0;
  size_t last_flush = 0;
  auto commit = [&](size_t j) {
    std::lock_guard<std::mutex> lock(commit_mu);
    done[j] = 1;
    while (committed < done.size() && done[committed]) ++committed;
    if (log_path && committed - last_flush >= 16) {
      std::vector<ComparisonLogEntry> out;
      for (const auto& q : queries) {
        if (auto it = existing.find(q.id); it != existing.end()) {
          out.insert(out.end(), it->second.begin(), it->second.end());
        }
      }
      for (size_t m = 0; m < committed; ++m) {
        for (const auto& c : results[m]) out.push_back(c.log);
      }
      WriteComparisonLog(out, *log_path);
      last_flush = committed;
    }
  };

  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mu;
  auto worker = [&] {
    while (!failed.load()) {
      const size_t j = next.fetch_add(1);
      if (j >= pending.size()) return;
      const Query& q = queries[pending[j]];
      try {
        const RankedList ranked = RetrieveTopK(index, model, q, config.top_k);
        for (auto [a, b] : SamplePairIndices(config.top_k, config.num_pairs,
                                              PairSeed(config.seed, q.id))) {
          const auto& e1 = ranked.entries[a];
          const auto& e2 = ranked.entries[b];
          results[j].push_back(ComparePair(
              client, library, q, dataset.corpus.Get(e1.passage_id), a + 1,
              dataset.corpus.Get(e2.passage_id), b + 1));
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mu);
        failure = "query '" + q.id + "': " + e.what();
        failed = true;
        return;
      }
      commit(j);
    }
  };

  const size_t n_threads = std::min<size_t>(config.parallelism,
                                            std::max<size_t>(pending.size(), 1));
  std::vector<std::thread> threads;
  for (size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  PreferenceSet set;
  assemble(pending.size(), &set);
  if (log_path) WriteComparisonLog(set.log, *log_path);
  if (failed) throw AlignError("preference collection failed at " + failure);

  set.resumed_queries = static_cast<int>(existing.size());
  for (const auto& r : results) set.comparisons += static_cast<int>(r.size());
  for (const auto& e : set.log) set.skipped += e.skipped;
  if (!set.log.empty() &&
      set.skipped > config.max_skip_ratio * static_cast<double>(set.log.size())) {
    throw AlignError(std::to_string(set.skipped) + " of " +
                     std::to_string(set.log.size()) +
                     " comparisons could not be resolved");
  }
  return set;
}

std::vector<Batch> BuildAlignBatches(const std::vector<PreferenceTriple>& triples,
                                     const AlignConfig& config, int epoch) {
  std::vector<size_t> order(triples.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(DeriveSeed(config.seed, "align-epoch:" + std::to_string(epoch)));
  rng.Shuffle(order);
  std::vector<std::string> keys;
  keys.reserve(triples.size());
  for (const auto& t : triples) keys.push_back(t.query_id);
  return PackDistinct(keys, order, config.batch_size, 1);
}

std::vector<EncodedTriple> TokenizeTriples(
    const EncoderModel& model, const Dataset& dataset,
    const std::vector<PreferenceTriple>& triples) {
  std::vector<EncodedTriple> out;
  out.reserve(triples.size());
  for (const auto& t : triples) {
    if (!dataset.queries.Find(t.query_id)) {
      throw ValidationError("triple references unknown query '" + t.query_id +
                            "'");
    }
    for (const auto* id : {&t.winner_id, &t.loser_id}) {
      if (!dataset.corpus.Find(*id)) {
        throw ValidationError("triple references unknown passage '" + *id +
                              "'");
      }
    }
    out.push_back({t.query_id,
                   Tokenize(model, dataset.queries.Get(t.query_id).text),
                   Tokenize(model, dataset.corpus.Get(t.winner_id).Text()),
                   Tokenize(model, dataset.corpus.Get(t.loser_id).Text())});
  }
  return out;
}

BatchGradient AlignLossAndGradient(const EncoderModel& model,
                                   const std::vector<EncodedTriple>& triples,
                                   const Batch& batch, AlignLossKind loss,
                                   const AlignObserver& observer) {
  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());
  const int d = model.dim();
  if (n < 1) throw std::invalid_argument("empty batch");

  Eigen::MatrixXd queries(n, d), winners(n, d), losers(n, d);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& t = triples[batch[j]];
    queries.row(j) = Encode(model, t.query).transpose();
    winners.row(j) = Encode(model, t.winner).transpose();
    losers.row(j) = Encode(model, t.loser).transpose();
  }
  const double inv_tau = 1.0 / model.tau();
  const Eigen::MatrixXd s_win = queries * winners.transpose() * inv_tau;
  const Eigen::MatrixXd s_lose = queries * losers.transpose() * inv_tau;
  const double max_abs =
      std::max(s_win.cwiseAbs().maxCoeff(), s_lose.cwiseAbs().maxCoeff());
  auto fail = [&] {
    std::ostringstream os;
    os << "non-finite align loss; max |similarity| = " << max_abs
       << "; batch query ids =";
    for (size_t idx : batch) os << ' ' << triples[idx].query_id;
    throw TrainingError(os.str());
  };
  if (!std::isfinite(max_abs)) fail();

  Eigen::MatrixXd d_win = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd d_lose = Eigen::MatrixXd::Zero(n, n);
  double total = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    AlignBatchScores<double> scores;
    scores.scores.resize(n, 2);
    scores.scores.col(0) = s_win.row(i).transpose();
    scores.scores.col(1) = s_lose.row(i).transpose();
    scores.anchor = i;
    const auto result = loss == AlignLossKind::kBt ? BtAnchorLoss(scores)
                                                   : PartialPlLoss(scores);
    if (observer) observer(scores, result);
    total += result.loss;
    d_win.row(i) = result.grad.col(0).transpose() / static_cast<double>(n);
    d_lose.row(i) = result.grad.col(1).transpose() / static_cast<double>(n);
  }
  const double mean_loss = total / static_cast<double>(n);
  if (!std::isfinite(mean_loss)) fail();

  const Eigen::MatrixXd d_queries =
      (d_win * winners + d_lose * losers) * inv_tau;
  const Eigen::MatrixXd d_winners = d_win.transpose() * queries * inv_tau;
  const Eigen::MatrixXd d_losers = d_lose.transpose() * queries * inv_tau;

  BatchGradient out{mean_loss, RowGradient(d), max_abs};
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& t = triples[batch[j]];
    EncodeBackward(model, t.query, d_queries.row(j).transpose(), out.grad);
    EncodeBackward(model, t.winner, d_winners.row(j).transpose(), out.grad);
    EncodeBackward(model, t.loser, d_losers.row(j).transpose(), out.grad);
  }
  return out;
}

double AlignStep(EncoderModel& model, const std::vector<EncodedTriple>& triples,
                 const Batch& batch, AlignLossKind loss, AdamState& optimizer,
                 double lr, const AlignObserver& observer) {
  auto step = AlignLossAndGradient(model, triples, batch, loss, observer);
  optimizer.Step(step.grad, lr, model.mutable_embeddings());
  return step.mean_loss;
}

TrainResult TrainAlign(EncoderModel model, const Dataset& dataset,
                       const std::vector<PreferenceTriple>& triples,
                       const AlignConfig& config,
                       const std::optional<fs::path>& out_dir,
                       const AlignBatchHook& on_batch) {
  if (auto errors = config.Validate(); !errors.empty()) {
    throw ValidationError(errors.front());
  }
  TrainResult result{std::move(model), {}};
  const auto encoded = TokenizeTriples(result.model, dataset, triples);
  std::vector<std::vector<Batch>> epochs;
  int64_t total_steps = 0;
  for (int e = 0; e < config.epochs; ++e) {
    epochs.push_back(BuildAlignBatches(triples, config, e));
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
      if (on_batch) on_batch(step, batch);
      const double loss =
          AlignStep(result.model, encoded, batch, config.loss, optimizer, lr);
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

}  // namespace synret
