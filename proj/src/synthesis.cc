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

#include "synret/synthesis.h"

#include <chrono>
#include <ctime>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include "synret/text.h"

namespace synret {

namespace fs = std::filesystem;

std::string UtcNow() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<bool> ParseRelabelAnswer(std::string_view answer) {
  const std::string a = ToLowerAscii(Trim(answer));
  if (a.rfind("no", 0) == 0) return true;
  if (a.rfind("yes", 0) == 0) return false;
  return std::nullopt;
}

namespace {

std::string Ask(ChatClient& client, const PromptLibrary& library,
                PromptKind kind, const PromptSlots& slots,
                const SynthesisOptions& options,
                std::optional<double> temperature = std::nullopt) {
  CompletionRequest req;
  req.kind = kind;
  req.prompt = library.Render(kind, slots);
  req.temperature = temperature.value_or(
      options.temperature.value_or(DefaultTemperature(kind)));
  return client.Complete(req);
}

}  // namespace

SynthesisRecord SynthesizeRecord(ChatClient& client,
                                 const PromptLibrary& library,
                                 const Query& query, const Passage& gold,
                                 const SynthesisOptions& options,
                                 std::atomic<int>* warnings) {
  (void)gold;
  SynthesisRecord r;
  r.query_id = query.id;
  const PromptSlots q = {{"question", query.text}};
  r.q_cot = Ask(client, library, PromptKind::kCot, q, options);
  r.p_plus = Ask(client, library, PromptKind::kPositive, q, options);
  r.p_minus = Ask(client, library, PromptKind::kNegative, q, options);
  const PromptSlots verify = {{"question", query.text}, {"passage", r.p_plus}};
  auto verdict = ParseRelabelAnswer(
      Ask(client, library, PromptKind::kRelabel, verify, options));
  if (!verdict) {
    verdict = ParseRelabelAnswer(
        Ask(client, library, PromptKind::kRelabel, verify, options, 0.0));
  }
  if (!verdict && warnings) warnings->fetch_add(1);
  r.relabeled = verdict.value_or(false);
  r.llm_model = client.model_name();
  r.created_at = options.clock ? options.clock() : UtcNow();
  return r;
}

SynthesisSummary RunSynthesis(ChatClient& client, const PromptLibrary& library,
                              const Dataset& dataset, const fs::path& out_path,
                              const SynthesisOptions& options) {
  if (options.parallelism < 1) {
    throw std::invalid_argument("parallelism must be >= 1");
  }
  SynthesisSummary summary;

  std::map<std::string, SynthesisRecord> existing;
  std::vector<std::string> existing_order;
  if (fs::exists(out_path)) {
    for (auto& r : ReadRecords(out_path)) {
      if (!existing.count(r.query_id)) existing_order.push_back(r.query_id);
      existing[r.query_id] = std::move(r);
    }
  }

  struct Task {
    const Query* query;
    const Passage* gold;
  };
  std::vector<Query> targets = dataset.JudgedQueries();
  std::vector<Task> pending;
  for (const auto& q : targets) {
    if (existing.count(q.id)) continue;
    auto gold = dataset.qrels.BestPassage(q.id);
    if (!gold) {
      ++summary.skipped;
      continue;
    }
    pending.push_back({&q, &dataset.corpus.Get(*gold)});
  }

  std::vector<std::optional<SynthesisRecord>> results(pending.size());
  std::vector<char> done(pending.size(), 0);
  std::atomic<size_t> next{0};
  std::atomic<int> failed{0};
  std::atomic<int> warnings{0};
  std::atomic<bool> stop{false};
  const double failure_budget = options.max_failure_ratio * pending.size();

  // Records in query-file order: everything resumed plus the generated
  // records whose index is below `limit`.
  auto merged = [&](size_t limit) {
    std::map<std::string, const SynthesisRecord*> fresh;
    for (size_t i = 0; i < limit; ++i) {
      if (results[i]) fresh[results[i]->query_id] = &*results[i];
    }
    std::vector<SynthesisRecord> out;
    std::set<std::string> emitted;
    for (const auto& q : targets) {
      if (auto it = existing.find(q.id); it != existing.end()) {
        out.push_back(it->second);
      } else if (auto f = fresh.find(q.id); f != fresh.end()) {
        out.push_back(*f->second);
      } else {
        continue;
      }
      emitted.insert(q.id);
    }
    for (const auto& id : existing_order) {
      if (!emitted.count(id)) out.push_back(existing.at(id));
    }
    return out;
  };

  std::mutex commit_mu;
  size_t committed = 0;
  size_t last_flush = 0;
  auto commit = [&](size_t i) {
    std::lock_guard<std::mutex> lock(commit_mu);
    done[i] = 1;
    while (committed < done.size() && done[committed]) ++committed;
    if (committed - last_flush >= static_cast<size_t>(options.flush_every)) {
      WriteRecords(merged(committed), out_path);
      last_flush = committed;
    }
  };

  auto worker = [&] {
    while (!stop.load()) {
      const size_t i = next.fetch_add(1);
      if (i >= pending.size()) return;
      try {
        results[i] = SynthesizeRecord(client, library, *pending[i].query,
                                      *pending[i].gold, options, &warnings);
      } catch (const std::exception& e) {
        std::cerr << "synth: query '" << pending[i].query->id
                  << "' failed: " << e.what() << "\n";
        if (failed.fetch_add(1) + 1 > failure_budget) stop = true;
      }
      commit(i);
    }
  };

  const int n_threads = static_cast<int>(
      std::min<size_t>(options.parallelism, std::max<size_t>(pending.size(), 1)));
  std::vector<std::thread> threads;
  for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  const auto all = merged(results.size());
  WriteRecords(all, out_path);

  summary.total = static_cast<int>(all.size());
  summary.resumed = static_cast<int>(existing.size());
  for (const auto& r : results) summary.generated += r.has_value();
  for (const auto& r : all) summary.relabeled += r.relabeled;
  summary.failed = failed.load();
  summary.warnings = warnings.load();
  if (summary.failed > failure_budget) {
    throw SynthesisError("synthesis aborted: " + std::to_string(summary.failed) +
                             " of " + std::to_string(pending.size()) +
                             " queries failed",
                         summary);
  }
  return summary;
}

}  // namespace synret
