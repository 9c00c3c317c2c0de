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

// Stage-1 data generation: per query, a CoT rewrite, a synthetic positive,
// a synthetic hard negative, and a self-verification of the positive.

#ifndef SYNRET_SYNTHESIS_H_
#define SYNRET_SYNTHESIS_H_

#include <atomic>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "synret/data_model.h"
#include "synret/llm_client.h"
#include "synret/prompts.h"

namespace synret {

// Timestamp source for SynthesisRecord::created_at.
using Clock = std::function<std::string()>;

// Current UTC time, "YYYY-MM-DDTHH:MM:SSZ".
std::string UtcNow();

// Timestamp used for mock runs so their output is byte-reproducible.
inline constexpr std::string_view kFixedTimestamp = "1970-01-01T00:00:00Z";

struct SynthesisOptions {
  int parallelism = 4;
  double max_failure_ratio = 0.1;
  // Overrides DefaultTemperature for every kind when set.
  std::optional<double> temperature;
  Clock clock = UtcNow;
  // Committed records are flushed to disk after this many new ones.
  int flush_every = 16;
};

// Relabel answer parsing: true for "no...", false for "yes...", nullopt
// otherwise (after lowercasing and trimming).
std::optional<bool> ParseRelabelAnswer(std::string_view answer);

// Issues cot, positive, negative, relabel in that order. An unparseable
// relabel answer is retried once at temperature 0; if it stays unparseable
// the record keeps relabeled = false and `*warnings` is incremented.
SynthesisRecord SynthesizeRecord(ChatClient& client,
                                 const PromptLibrary& library,
                                 const Query& query, const Passage& gold,
                                 const SynthesisOptions& options,
                                 std::atomic<int>* warnings = nullptr);

struct SynthesisSummary {
  int total = 0;      // records in the output file
  int generated = 0;  // records produced by this run
  int resumed = 0;    // records already present
  int relabeled = 0;  // over all records in the output file
  int failed = 0;
  int skipped = 0;  // judged queries without a relevant passage
  int warnings = 0;
};

class SynthesisError : public std::runtime_error {
 public:
  SynthesisError(const std::string& what, SynthesisSummary summary)
      : std::runtime_error(what), summary_(summary) {}
  const SynthesisSummary& summary() const { return summary_; }

 private:
  SynthesisSummary summary_;
};

// Synthesizes a record for every judged query of `dataset`, in query-file
// order, with at most `options.parallelism` LLM calls in flight. Queries
// already present in `out_path` are not re-issued; the file is rewritten
// with all records in query-file order. When more than max_failure_ratio of
// the issued queries fail, the successful records are written and
// SynthesisError is thrown.
SynthesisSummary RunSynthesis(ChatClient& client, const PromptLibrary& library,
                              const Dataset& dataset,
                              const std::filesystem::path& out_path,
                              const SynthesisOptions& options = {});

}  // namespace synret

#endif  // SYNRET_SYNTHESIS_H_
