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

// Offline stand-in for the black-box LLM. It answers rendered prompts from
// the dataset it is bound to, deterministically in (seed, prompt):
//
//   cot       query + two sub-questions built from the query tokens
//   positive  gold body with 20% token dropout, or, with probability
//             hallucination_rate, the body of an unrelated passage
//   negative  query tokens followed by an unrelated passage body
//   relabel   "yes" iff token Jaccard(candidate, gold body) >= threshold
//   compare   higher qrels grade wins, then higher query-token overlap,
//             then the smaller passage id
//
// "Unrelated" passages have no qrels grade for the query and overlap the
// gold body below the verification threshold, so every planted
// hallucination is caught by the relabel step.

#ifndef SYNRET_MOCK_ORACLE_H_
#define SYNRET_MOCK_ORACLE_H_

#include <array>
#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "synret/data_model.h"
#include "synret/llm_client.h"
#include "synret/prompts.h"

namespace synret {

struct MockOracleConfig {
  double hallucination_rate = 0.15;
  double verify_overlap_threshold = 0.3;
  uint64_t seed = 0;

  std::vector<std::string> Validate() const;
};

inline constexpr double kMockDropoutRate = 0.2;

class MockOracle : public ChatClient {
 public:
  // `dataset` must outlive the oracle.
  MockOracle(MockOracleConfig config, const Dataset& dataset,
             PromptLibrary library = PromptLibrary::Default());

  // Recovers the kind from the prompt; throws LlmError when it does not
  // match `request.kind` or the prompt is not a rendered template.
  std::string Complete(const CompletionRequest& request) override;
  std::string model_name() const override { return "mock-oracle"; }

  // Answer for a prompt of a known kind.
  std::string Respond(PromptKind kind, std::string_view prompt) const;

  // Ground truth: whether the positive prompt for `query_text` plants a
  // hallucination.
  bool PlantsHallucination(std::string_view query_text) const;

  uint64_t calls(PromptKind kind) const {
    return calls_[static_cast<size_t>(kind)].load();
  }
  uint64_t total_calls() const;

  const MockOracleConfig& config() const { return config_; }
  const PromptLibrary& library() const { return library_; }

 private:
  const Query& FindQuery(std::string_view text) const;
  const Passage& Gold(const Query& query) const;
  const Passage& FindPassage(std::string_view text) const;
  // Body of a passage with no grade for `query` whose overlap with the gold
  // body is below the threshold; a fabricated text when none exists.
  std::string UnrelatedBody(const Query& query, uint64_t stream_seed) const;

  std::string Cot(const PromptSlots& slots) const;
  std::string Positive(std::string_view prompt, const PromptSlots& slots) const;
  std::string Negative(std::string_view prompt, const PromptSlots& slots) const;
  std::string Relabel(const PromptSlots& slots) const;
  std::string Compare(const PromptSlots& slots) const;

  MockOracleConfig config_;
  const Dataset& dataset_;
  PromptLibrary library_;
  std::map<std::string, size_t, std::less<>> query_by_text_;
  std::map<std::string, size_t, std::less<>> passage_by_text_;
  mutable std::array<std::atomic<uint64_t>, 5> calls_{};
};

}  // namespace synret

#endif  // SYNRET_MOCK_ORACLE_H_
