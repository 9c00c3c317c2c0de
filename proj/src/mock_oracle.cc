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

#include "synret/mock_oracle.h"

#include <sstream>

#include "synret/rng.h"
#include "synret/text.h"

namespace synret {

namespace {

constexpr int kRandomProbes = 64;

std::vector<std::string> SplitWhitespace(std::string_view s) {
  std::vector<std::string> words;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

const std::string& Slot(const PromptSlots& slots, const char* name) {
  auto it = slots.find(name);
  if (it == slots.end()) {
    throw LlmError(std::string("mock oracle: prompt lacks {") + name + "}");
  }
  return it->second;
}

}  // namespace

std::vector<std::string> MockOracleConfig::Validate() const {
  std::vector<std::string> errors;
  if (!(hallucination_rate >= 0 && hallucination_rate <= 1)) {
    errors.push_back("mock.hallucination_rate must be in [0, 1]");
  }
  if (!(verify_overlap_threshold >= 0 && verify_overlap_threshold <= 1)) {
    errors.push_back("mock.verify_overlap_threshold must be in [0, 1]");
  }
  return errors;
}

MockOracle::MockOracle(MockOracleConfig config, const Dataset& dataset,
                       PromptLibrary library)
    : config_(config), dataset_(dataset), library_(std::move(library)) {
  if (auto errors = config_.Validate(); !errors.empty()) {
    throw std::invalid_argument(errors.front());
  }
  const auto& queries = dataset_.queries.queries();
  for (size_t i = 0; i < queries.size(); ++i) {
    query_by_text_.emplace(queries[i].text, i);
  }
  for (size_t i = 0; i < dataset_.corpus.size(); ++i) {
    passage_by_text_.emplace(dataset_.corpus.at(i).Text(), i);
  }
}

uint64_t MockOracle::total_calls() const {
  uint64_t n = 0;
  for (const auto& c : calls_) n += c.load();
  return n;
}

std::string MockOracle::Complete(const CompletionRequest& request) {
  auto parsed = library_.Parse(request.prompt);
  if (!parsed) throw LlmError("mock oracle: unrecognized prompt");
  if (parsed->first != request.kind) {
    throw LlmError("mock oracle: prompt is a " +
                   std::string(PromptKindName(parsed->first)) +
                   " template, request says " +
                   std::string(PromptKindName(request.kind)));
  }
  return Respond(request.kind, request.prompt);
}

std::string MockOracle::Respond(PromptKind kind, std::string_view prompt) const {
  auto parsed = library_.Parse(prompt);
  if (!parsed || parsed->first != kind) {
    throw LlmError("mock oracle: prompt does not match the " +
                   std::string(PromptKindName(kind)) + " template");
  }
  calls_[static_cast<size_t>(kind)].fetch_add(1);
  const PromptSlots& slots = parsed->second;
  switch (kind) {
    case PromptKind::kCot:
      return Cot(slots);
    case PromptKind::kPositive:
      return Positive(prompt, slots);
    case PromptKind::kNegative:
      return Negative(prompt, slots);
    case PromptKind::kRelabel:
      return Relabel(slots);
    case PromptKind::kCompare:
      return Compare(slots);
  }
  throw LlmError("mock oracle: unknown prompt kind");
}

const Query& MockOracle::FindQuery(std::string_view text) const {
  auto it = query_by_text_.find(text);
  if (it == query_by_text_.end()) {
    throw LlmError("mock oracle: unknown question '" + std::string(text) + "'");
  }
  return dataset_.queries.queries()[it->second];
}

const Passage& MockOracle::Gold(const Query& query) const {
  auto gold = dataset_.qrels.BestPassage(query.id);
  if (!gold) {
    throw LlmError("mock oracle: query '" + query.id + "' has no gold passage");
  }
  return dataset_.corpus.Get(*gold);
}

const Passage& MockOracle::FindPassage(std::string_view text) const {
  auto it = passage_by_text_.find(text);
  if (it == passage_by_text_.end()) {
    throw LlmError("mock oracle: passage text not in corpus");
  }
  return dataset_.corpus.at(it->second);
}

std::string MockOracle::UnrelatedBody(const Query& query,
                                      uint64_t stream_seed) const {
  const auto& gold_words = WordSet(Gold(query).body);
  const auto& judged = dataset_.qrels.ForQuery(query.id);
  auto acceptable = [&](const Passage& p) {
    return !judged.count(p.id) &&
           Jaccard(WordSet(p.body), gold_words) < config_.verify_overlap_threshold;
  };
  Rng rng(stream_seed);
  const size_t n = dataset_.corpus.size();
  for (int probe = 0; probe < kRandomProbes; ++probe) {
    const auto& p = dataset_.corpus.at(rng.Index(n));
    if (acceptable(p)) return p.body;
  }
  const size_t start = rng.Index(n);
  for (size_t k = 0; k < n; ++k) {
    const auto& p = dataset_.corpus.at((start + k) % n);
    if (acceptable(p)) return p.body;
  }
  std::ostringstream os;
  os << "unrelated filler passage " << std::hex << rng.NextU64();
  return os.str();
}

bool MockOracle::PlantsHallucination(std::string_view query_text) const {
  const std::string prompt = library_.Render(
      PromptKind::kPositive, {{"question", std::string(query_text)}});
  Rng rng(DeriveSeed(config_.seed, "positive:" + prompt));
  return rng.Bernoulli(config_.hallucination_rate);
}

std::string MockOracle::Cot(const PromptSlots& slots) const {
  const std::string& question = Slot(slots, "question");
  const auto tokens = WordTokens(question);
  if (tokens.empty()) return question;
  const size_t half = (tokens.size() + 1) / 2;
  std::vector<std::string> first(tokens.begin(), tokens.begin() + half);
  std::vector<std::string> second(tokens.begin() + half, tokens.end());
  if (second.empty()) second = first;
  return question + " First, what does " + Join(first, " ") +
         " refer to? Second, how does " + Join(second, " ") +
         " relate to the question?";
}

std::string MockOracle::Positive(std::string_view prompt,
                                 const PromptSlots& slots) const {
  const Query& query = FindQuery(Slot(slots, "question"));
  Rng rng(DeriveSeed(config_.seed, "positive:" + std::string(prompt)));
  if (rng.Bernoulli(config_.hallucination_rate)) {
    return UnrelatedBody(query, rng.NextU64());
  }
  const Passage& gold = Gold(query);
  const auto words = SplitWhitespace(gold.body);
  std::vector<std::string> kept;
  for (const auto& w : words) {
    if (!rng.Bernoulli(kMockDropoutRate)) kept.push_back(w);
  }
  if (kept.empty()) kept.push_back(words.front());
  std::string text = Join(kept, " ");
  if (Jaccard(WordSet(text), WordSet(gold.body)) <
      config_.verify_overlap_threshold) {
    text = gold.body;
  }
  return text;
}

std::string MockOracle::Negative(std::string_view prompt,
                                 const PromptSlots& slots) const {
  const Query& query = FindQuery(Slot(slots, "question"));
  const uint64_t stream =
      DeriveSeed(config_.seed, "negative:" + std::string(prompt));
  return Join(WordTokens(query.text), " ") + " " + UnrelatedBody(query, stream);
}

std::string MockOracle::Relabel(const PromptSlots& slots) const {
  const Query& query = FindQuery(Slot(slots, "question"));
  const double overlap =
      Jaccard(WordSet(Slot(slots, "passage")), WordSet(Gold(query).body));
  return overlap >= config_.verify_overlap_threshold ? "yes" : "no";
}

std::string MockOracle::Compare(const PromptSlots& slots) const {
  const Query& query = FindQuery(Slot(slots, "question"));
  const Passage& p1 = FindPassage(Slot(slots, "passage1"));
  const Passage& p2 = FindPassage(Slot(slots, "passage2"));
  const int g1 = dataset_.qrels.Grade(query.id, p1.id);
  const int g2 = dataset_.qrels.Grade(query.id, p2.id);
  bool first_wins;
  if (g1 != g2) {
    first_wins = g1 > g2;
  } else {
    const auto q_words = WordSet(query.text);
    auto overlap = [&](const Passage& p) {
      size_t n = 0;
      const auto words = WordSet(p.Text());
      for (const auto& w : q_words) n += words.count(w);
      return n;
    };
    const size_t o1 = overlap(p1), o2 = overlap(p2);
    first_wins = o1 != o2 ? o1 > o2 : p1.id < p2.id;
  }
  return first_wins ? "Passage #1" : "Passage #2";
}

}  // namespace synret
