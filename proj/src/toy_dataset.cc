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

#include "synret/toy_dataset.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "synret/rng.h"
#include "synret/text.h"

namespace synret {

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

const std::vector<std::string> kQueryOpeners = {
    "what is", "explain", "describe", "tell me about", "how does", "define"};

// Pronounceable pseudo-words, unique across every call on the same object.
class WordMaker {
 public:
  explicit WordMaker(uint64_t seed) : rng_(seed) {}

  std::string Make(int syllables) {
    for (;;) {
      std::string w;
      for (int s = 0; s < syllables; ++s) {
        w += kConsonants[rng_.Index(kConsonants.size())];
        w += kVowels[rng_.Index(kVowels.size())];
      }
      if (used_.insert(w).second) return w;
    }
  }

 private:
  Rng rng_;
  std::set<std::string> used_;
};

std::string PaddedId(char prefix, size_t i, size_t count) {
  const size_t width = std::max<size_t>(3, std::to_string(count).size());
  std::string digits = std::to_string(i);
  return std::string(1, prefix) + std::string(width - digits.size(), '0') +
         digits;
}

struct Concept {
  std::string doc;
  std::string query;
};

struct PassagePlan {
  int topic;
  int spec_a;
  int spec_b;
};

}  // namespace

Dataset ToyDataset::Split(const std::string& split) const {
  if (split != "train" && split != "test") {
    throw std::invalid_argument("toy dataset split must be train or test");
  }
  return Dataset{corpus, QuerySet(queries), split == "train" ? train : test};
}

ToyDataset MakeToyDataset(const ToyDatasetConfig& config) {
  const int n_passages = config.num_topics * config.passages_per_topic;
  const int max_pairs = config.num_specific * (config.num_specific - 1) / 2;
  if (config.num_topics < 1 || config.passages_per_topic < 1 ||
      config.num_specific < 2 || config.passages_per_topic > max_pairs) {
    throw std::invalid_argument("toy dataset: not enough specific concepts");
  }
  if (config.num_train_queries < 0 || config.num_test_queries < 0 ||
      config.num_train_queries + config.num_test_queries > n_passages) {
    throw std::invalid_argument("toy dataset: more queries than passages");
  }
  if (config.filler_pool < 1 || config.fillers_per_passage < 0) {
    throw std::invalid_argument("toy dataset: bad filler settings");
  }

  WordMaker words(DeriveSeed(config.seed, "toy-words"));
  auto make_concepts = [&](int n) {
    std::vector<Concept> out;
    for (int i = 0; i < n; ++i) out.push_back({words.Make(3), words.Make(2)});
    return out;
  };
  const auto topics = make_concepts(config.num_topics);
  const auto specifics = make_concepts(config.num_specific);
  std::vector<std::string> fillers;
  for (int i = 0; i < config.filler_pool; ++i) fillers.push_back(words.Make(3));

  Rng rng(DeriveSeed(config.seed, "toy-layout"));
  std::vector<std::pair<int, int>> all_pairs;
  for (int a = 0; a < config.num_specific; ++a) {
    for (int b = a + 1; b < config.num_specific; ++b) all_pairs.emplace_back(a, b);
  }

  std::vector<PassagePlan> plans;
  std::vector<Passage> passages;
  for (int t = 0; t < config.num_topics; ++t) {
    auto pairs = all_pairs;
    rng.Shuffle(pairs);
    for (int j = 0; j < config.passages_per_topic; ++j) {
      const PassagePlan plan{t, pairs[j].first, pairs[j].second};
      std::vector<std::string> body = {topics[t].doc, specifics[plan.spec_a].doc,
                                       specifics[plan.spec_b].doc};
      for (int f = 0; f < config.fillers_per_passage; ++f) {
        body.push_back(fillers[rng.Index(fillers.size())]);
      }
      rng.Shuffle(body);
      Passage p;
      p.id = PaddedId('d', plans.size(), n_passages);
      p.title = topics[t].doc;
      p.body = Join(body, " ");
      plans.push_back(plan);
      passages.push_back(std::move(p));
    }
  }

  // Training targets first: a seeded order over passages.
  std::vector<int> order(n_passages);
  std::iota(order.begin(), order.end(), 0);
  rng.Shuffle(order);
  std::vector<int> train_targets(order.begin(),
                                 order.begin() + config.num_train_queries);
  std::set<int> seen_topics, seen_specifics;
  for (int p : train_targets) {
    seen_topics.insert(plans[p].topic);
    seen_specifics.insert(plans[p].spec_a);
    seen_specifics.insert(plans[p].spec_b);
  }
  std::vector<int> test_targets;
  for (size_t i = config.num_train_queries;
       i < order.size() &&
       static_cast<int>(test_targets.size()) < config.num_test_queries;
       ++i) {
    const auto& plan = plans[order[i]];
    if (seen_topics.count(plan.topic) && seen_specifics.count(plan.spec_a) &&
        seen_specifics.count(plan.spec_b)) {
      test_targets.push_back(order[i]);
    }
  }
  if (static_cast<int>(test_targets.size()) < config.num_test_queries) {
    throw std::invalid_argument(
        "toy dataset: too few test targets covered by training concepts");
  }

  ToyDataset data;
  const size_t n_queries = train_targets.size() + test_targets.size();
  auto add_query = [&](int target, Qrels& qrels) {
    const auto& plan = plans[target];
    Query q;
    q.id = PaddedId('q', data.queries.size(), n_queries);
    std::vector<std::string> terms = {topics[plan.topic].query,
                                      specifics[plan.spec_a].query,
                                      specifics[plan.spec_b].query};
    rng.Shuffle(terms);
    q.text = kQueryOpeners[rng.Index(kQueryOpeners.size())] + " " +
             Join(terms, " ");
    for (int p = 0; p < n_passages; ++p) {
      const auto& other = plans[p];
      if (other.topic != plan.topic) continue;
      const bool shares =
          other.spec_a == plan.spec_a || other.spec_a == plan.spec_b ||
          other.spec_b == plan.spec_a || other.spec_b == plan.spec_b;
      qrels.Set(q.id, passages[p].id, p == target ? 3 : (shares ? 2 : 1));
    }
    data.queries.push_back(std::move(q));
  };
  for (int t : train_targets) add_query(t, data.train);
  for (int t : test_targets) add_query(t, data.test);
  data.corpus = Corpus(std::move(passages));
  return data;
}

void WriteToyDataset(const ToyDataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "qrels");
  WriteCorpus(data.corpus, dir / "corpus.jsonl");
  WriteQueries(data.queries, dir / "queries.jsonl");
  WriteQrels(data.train, dir / "qrels" / "train.tsv");
  WriteQrels(data.test, dir / "qrels" / "test.tsv");
}

}  // namespace synret
