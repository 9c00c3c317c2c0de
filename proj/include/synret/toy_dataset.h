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

// Deterministic synthetic retrieval dataset.
//
// Every concept has two surface forms: a document word and a query word.
// A passage is a topic concept, two specific concepts and filler words,
// all in document form; a query asks for one passage using the query forms
// of its concepts. Query and passage vocabularies are disjoint, so a
// retriever only does better than chance once it has learned the mapping.
//
// Grades: 3 for the passage a query was written for, 2 for other passages of
// its topic sharing a specific concept, 1 for the rest of the topic. Test
// queries only use concepts that also occur in training queries.

#ifndef SYNRET_TOY_DATASET_H_
#define SYNRET_TOY_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "synret/data_model.h"

namespace synret {

struct ToyDatasetConfig {
  int num_topics = 20;
  int passages_per_topic = 10;
  int num_specific = 30;
  int num_train_queries = 50;
  int num_test_queries = 20;
  int fillers_per_passage = 4;
  int filler_pool = 120;
  uint64_t seed = 20250101;
};

struct ToyDataset {
  Corpus corpus;
  std::vector<Query> queries;  // train queries first, then test
  Qrels train;
  Qrels test;

  // Corpus and all queries with the qrels of `split` ("train" or "test").
  Dataset Split(const std::string& split) const;
};

// Throws std::invalid_argument when the configuration cannot be satisfied.
ToyDataset MakeToyDataset(const ToyDatasetConfig& config = {});

// Writes corpus.jsonl, queries.jsonl, qrels/train.tsv and qrels/test.tsv.
void WriteToyDataset(const ToyDataset& data, const std::filesystem::path& dir);

}  // namespace synret

#endif  // SYNRET_TOY_DATASET_H_
