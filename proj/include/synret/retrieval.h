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

#ifndef SYNRET_RETRIEVAL_H_
#define SYNRET_RETRIEVAL_H_

#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "synret/data_model.h"
#include "synret/encoder.h"

namespace synret {

// Exact index: one unit-norm row per passage, in corpus order.
struct DenseIndex {
  std::vector<std::string> ids;
  RowMajorMatrix embeddings;
  std::string model_fingerprint;
};

DenseIndex BuildIndex(const EncoderModel& model, const Corpus& corpus);

struct RankedEntry {
  std::string passage_id;
  double score = 0;

  bool operator==(const RankedEntry&) const = default;
};

// Descending score; equal scores ordered by ascending passage id.
struct RankedList {
  std::string query_id;
  std::vector<RankedEntry> entries;

  size_t k() const { return entries.size(); }
};

// Brute-force top-k by s_tau. Throws std::invalid_argument when k is 0 or
// exceeds the index size.
RankedList RetrieveTopK(const DenseIndex& index, const EncoderModel& model,
                        const Query& query, size_t k);

struct NdcgResult {
  double value = 0;
  // The query has no passage with grade >= 1.
  bool no_relevant = false;
};

// Gain 2^grade - 1, discount log2(rank + 1). Requires k <= ranked.k().
NdcgResult NdcgAtK(const RankedList& ranked, const Qrels& qrels, size_t k);

struct QueryEval {
  std::string query_id;
  std::vector<double> ndcg;  // parallel to EvalReport::ks
  bool no_relevant = false;
};

struct EvalReport {
  std::vector<size_t> ks;
  std::vector<QueryEval> per_query;
  std::vector<double> macro;
  size_t flagged_queries = 0;

  size_t query_count() const { return per_query.size(); }
  // Macro nDCG at `k`; throws if `k` was not evaluated.
  double Macro(size_t k) const;
};

inline const std::vector<size_t> kDefaultEvalKs = {1, 3, 5, 10};

// Evaluates every query judged in `dataset.qrels`. Throws when there is none.
EvalReport Evaluate(const EncoderModel& model, const Dataset& dataset,
                    const std::vector<size_t>& ks = kDefaultEvalKs);

// `query_id,ndcg@1,...` rows then a `__macro__` row.
void WriteReportCsv(const EvalReport& report, std::ostream& out);
void WriteReportCsv(const EvalReport& report,
                    const std::filesystem::path& path);
void PrintReportTable(const EvalReport& report, std::ostream& out);

}  // namespace synret

#endif  // SYNRET_RETRIEVAL_H_
