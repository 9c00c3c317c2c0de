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

// Domain types and BeIR-layout dataset I/O.
//
// On-disk layout of a dataset directory:
//   corpus.jsonl       {"_id": ..., "title": ..., "text": ...} per line
//   queries.jsonl      {"_id": ..., "text": ...} per line
//   qrels/<split>.tsv  header "query-id\tcorpus-id\tscore", then rows
//
// Synthesis records, preference triples and comparison logs are stored as
// newline-delimited JSON objects whose keys are the struct field names.
// Unknown keys are ignored on read.

#ifndef SYNRET_DATA_MODEL_H_
#define SYNRET_DATA_MODEL_H_

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace synret {

// Malformed input. `line` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, size_t line, const std::string& what);
  size_t line() const { return line_; }

 private:
  size_t line_;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Passage {
  std::string id;
  std::string title;
  std::string body;

  // Text fed to the encoder: title, a space, then body (body alone when the
  // title is empty).
  std::string Text() const;

  bool operator==(const Passage&) const = default;
};

struct Query {
  std::string id;
  std::string text;

  bool operator==(const Query&) const = default;
};

// Passages sorted by id, with an id -> index lookup.
class Corpus {
 public:
  Corpus() = default;
  // Sorts by id; throws ValidationError on duplicate/empty ids or a body that
  // is blank after trimming.
  explicit Corpus(std::vector<Passage> passages);

  size_t size() const { return passages_.size(); }
  const std::vector<Passage>& passages() const { return passages_; }
  const Passage& at(size_t index) const { return passages_.at(index); }
  std::optional<size_t> Find(std::string_view id) const;
  const Passage& Get(std::string_view id) const;

  auto begin() const { return passages_.begin(); }
  auto end() const { return passages_.end(); }

  bool operator==(const Corpus& other) const {
    return passages_ == other.passages_;
  }

 private:
  std::vector<Passage> passages_;
  std::map<std::string, size_t, std::less<>> id_lookup_;
};

// Queries in file order, ids unique.
class QuerySet {
 public:
  QuerySet() = default;
  explicit QuerySet(std::vector<Query> queries);

  size_t size() const { return queries_.size(); }
  const std::vector<Query>& queries() const { return queries_; }
  std::optional<size_t> Find(std::string_view id) const;
  const Query& Get(std::string_view id) const;

  auto begin() const { return queries_.begin(); }
  auto end() const { return queries_.end(); }

  bool operator==(const QuerySet& other) const {
    return queries_ == other.queries_;
  }

 private:
  std::vector<Query> queries_;
  std::map<std::string, size_t, std::less<>> id_lookup_;
};

// (query-id, passage-id) -> non-negative grade. Grade >= 1 counts as
// relevant.
class Qrels {
 public:
  void Set(const std::string& query_id, const std::string& passage_id,
           int grade);
  int Grade(std::string_view query_id, std::string_view passage_id) const;

  // Judgments for one query, keyed by passage id. Empty when unjudged.
  const std::map<std::string, int, std::less<>>& ForQuery(
      std::string_view query_id) const;

  // Judged query ids in ascending order.
  std::vector<std::string> QueryIds() const;

  // Highest-grade relevant passage, ties broken by ascending id.
  std::optional<std::string> BestPassage(std::string_view query_id) const;

  size_t size() const;
  bool operator==(const Qrels&) const = default;

 private:
  std::map<std::string, std::map<std::string, int, std::less<>>, std::less<>>
      judgments_;
};

struct Dataset {
  Corpus corpus;
  QuerySet queries;
  Qrels qrels;

  // Queries judged in `qrels`, in query-file order.
  std::vector<Query> JudgedQueries() const;

  bool operator==(const Dataset&) const = default;
};

struct LoadOptions {
  // Dangling qrels ids are errors when strict, warnings otherwise.
  bool strict = true;
};

struct LoadResult {
  Dataset dataset;
  std::vector<std::string> warnings;
};

LoadResult LoadDataset(const std::filesystem::path& corpus_path,
                       const std::filesystem::path& queries_path,
                       const std::filesystem::path& qrels_path,
                       const LoadOptions& options = {});

// Loads `<dir>/corpus.jsonl`, `<dir>/queries.jsonl`, `<dir>/qrels/<split>.tsv`.
LoadResult LoadDatasetDir(const std::filesystem::path& dir,
                          const std::string& split,
                          const LoadOptions& options = {});

// Writers for the same layout (used by the demo dataset generator).
void WriteCorpus(const Corpus& corpus, const std::filesystem::path& path);
void WriteQueries(const std::vector<Query>& queries,
                  const std::filesystem::path& path);
void WriteQrels(const Qrels& qrels, const std::filesystem::path& path);

struct SynthesisRecord {
  std::string query_id;
  std::string q_cot;
  std::string p_plus;
  std::string p_minus;
  // True when the synthetic positive was judged a hallucination; downstream
  // it is a hard negative.
  bool relabeled = false;
  std::string llm_model;
  std::string created_at;  // ISO-8601 UTC

  bool operator==(const SynthesisRecord&) const = default;
};

struct PreferenceTriple {
  std::string query_id;
  std::string winner_id;
  std::string loser_id;
  int winner_rank = 0;  // 1-based ranks in the top-K list
  int loser_rank = 0;

  bool operator==(const PreferenceTriple&) const = default;
};

struct ComparisonLogEntry {
  std::string query_id;
  std::string slot1_id;
  std::string slot2_id;
  std::string raw_answer;
  std::string winner_id;  // empty when skipped
  bool skipped = false;

  bool operator==(const ComparisonLogEntry&) const = default;
};

void WriteRecords(const std::vector<SynthesisRecord>& records,
                  const std::filesystem::path& path);
std::vector<SynthesisRecord> ReadRecords(const std::filesystem::path& path);

void WriteTriples(const std::vector<PreferenceTriple>& triples,
                  const std::filesystem::path& path);
std::vector<PreferenceTriple> ReadTriples(const std::filesystem::path& path);

void WriteComparisonLog(const std::vector<ComparisonLogEntry>& entries,
                        const std::filesystem::path& path);
std::vector<ComparisonLogEntry> ReadComparisonLog(
    const std::filesystem::path& path);

}  // namespace synret

#endif  // SYNRET_DATA_MODEL_H_
