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

#include "synret/data_model.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "synret/text.h"

namespace synret {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string FormatParseError(const std::string& file, size_t line,
                             const std::string& what) {
  std::ostringstream os;
  os << file;
  if (line > 0) os << ":" << line;
  os << ": " << what;
  return os.str();
}

std::ifstream OpenForRead(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream OpenForWrite(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void CloseOrThrow(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

// Calls `fn(object, line_number)` for every non-blank line of a JSONL file.
void ForEachJsonLine(const fs::path& path,
                     const std::function<void(const json&, size_t)>& fn) {
  auto in = OpenForRead(path);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(path.string(), line_no,
                       std::string("malformed record: ") + e.what());
    }
    if (!obj.is_object()) {
      throw ParseError(path.string(), line_no, "record is not an object");
    }
    try {
      fn(obj, line_no);
    } catch (const json::exception& e) {
      throw ParseError(path.string(), line_no,
                       std::string("bad field: ") + e.what());
    }
  }
}

std::string RequireString(const json& obj, const char* key,
                          const fs::path& path, size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(path.string(), line,
                     std::string("missing field '") + key + "'");
  }
  if (!it->is_string()) {
    throw ParseError(path.string(), line,
                     std::string("field '") + key + "' is not a string");
  }
  return it->get<std::string>();
}

template <typename T>
void WriteJsonLines(const std::vector<T>& items, const fs::path& path,
                    const std::function<json(const T&)>& to_json) {
  auto out = OpenForWrite(path);
  for (const auto& item : items) out << to_json(item).dump() << '\n';
  CloseOrThrow(out, path);
}

}  // namespace

ParseError::ParseError(const std::string& file, size_t line,
                       const std::string& what)
    : std::runtime_error(FormatParseError(file, line, what)), line_(line) {}

std::string Passage::Text() const {
  if (title.empty()) return body;
  return title + " " + body;
}

Corpus::Corpus(std::vector<Passage> passages) : passages_(std::move(passages)) {
  std::sort(passages_.begin(), passages_.end(),
            [](const Passage& a, const Passage& b) { return a.id < b.id; });
  for (size_t i = 0; i < passages_.size(); ++i) {
    const auto& p = passages_[i];
    if (p.id.empty()) throw ValidationError("passage with empty id");
    if (Trim(p.body).empty()) {
      throw ValidationError("passage '" + p.id + "' has an empty body");
    }
    if (!id_lookup_.emplace(p.id, i).second) {
      throw ValidationError("duplicate passage id '" + p.id + "'");
    }
  }
}

std::optional<size_t> Corpus::Find(std::string_view id) const {
  auto it = id_lookup_.find(id);
  if (it == id_lookup_.end()) return std::nullopt;
  return it->second;
}

const Passage& Corpus::Get(std::string_view id) const {
  auto idx = Find(id);
  if (!idx) throw std::out_of_range("unknown passage id '" + std::string(id) + "'");
  return passages_[*idx];
}

QuerySet::QuerySet(std::vector<Query> queries) : queries_(std::move(queries)) {
  for (size_t i = 0; i < queries_.size(); ++i) {
    const auto& q = queries_[i];
    if (q.id.empty()) throw ValidationError("query with empty id");
    if (Trim(q.text).empty()) {
      throw ValidationError("query '" + q.id + "' has empty text");
    }
    if (!id_lookup_.emplace(q.id, i).second) {
      throw ValidationError("duplicate query id '" + q.id + "'");
    }
  }
}

std::optional<size_t> QuerySet::Find(std::string_view id) const {
  auto it = id_lookup_.find(id);
  if (it == id_lookup_.end()) return std::nullopt;
  return it->second;
}

const Query& QuerySet::Get(std::string_view id) const {
  auto idx = Find(id);
  if (!idx) throw std::out_of_range("unknown query id '" + std::string(id) + "'");
  return queries_[*idx];
}

void Qrels::Set(const std::string& query_id, const std::string& passage_id,
                int grade) {
  if (grade < 0) {
    throw ValidationError("negative relevance grade for (" + query_id + ", " +
                          passage_id + ")");
  }
  judgments_[query_id][passage_id] = grade;
}

int Qrels::Grade(std::string_view query_id, std::string_view passage_id) const {
  auto q = judgments_.find(query_id);
  if (q == judgments_.end()) return 0;
  auto p = q->second.find(passage_id);
  return p == q->second.end() ? 0 : p->second;
}

const std::map<std::string, int, std::less<>>& Qrels::ForQuery(
    std::string_view query_id) const {
  static const std::map<std::string, int, std::less<>> kEmpty;
  auto q = judgments_.find(query_id);
  return q == judgments_.end() ? kEmpty : q->second;
}

std::vector<std::string> Qrels::QueryIds() const {
  std::vector<std::string> ids;
  ids.reserve(judgments_.size());
  for (const auto& [id, _] : judgments_) ids.push_back(id);
  return ids;
}

std::optional<std::string> Qrels::BestPassage(std::string_view query_id) const {
  std::optional<std::string> best;
  int best_grade = 0;
  // Map iteration is ascending by id, so strict '>' keeps the smallest id.
  for (const auto& [pid, grade] : ForQuery(query_id)) {
    if (grade > best_grade) {
      best_grade = grade;
      best = pid;
    }
  }
  return best;
}

size_t Qrels::size() const {
  size_t n = 0;
  for (const auto& [_, m] : judgments_) n += m.size();
  return n;
}

std::vector<Query> Dataset::JudgedQueries() const {
  std::vector<Query> out;
  for (const auto& q : queries) {
    if (!qrels.ForQuery(q.id).empty()) out.push_back(q);
  }
  return out;
}

namespace {

Corpus ReadCorpus(const fs::path& path) {
  std::vector<Passage> passages;
  std::set<std::string> seen;
  ForEachJsonLine(path, [&](const json& obj, size_t line) {
    Passage p;
    p.id = RequireString(obj, "_id", path, line);
    if (auto it = obj.find("title"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw ParseError(path.string(), line, "field 'title' is not a string");
      }
      p.title = it->get<std::string>();
    }
    p.body = RequireString(obj, "text", path, line);
    if (p.id.empty()) throw ParseError(path.string(), line, "empty _id");
    if (Trim(p.body).empty()) {
      throw ParseError(path.string(), line, "empty passage text");
    }
    if (!seen.insert(p.id).second) {
      throw ParseError(path.string(), line, "duplicate _id '" + p.id + "'");
    }
    passages.push_back(std::move(p));
  });
  return Corpus(std::move(passages));
}

QuerySet ReadQueries(const fs::path& path) {
  std::vector<Query> queries;
  std::set<std::string> seen;
  ForEachJsonLine(path, [&](const json& obj, size_t line) {
    Query q;
    q.id = RequireString(obj, "_id", path, line);
    q.text = RequireString(obj, "text", path, line);
    if (q.id.empty()) throw ParseError(path.string(), line, "empty _id");
    if (Trim(q.text).empty()) {
      throw ParseError(path.string(), line, "empty query text");
    }
    if (!seen.insert(q.id).second) {
      throw ParseError(path.string(), line, "duplicate _id '" + q.id + "'");
    }
    queries.push_back(std::move(q));
  });
  return QuerySet(std::move(queries));
}

std::vector<std::string> SplitTabs(std::string_view line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    fields.emplace_back(Trim(line.substr(start, tab - start)));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

Qrels ReadQrels(const fs::path& path) {
  auto in = OpenForRead(path);
  Qrels qrels;
  std::string line;
  size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto fields = SplitTabs(line);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "query-id" ||
          fields[1] != "corpus-id" || fields[2] != "score") {
        throw ParseError(path.string(), line_no,
                         "expected header 'query-id<TAB>corpus-id<TAB>score'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      throw ParseError(path.string(), line_no,
                       "expected 3 tab-separated fields");
    }
    int grade = 0;
    const auto& s = fields[2];
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), grade);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ParseError(path.string(), line_no, "score is not an integer");
    }
    if (grade < 0) {
      throw ParseError(path.string(), line_no, "negative score");
    }
    qrels.Set(fields[0], fields[1], grade);
  }
  if (!header_seen) throw ParseError(path.string(), 0, "empty qrels file");
  return qrels;
}

}  // namespace

LoadResult LoadDataset(const fs::path& corpus_path, const fs::path& queries_path,
                       const fs::path& qrels_path, const LoadOptions& options) {
  for (const auto* p : {&corpus_path, &queries_path, &qrels_path}) {
    if (!fs::exists(*p)) throw std::runtime_error("missing file " + p->string());
  }
  LoadResult result;
  result.dataset.corpus = ReadCorpus(corpus_path);
  result.dataset.queries = ReadQueries(queries_path);
  Qrels raw = ReadQrels(qrels_path);

  std::vector<std::string> dangling;
  for (const auto& qid : raw.QueryIds()) {
    const bool query_known = result.dataset.queries.Find(qid).has_value();
    if (!query_known) dangling.push_back("query '" + qid + "'");
    for (const auto& [pid, grade] : raw.ForQuery(qid)) {
      const bool passage_known = result.dataset.corpus.Find(pid).has_value();
      if (!passage_known) dangling.push_back("passage '" + pid + "'");
      if (query_known && passage_known) result.dataset.qrels.Set(qid, pid, grade);
    }
  }
  if (!dangling.empty()) {
    if (options.strict) {
      throw ValidationError(qrels_path.string() + ": dangling id " +
                            dangling.front() + " (" +
                            std::to_string(dangling.size()) + " total)");
    }
    for (const auto& d : dangling) {
      result.warnings.push_back(qrels_path.string() + ": dangling " + d +
                                " dropped");
    }
  }
  return result;
}

LoadResult LoadDatasetDir(const fs::path& dir, const std::string& split,
                          const LoadOptions& options) {
  return LoadDataset(dir / "corpus.jsonl", dir / "queries.jsonl",
                     dir / "qrels" / (split + ".tsv"), options);
}

void WriteCorpus(const Corpus& corpus, const fs::path& path) {
  WriteJsonLines<Passage>(corpus.passages(), path, [](const Passage& p) {
    return json{{"_id", p.id}, {"title", p.title}, {"text", p.body}};
  });
}

void WriteQueries(const std::vector<Query>& queries, const fs::path& path) {
  WriteJsonLines<Query>(queries, path, [](const Query& q) {
    return json{{"_id", q.id}, {"text", q.text}};
  });
}

void WriteQrels(const Qrels& qrels, const fs::path& path) {
  auto out = OpenForWrite(path);
  out << "query-id\tcorpus-id\tscore\n";
  for (const auto& qid : qrels.QueryIds()) {
    for (const auto& [pid, grade] : qrels.ForQuery(qid)) {
      out << qid << '\t' << pid << '\t' << grade << '\n';
    }
  }
  CloseOrThrow(out, path);
}

void WriteRecords(const std::vector<SynthesisRecord>& records,
                  const fs::path& path) {
  for (const auto& r : records) {
    if (r.q_cot.empty() || r.p_plus.empty() || r.p_minus.empty()) {
      throw ValidationError("synthesis record for query '" + r.query_id +
                            "' has an empty text field");
    }
  }
  WriteJsonLines<SynthesisRecord>(records, path, [](const SynthesisRecord& r) {
    return json{{"query_id", r.query_id},   {"q_cot", r.q_cot},
                {"p_plus", r.p_plus},       {"p_minus", r.p_minus},
                {"relabeled", r.relabeled}, {"llm_model", r.llm_model},
                {"created_at", r.created_at}};
  });
}

std::vector<SynthesisRecord> ReadRecords(const fs::path& path) {
  std::vector<SynthesisRecord> records;
  ForEachJsonLine(path, [&](const json& obj, size_t line) {
    SynthesisRecord r;
    r.query_id = RequireString(obj, "query_id", path, line);
    r.q_cot = RequireString(obj, "q_cot", path, line);
    r.p_plus = RequireString(obj, "p_plus", path, line);
    r.p_minus = RequireString(obj, "p_minus", path, line);
    auto rel = obj.find("relabeled");
    if (rel == obj.end() || !rel->is_boolean()) {
      throw ParseError(path.string(), line, "field 'relabeled' missing or not a boolean");
    }
    r.relabeled = rel->get<bool>();
    r.llm_model = RequireString(obj, "llm_model", path, line);
    r.created_at = RequireString(obj, "created_at", path, line);
    if (r.q_cot.empty() || r.p_plus.empty() || r.p_minus.empty()) {
      throw ParseError(path.string(), line, "empty synthesized text");
    }
    records.push_back(std::move(r));
  });
  return records;
}

void WriteTriples(const std::vector<PreferenceTriple>& triples,
                  const fs::path& path) {
  WriteJsonLines<PreferenceTriple>(triples, path, [](const PreferenceTriple& t) {
    return json{{"query_id", t.query_id},
                {"winner_id", t.winner_id},
                {"loser_id", t.loser_id},
                {"winner_rank", t.winner_rank},
                {"loser_rank", t.loser_rank}};
  });
}

std::vector<PreferenceTriple> ReadTriples(const fs::path& path) {
  std::vector<PreferenceTriple> triples;
  ForEachJsonLine(path, [&](const json& obj, size_t line) {
    PreferenceTriple t;
    t.query_id = RequireString(obj, "query_id", path, line);
    t.winner_id = RequireString(obj, "winner_id", path, line);
    t.loser_id = RequireString(obj, "loser_id", path, line);
    t.winner_rank = obj.at("winner_rank").get<int>();
    t.loser_rank = obj.at("loser_rank").get<int>();
    if (t.winner_id == t.loser_id) {
      throw ParseError(path.string(), line, "winner_id equals loser_id");
    }
    if (t.winner_rank < 1 || t.loser_rank < 1) {
      throw ParseError(path.string(), line, "ranks must be >= 1");
    }
    triples.push_back(std::move(t));
  });
  return triples;
}

void WriteComparisonLog(const std::vector<ComparisonLogEntry>& entries,
                        const fs::path& path) {
  WriteJsonLines<ComparisonLogEntry>(
      entries, path, [](const ComparisonLogEntry& e) {
        return json{{"query_id", e.query_id},     {"slot1_id", e.slot1_id},
                    {"slot2_id", e.slot2_id},     {"raw_answer", e.raw_answer},
                    {"winner_id", e.winner_id},   {"skipped", e.skipped}};
      });
}

std::vector<ComparisonLogEntry> ReadComparisonLog(const fs::path& path) {
  std::vector<ComparisonLogEntry> entries;
  ForEachJsonLine(path, [&](const json& obj, size_t line) {
    ComparisonLogEntry e;
    e.query_id = RequireString(obj, "query_id", path, line);
    e.slot1_id = RequireString(obj, "slot1_id", path, line);
    e.slot2_id = RequireString(obj, "slot2_id", path, line);
    e.raw_answer = RequireString(obj, "raw_answer", path, line);
    e.winner_id = RequireString(obj, "winner_id", path, line);
    e.skipped = obj.at("skipped").get<bool>();
    if (!e.skipped && e.winner_id != e.slot1_id && e.winner_id != e.slot2_id) {
      throw ParseError(path.string(), line, "winner_id is neither slot");
    }
    entries.push_back(std::move(e));
  });
  return entries;
}

}  // namespace synret
