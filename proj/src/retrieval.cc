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

#include "synret/retrieval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace synret {

DenseIndex BuildIndex(const EncoderModel& model, const Corpus& corpus) {
  DenseIndex index;
  index.ids.reserve(corpus.size());
  index.embeddings.resize(static_cast<Eigen::Index>(corpus.size()), model.dim());
  Eigen::Index row = 0;
  for (const auto& p : corpus) {
    index.ids.push_back(p.id);
    index.embeddings.row(row++) = EncodeText(model, p.Text()).transpose();
  }
  index.model_fingerprint = Fingerprint(model);
  return index;
}

RankedList RetrieveTopK(const DenseIndex& index, const EncoderModel& model,
                        const Query& query, size_t k) {
  const size_t n = index.ids.size();
  if (k == 0) throw std::invalid_argument("k must be positive");
  if (k > n) {
    throw std::invalid_argument("k = " + std::to_string(k) +
                                " exceeds corpus size " + std::to_string(n));
  }
  const Vector q = EncodeText(model, query.text);
  const Vector scores = index.embeddings * q / model.tau();

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  auto better = [&](size_t a, size_t b) {
    if (scores(a) != scores(b)) return scores(a) > scores(b);
    return index.ids[a] < index.ids[b];
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(), better);

  RankedList ranked;
  ranked.query_id = query.id;
  ranked.entries.reserve(k);
  for (size_t r = 0; r < k; ++r) {
    ranked.entries.push_back({index.ids[order[r]], scores(order[r])});
  }
  return ranked;
}

NdcgResult NdcgAtK(const RankedList& ranked, const Qrels& qrels, size_t k) {
  if (k == 0 || k > ranked.k()) {
    throw std::invalid_argument("nDCG cutoff must be in [1, ranked length]");
  }
  auto gain = [](int grade) { return std::exp2(static_cast<double>(grade)) - 1.0; };
  auto discount = [](size_t rank) { return std::log2(static_cast<double>(rank) + 1.0); };

  std::vector<int> ideal;
  for (const auto& [_, grade] : qrels.ForQuery(ranked.query_id)) {
    if (grade > 0) ideal.push_back(grade);
  }
  if (ideal.empty()) return {0.0, true};
  std::sort(ideal.begin(), ideal.end(), std::greater<>());

  double dcg = 0;
  for (size_t r = 0; r < k; ++r) {
    dcg += gain(qrels.Grade(ranked.query_id, ranked.entries[r].passage_id)) /
           discount(r + 1);
  }
  double idcg = 0;
  for (size_t r = 0; r < std::min(k, ideal.size()); ++r) {
    idcg += gain(ideal[r]) / discount(r + 1);
  }
  return {dcg / idcg, false};
}

double EvalReport::Macro(size_t k) const {
  auto it = std::find(ks.begin(), ks.end(), k);
  if (it == ks.end()) {
    throw std::out_of_range("nDCG@" + std::to_string(k) + " not evaluated");
  }
  return macro[static_cast<size_t>(it - ks.begin())];
}

EvalReport Evaluate(const EncoderModel& model, const Dataset& dataset,
                    const std::vector<size_t>& ks) {
  if (ks.empty()) throw std::invalid_argument("no nDCG cutoffs given");
  const auto queries = dataset.JudgedQueries();
  if (queries.empty()) throw std::invalid_argument("split has no judged queries");

  const size_t depth = std::min(*std::max_element(ks.begin(), ks.end()),
                                dataset.corpus.size());
  const DenseIndex index = BuildIndex(model, dataset.corpus);

  EvalReport report;
  report.ks = ks;
  report.macro.assign(ks.size(), 0.0);
  for (const auto& q : queries) {
    const RankedList ranked = RetrieveTopK(index, model, q, depth);
    QueryEval row;
    row.query_id = q.id;
    for (size_t k : ks) {
      const auto r = NdcgAtK(ranked, dataset.qrels, std::min(k, depth));
      row.ndcg.push_back(r.value);
      row.no_relevant = r.no_relevant;
    }
    if (row.no_relevant) ++report.flagged_queries;
    for (size_t i = 0; i < ks.size(); ++i) report.macro[i] += row.ndcg[i];
    report.per_query.push_back(std::move(row));
  }
  for (double& m : report.macro) m /= static_cast<double>(queries.size());
  return report;
}

namespace {

std::string Fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

void WriteReportCsv(const EvalReport& report, std::ostream& out) {
  out << "query_id";
  for (size_t k : report.ks) out << ",ndcg@" << k;
  out << '\n';
  for (const auto& row : report.per_query) {
    out << row.query_id;
    for (double v : row.ndcg) out << ',' << Fixed(v);
    out << '\n';
  }
  out << "__macro__";
  for (double v : report.macro) out << ',' << Fixed(v);
  out << '\n';
}

void WriteReportCsv(const EvalReport& report,
                    const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::trunc);
  WriteReportCsv(report, out);
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void PrintReportTable(const EvalReport& report, std::ostream& out) {
  out << "queries: " << report.query_count();
  if (report.flagged_queries) {
    out << " (" << report.flagged_queries << " without relevant passages)";
  }
  out << '\n';
  for (size_t i = 0; i < report.ks.size(); ++i) {
    out << "  nDCG@" << report.ks[i] << (report.ks[i] < 10 ? "  " : " ")
        << Fixed(report.macro[i], 4) << '\n';
  }
}

}  // namespace synret
