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

// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "golden_prompts.h"
#include "synret/align.h"
#include "synret/cli.h"
#include "synret/distill.h"
#include "synret/losses.h"
#include "synret/mock_oracle.h"
#include "synret/prompts.h"
#include "synret/retrieval.h"
#include "synret/rng.h"
#include "synret/synthesis.h"
#include "synret/toy_dataset.h"
#include "test_util.h"

namespace synret {
namespace {

using Eigen::VectorXd;
using testing::NumericGradient;
using testing::RandomVector;
using testing::RelativeError;
using testing::TempDir;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a failed check; the first message is kept in the detail line.
  void Check(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail << "failed: " << what << "; ";
    }
  }
};

using Seconds = std::chrono::duration<double>;

bool RunCriterion(int id, const std::string& name, double time_limit_s,
                  const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << "exception: " << e.what() << "; ";
  }
  const double elapsed =
      Seconds(std::chrono::steady_clock::now() - start).count();
  if (time_limit_s > 0 && elapsed >= time_limit_s) {
    out.pass = false;
    out.detail << "over time limit of " << time_limit_s << " s; ";
  }
  std::cout << (out.pass ? "PASS" : "FAIL") << " [" << id << "] " << name
            << " (" << out.detail.str() << std::fixed << std::setprecision(2)
            << elapsed << " s)" << std::endl;
  return out.pass;
}

VectorXd RandomRewards(Rng& rng, int m) {
  VectorXd z(m);
  for (int i = 0; i < m; ++i) z(i) = std::exp(rng.Uniform(-3.0, 3.0));
  return z;
}

// Sum of full-ranking probabilities over every permutation that places
// `first` then `second` at the top.
double ExhaustiveTop2(const VectorXd& z, int first, int second) {
  std::vector<int> rest;
  for (int i = 0; i < z.size(); ++i) {
    if (i != first && i != second) rest.push_back(i);
  }
  double total = 0;
  do {
    std::vector<int> ranking = {first, second};
    ranking.insert(ranking.end(), rest.begin(), rest.end());
    total += PlBruteForceProb(z, std::span<const int>(ranking));
  } while (std::next_permutation(rest.begin(), rest.end()));
  return total;
}

void MarginalizationCriterion(Outcome& out) {
  Rng rng(101);
  double worst = 0;
  for (int m = 3; m <= 7; ++m) {
    for (int trial = 0; trial < 200; ++trial) {
      const VectorXd z = RandomRewards(rng, m);
      const int first = static_cast<int>(rng.Index(m));
      int second = static_cast<int>(rng.Index(m - 1));
      if (second >= first) ++second;
      const double err = std::abs(MarginalTop2Prob(z, first, second) -
                                  ExhaustiveTop2(z, first, second));
      worst = std::max(worst, err);
    }
  }
  out.Check(worst <= 1e-9, "closed form vs exhaustive sum");
  out.detail << "1000 vectors, max abs err " << std::scientific
             << std::setprecision(2) << worst << "; ";
}

void NormalizationCriterion(Outcome& out) {
  Rng rng(102);
  double worst = 0;
  for (int m = 1; m <= 6; ++m) {
    for (int trial = 0; trial < 100; ++trial) {
      const VectorXd z = RandomRewards(rng, m);
      std::vector<int> perm(m);
      std::iota(perm.begin(), perm.end(), 0);
      double total = 0;
      do {
        total += PlBruteForceProb(z, std::span<const int>(perm));
      } while (std::next_permutation(perm.begin(), perm.end()));
      worst = std::max(worst, std::abs(total - 1.0));
    }
  }
  out.Check(worst <= 1e-9, "permutation probabilities sum to 1");
  out.detail << "M = 1..6, 100 vectors each, max |sum - 1| " << std::scientific
             << std::setprecision(2) << worst << "; ";
}

DistillBatchScores<double> UniformDistill(int n, double value, bool relabeled) {
  DistillBatchScores<double> b;
  b.scores = Eigen::Matrix<double, Eigen::Dynamic, 4>::Constant(n, 4, value);
  b.anchor = n / 2;
  if (relabeled) b.positive_mask[kSynthPosSlot] = false;
  return b;
}

void ReductionCriterion(Outcome& out) {
  Rng rng(103);
  double worst_pl = 0, worst_bt = 0, worst_distill = 0;
  for (int trial = 0; trial < 200; ++trial) {
    AlignBatchScores<double> b;
    b.scores = Eigen::Matrix<double, 1, 2>(rng.Uniform(-20, 20),
                                           rng.Uniform(-20, 20));
    const double expected = BtLoss(b.scores(0, 0), b.scores(0, 1)).loss;
    worst_pl = std::max(worst_pl, std::abs(PartialPlLoss(b).loss - expected));

    const double r1 = rng.Uniform(-5, 5), r2 = rng.Uniform(-5, 5);
    const VectorXd z = (VectorXd(2) << std::exp(r1), std::exp(r2)).finished();
    const int ranking[] = {0, 1};
    worst_bt = std::max(worst_bt, std::abs(PlBruteForceProb(z, ranking) -
                                           BtProbability(r1, r2)));
  }
  for (int n : {1, 2, 5, 60, 100}) {
    for (double value : {-20.0, 0.0, 3.5, 20.0}) {
      const double full = DistillLoss(UniformDistill(n, value, false)).loss;
      const double relabeled = DistillLoss(UniformDistill(n, value, true)).loss;
      worst_distill = std::max(
          {worst_distill, std::abs(full + std::log(3.0 / (4.0 * n))),
           std::abs(relabeled + std::log(2.0 / (4.0 * n)))});
    }
  }
  out.Check(worst_pl <= 1e-12, "partial PL at |B| = 1 equals BT loss");
  out.Check(worst_bt <= 1e-12, "two-item PL equals BT probability");
  out.Check(worst_distill <= 1e-12, "uniform distill loss");
  out.detail << std::scientific << std::setprecision(2) << "pl-vs-bt "
             << worst_pl << ", pl2-vs-bt " << worst_bt << ", distill "
             << worst_distill << "; ";
}

VectorXd Flatten(const Eigen::MatrixXd& m) {
  return Eigen::Map<const VectorXd>(m.data(), m.size());
}

template <int Cols>
Eigen::Matrix<double, Eigen::Dynamic, Cols> Unflatten(const VectorXd& x,
                                                      Eigen::Index rows) {
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Cols>>(
      x.data(), rows, Cols);
}

std::vector<DistillExample> FdExamples(int n, bool relabel_first) {
  std::vector<DistillExample> out;
  for (int i = 0; i < n; ++i) {
    const std::string s = std::to_string(i);
    DistillExample ex;
    ex.query = {"q" + s, "question about topic " + s};
    ex.gold = {"p" + s, "Title " + s, "answer text for topic " + s};
    ex.q_cot = "question about topic " + s + " first what second why";
    ex.p_plus = "synthetic answer topic " + s;
    ex.p_minus = "question topic " + s + " unrelated filler";
    ex.relabeled = relabel_first && i == 0;
    out.push_back(std::move(ex));
  }
  return out;
}

double WholeModelError(const EncoderModel& base,
                       const std::function<BatchGradient(const EncoderModel&)>& f) {
  const auto analytic = f(base);
  const auto& table = base.embeddings();
  const VectorXd x = Eigen::Map<const VectorXd>(table.data(), table.size());
  const auto loss = [&](const VectorXd& params) {
    EncoderModel m = base;
    Eigen::Map<VectorXd>(m.mutable_embeddings().data(), params.size()) = params;
    return f(m).mean_loss;
  };
  VectorXd flat = VectorXd::Zero(x.size());
  for (const auto& [bucket, g] : analytic.grad.rows()) {
    flat.segment(bucket * base.dim(), base.dim()) = g;
  }
  return RelativeError(flat, NumericGradient(loss, x));
}

using VectorXld = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

template <int Cols>
Eigen::Matrix<long double, Eigen::Dynamic, Cols> UnflattenLd(const VectorXld& x,
                                                             Eigen::Index rows) {
  return Eigen::Map<const Eigen::Matrix<long double, Eigen::Dynamic, Cols>>(
      x.data(), rows, Cols);
}

// Central differences evaluated in extended precision.
VectorXd CentralDifferences(
    const std::function<long double(const VectorXld&)>& f, const VectorXd& x) {
  constexpr long double h = 1e-6L;
  VectorXld xp = x.cast<long double>();
  VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const long double orig = xp(i);
    xp(i) = orig + h;
    const long double fp = f(xp);
    xp(i) = orig - h;
    const long double fm = f(xp);
    xp(i) = orig;
    g(i) = static_cast<double>((fp - fm) / (2 * h));
  }
  return g;
}

void GradientCriterion(Outcome& out) {
  Rng rng(104);
  double worst_loss = 0;
  auto track = [&](const VectorXd& analytic, const VectorXd& numeric) {
    worst_loss = std::max(worst_loss, RelativeError(analytic, numeric));
  };
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.Index(6));

    const VectorXd scores = RandomVector(rng, 4 * n, -8, 8);
    const auto pos = static_cast<Eigen::Index>(rng.Index(4 * n));
    track(InfoNceLoss(scores, pos).grad,
          CentralDifferences(
              [&](const VectorXld& x) { return InfoNceLoss(x, pos).loss; }, scores));

    DistillBatchScores<double> d;
    d.scores = Unflatten<4>(RandomVector(rng, 4 * n, -8, 8), n);
    d.anchor = static_cast<Eigen::Index>(rng.Index(n));
    d.positive_mask[kSynthPosSlot] = rng.Bernoulli(0.5);
    track(Flatten(DistillLoss(d).grad),
          CentralDifferences(
              [&](const VectorXld& x) {
                DistillBatchScores<long double> b;
                b.scores = UnflattenLd<4>(x, n);
                b.anchor = d.anchor;
                b.positive_mask = d.positive_mask;
                return DistillLoss(b).loss;
              },
              Flatten(d.scores)));

    AlignBatchScores<double> a;
    a.scores = Unflatten<2>(RandomVector(rng, 2 * n, -8, 8), n);
    a.anchor = static_cast<Eigen::Index>(rng.Index(n));
    auto align_ld = [&](const VectorXld& x) {
      AlignBatchScores<long double> b;
      b.scores = UnflattenLd<2>(x, n);
      b.anchor = a.anchor;
      return b;
    };
    track(Flatten(PartialPlLoss(a).grad),
          CentralDifferences(
              [&](const VectorXld& x) { return PartialPlLoss(align_ld(x)).loss; },
              Flatten(a.scores)));
    track(Flatten(BtAnchorLoss(a).grad),
          CentralDifferences(
              [&](const VectorXld& x) { return BtAnchorLoss(align_ld(x)).loss; },
              Flatten(a.scores)));

    const VectorXd pair = RandomVector(rng, 2, -8, 8);
    const auto bt = BtLoss(pair(0), pair(1));
    track((VectorXd(2) << bt.d_win, bt.d_lose).finished(),
          CentralDifferences(
              [](const VectorXld& x) { return BtLoss(x(0), x(1)).loss; }, pair));
  }

  EncoderConfig ec;
  ec.dim = 4;
  ec.vocab_buckets = 32;
  ec.tau = 0.5;
  double worst_model = 0;
  const Dataset tiny = testing::TinyDataset();
  const std::vector<PreferenceTriple> triples = {{"q1", "p1", "p6", 2, 1},
                                                 {"q2", "p2", "p1", 2, 1},
                                                 {"q3", "p5", "p4", 1, 2}};
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const EncoderModel model(ec, seed);
    for (bool relabel : {false, true}) {
      const auto encoded = TokenizeExamples(model, FdExamples(3, relabel));
      worst_model = std::max(worst_model, WholeModelError(model, [&](const auto& m) {
                               return DistillLossAndGradient(m, encoded, {0, 1, 2});
                             }));
    }
    const auto encoded = TokenizeTriples(model, tiny, triples);
    for (auto kind : {AlignLossKind::kPartialPl, AlignLossKind::kBt}) {
      worst_model = std::max(worst_model, WholeModelError(model, [&](const auto& m) {
                               return AlignLossAndGradient(m, encoded, {0, 1, 2}, kind);
                             }));
    }
  }
  out.Check(worst_loss <= 1e-8, "similarity-level gradients");
  out.Check(worst_model <= 1e-5, "whole-model gradients");
  out.detail << std::scientific << std::setprecision(2)
             << "similarity-level max rel err " << worst_loss
             << ", whole-model max rel err " << worst_model << "; ";
}

void NdcgCriterion(Outcome& out) {
  Qrels qrels;
  qrels.Set("q", "gold", 1);
  RankedList ranked{"q", {{"x", 2.0}, {"gold", 1.0}}};
  const double second = NdcgAtK(ranked, qrels, 2).value;
  out.Check(std::abs(second - 0.6309) <= 1e-4, "gold at rank 2");
  qrels.Set("q", "y", 2);
  RankedList perfect{"q", {{"y", 3.0}, {"gold", 2.0}, {"x", 1.0}}};
  out.Check(NdcgAtK(perfect, qrels, 3).value == 1.0, "perfect ranking");

  Rng rng(105);
  EncoderConfig ec;
  ec.dim = 4;
  ec.vocab_buckets = 64;
  int agree = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.Index(40));
    std::vector<Passage> passages;
    for (int i = 0; i < n; ++i) {
      std::string body;
      const int len = 1 + static_cast<int>(rng.Index(5));
      for (int w = 0; w < len; ++w) {
        body += "w" + std::to_string(rng.Index(15)) + " ";
      }
      passages.push_back({"p" + std::to_string(i), "", body});
    }
    const Corpus corpus(std::move(passages));
    const EncoderModel model(ec, rng.NextU64());
    const DenseIndex index = BuildIndex(model, corpus);
    const Query q{"q", "w" + std::to_string(rng.Index(15)) + " w" +
                           std::to_string(rng.Index(15))};
    const size_t k = 1 + rng.Index(n);
    const auto top = RetrieveTopK(index, model, q, k);
    const Vector scores =
        index.embeddings * EncodeText(model, q.text) / model.tau();
    std::vector<std::pair<double, std::string>> all;
    for (size_t i = 0; i < corpus.size(); ++i) {
      all.emplace_back(-scores(static_cast<Eigen::Index>(i)), corpus.at(i).id);
    }
    std::sort(all.begin(), all.end());
    bool same = top.k() == k;
    for (size_t r = 0; same && r < k; ++r) {
      same = top.entries[r].passage_id == all[r].second;
    }
    agree += same;
  }
  out.Check(agree == 100, "top-K vs full sort");
  out.detail << "rank-2 nDCG@2 " << std::setprecision(4) << second
             << ", top-K agreement " << agree << "/100; ";
}

void DemoCriterion(Outcome& out) {
  TempDir dir;
  const PipelineConfig config = DemoConfig(7);
  const DemoResult r = RunDemo(config, dir.path());
  const double random = r.random_init.Macro(10);
  const double distilled = r.distilled.Macro(10);
  const double aligned = r.aligned_pl.Macro(10);
  out.Check(r.passages == 200 && r.train_queries == 50 && r.test_queries == 20,
            "demo dataset shape");
  out.Check(random < distilled, "random-init < distilled");
  out.Check(distilled < aligned, "distilled < aligned");
  out.Check(distilled >= random + 0.20, "distilled >= random-init + 0.20");
  out.detail << std::fixed << std::setprecision(4) << "nDCG@10 random-init "
             << random << ", distilled " << distilled << ", aligned (partial-pl) "
             << aligned << "; ";
}

void RelabelCriterion(Outcome& out) {
  ToyDatasetConfig tc;
  tc.num_topics = 100;
  tc.num_train_queries = 1000;
  tc.num_test_queries = 0;
  const Dataset train = MakeToyDataset(tc).Split("train");
  MockOracleConfig mc;
  mc.hallucination_rate = 0.15;
  mc.seed = 7;
  MockOracle oracle(mc, train);
  TempDir dir;
  SynthesisOptions options;
  options.clock = [] { return std::string(kFixedTimestamp); };
  const auto summary =
      RunSynthesis(oracle, oracle.library(), train, dir / "records.jsonl", options);
  const auto records = ReadRecords(dir / "records.jsonl");
  out.Check(records.size() == 1000, "1000 records");
  out.Check(summary.relabeled >= 100 && summary.relabeled <= 200,
            "relabeled count in [100, 200]");

  const auto examples = JoinExamples(train, records);
  EncoderModel model(EncoderConfig{}, 7);
  const auto encoded = TokenizeExamples(model, examples);
  constexpr size_t kBatch = 50;
  size_t relabeled_seen = 0, bad = 0;
  for (size_t start = 0; start < examples.size(); start += kBatch) {
    Batch batch;
    for (size_t i = start; i < std::min(start + kBatch, examples.size()); ++i) {
      batch.push_back(i);
    }
    DistillLossAndGradient(
        model, encoded, batch,
        [&](const DistillBatchScores<double>& s,
            const DistillLossResult<double>& r) {
          const bool relabeled = examples[batch[s.anchor]].relabeled;
          const int expected_num = relabeled ? 2 : 3;
          const int expected_den = static_cast<int>(4 * batch.size());
          relabeled_seen += relabeled;
          bad += r.numerator_terms != expected_num ||
                 r.denominator_terms != expected_den ||
                 s.scores.cols() != 4 ||
                 s.scores.rows() != static_cast<Eigen::Index>(batch.size());
        });
  }
  out.Check(relabeled_seen == static_cast<size_t>(summary.relabeled),
            "every relabeled record instrumented");
  out.Check(bad == 0, "2 numerator terms and 4|B| denominator terms");
  out.detail << summary.relabeled << " of " << records.size()
             << " relabeled, " << relabeled_seen
             << " relabeled anchors instrumented, " << bad << " mismatches; ";
}

void PairSamplingCriterion(Outcome& out) {
  auto unordered = [](const std::vector<std::pair<int, int>>& pairs) {
    std::set<std::pair<int, int>> s;
    for (auto [a, b] : pairs) s.emplace(std::min(a, b), std::max(a, b));
    return s;
  };
  std::set<std::pair<int, int>> all;
  for (int a = 0; a < 5; ++a) {
    for (int b = a + 1; b < 5; ++b) all.emplace(a, b);
  }
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const auto full = SamplePairIndices(5, 10, seed);
    out.Check(full.size() == 10 && unordered(full) == all,
              "K=5, N=10 gives all pairs");
    const auto five = SamplePairIndices(5, 5, seed);
    out.Check(five.size() == 5 && unordered(five).size() == 5,
              "K=5, N=5 gives 5 distinct pairs");
    out.Check(five == SamplePairIndices(5, 5, seed), "seeded reproducibility");
  }
  out.detail << "20 seeds; ";
}

void AblationCriterion(Outcome& out) {
  const PipelineConfig config = DemoConfig(7);
  const Dataset train = LoadDatasetDir(config.dataset_dir, "train").dataset;
  const Dataset test = LoadDatasetDir(config.dataset_dir, "test").dataset;
  TempDir dir;
  MockOracle oracle(config.mock, train);
  SynthesisOptions options;
  options.clock = [] { return std::string(kFixedTimestamp); };
  RunSynthesis(oracle, oracle.library(), train, dir / "records.jsonl", options);
  const auto distilled =
      TrainDistill(train, ReadRecords(dir / "records.jsonl"), config.stage1);
  const auto prefs = CollectPreferences(oracle, oracle.library(),
                                        distilled.model, train, config.stage2,
                                        dir / "comparisons.jsonl");

  struct Run {
    std::vector<std::string> triples;
    std::vector<Batch> batches;
    double ndcg10 = 0;
  };
  auto run = [&](AlignLossKind loss) {
    AlignConfig c = config.stage2;
    c.loss = loss;
    Run r;
    const auto encoded = TokenizeTriples(distilled.model, train, prefs.triples);
    for (const auto& t : prefs.triples) {
      r.triples.push_back(t.query_id + "|" + t.winner_id + "|" + t.loser_id);
    }
    const auto result =
        TrainAlign(distilled.model, train, prefs.triples, c, std::nullopt,
                   [&](int64_t, const Batch& b) { r.batches.push_back(b); });
    r.ndcg10 = Evaluate(result.model, test).Macro(10);
    return r;
  };
  const Run bt = run(AlignLossKind::kBt);
  const Run pl = run(AlignLossKind::kPartialPl);
  out.Check(!bt.triples.empty() && bt.triples == pl.triples, "identical triples");
  out.Check(!bt.batches.empty() && bt.batches == pl.batches, "identical batches");
  out.detail << prefs.triples.size() << " triples, " << bt.batches.size()
             << " batches; nDCG@10 bt " << std::fixed << std::setprecision(4)
             << bt.ndcg10 << ", partial-pl " << pl.ndcg10 << "; ";
}

std::string_view GoldenTail(PromptKind kind) {
  switch (kind) {
    case PromptKind::kCot:
      return testing::kGoldenCotTail;
    case PromptKind::kPositive:
      return testing::kGoldenPositiveTail;
    case PromptKind::kNegative:
      return testing::kGoldenNegativeTail;
    case PromptKind::kRelabel:
      return testing::kGoldenRelabelTail;
    case PromptKind::kCompare:
      return testing::kGoldenCompareTail;
  }
  return {};
}

void TemplateCriterion(Outcome& out) {
  const PromptLibrary shipped = PromptLibrary::Load(DefaultPromptsDir());
  for (PromptKind kind : kAllPromptKinds) {
    const std::string golden =
        std::string(testing::kGoldenPersona) + std::string(GoldenTail(kind));
    const std::string file =
        testing::ReadFile(DefaultPromptsDir() / TemplateFileName(kind));
    out.Check(file == golden, std::string(PromptKindName(kind)) + " file");
    out.Check(shipped.Template(kind) == golden,
              std::string(PromptKindName(kind)) + " loaded template");
    out.Check(PromptLibrary::Default().Template(kind) == golden,
              std::string(PromptKindName(kind)) + " built-in template");
  }
  out.detail << kAllPromptKinds.size() << " templates; ";
}

}  // namespace
}  // namespace synret

int main() {
  using namespace synret;
  int failures = 0;
  auto run = [&](int id, const std::string& name, double limit,
                 void (*body)(Outcome&)) {
    failures += !RunCriterion(id, name, limit, body);
  };
  run(1, "marginal top-2 probability equals exhaustive permutation sum", 10,
      MarginalizationCriterion);
  run(2, "Plackett-Luce ranking probabilities sum to one", 0,
      NormalizationCriterion);
  run(3, "loss reduction identities", 0, ReductionCriterion);
  run(4, "gradients match central finite differences", 30, GradientCriterion);
  run(5, "nDCG oracle and exact top-K", 0, NdcgCriterion);
  run(6, "closed-loop demo improves random-init -> distilled -> aligned", 300,
      DemoCriterion);
  run(7, "relabel pipeline rate and loss instrumentation", 0, RelabelCriterion);
  run(8, "pair sampling defaults", 0, PairSamplingCriterion);
  run(9, "bt and partial-pl ablation parity", 0, AblationCriterion);
  run(10, "prompt templates byte-match golden wording", 0, TemplateCriterion);
  std::cout << (failures == 0 ? "all criteria passed"
                              : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
