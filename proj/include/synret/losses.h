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

// Training objectives over similarity scores, with exact gradients with
// respect to every score slot. Everything is evaluated in log space.
//
//   InfoNCE        -log softmax(s)[pos]
//   distill        -log( sum_{active anchor positives} e^s / sum_{all 4|B|} e^s )
//   Bradley-Terry  -log( e^w / (e^w + e^l) ) = softplus(l - w)
//   partial PL     -log( e^{w_i} / sum_{2|B|} e^s
//                        * e^{l_i} / (e^{l_i} + sum_{j != i} (e^{w_j} + e^{l_j})) )
//
// The Plackett-Luce helpers work on positive reward vectors z = exp(r).

#ifndef SYNRET_LOSSES_H_
#define SYNRET_LOSSES_H_

#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace synret {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Derived>
typename Derived::Scalar LogSumExp(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  if (x.size() == 0) return -std::numeric_limits<Scalar>::infinity();
  const Scalar m = x.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((x.derived().array() - m).exp().sum());
}

// log(1 + e^x) without overflow.
template <typename Scalar>
Scalar Softplus(Scalar x) {
  return std::max(x, Scalar(0)) + std::log1p(std::exp(-std::abs(x)));
}

template <typename Scalar>
Scalar Sigmoid(Scalar x) {
  if (x >= 0) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

template <typename Scalar>
struct VectorLoss {
  Scalar loss;
  VectorX<Scalar> grad;
};

// `scores` holds every candidate; `positive` indexes the positive one.
template <typename Derived>
VectorLoss<typename Derived::Scalar> InfoNceLoss(
    const Eigen::MatrixBase<Derived>& scores, Eigen::Index positive) {
  using Scalar = typename Derived::Scalar;
  if (positive < 0 || positive >= scores.size()) {
    throw std::invalid_argument("InfoNceLoss: positive index out of range");
  }
  const Scalar lse = LogSumExp(scores);
  VectorLoss<Scalar> out;
  out.loss = lse - scores(positive);
  out.grad = (scores.array() - lse).exp().matrix();
  out.grad(positive) -= Scalar(1);
  return out;
}

// Columns of the per-anchor score block in distill loss.
enum DistillSlot : int {
  kGoldSlot = 0,       // s(q_i, p_j)
  kSynthPosSlot = 1,   // s(q_i, p_j^+)
  kCotSlot = 2,        // s(q_i, q_j^cot)
  kSynthNegSlot = 3,   // s(q_i, p_j^-)
};

template <typename Scalar>
struct DistillBatchScores {
  // Row j holds the anchor query's similarities to example j's four texts.
  Eigen::Matrix<Scalar, Eigen::Dynamic, 4> scores;
  Eigen::Index anchor = 0;
  // Which of the anchor's own gold / synthetic positive / CoT slots count as
  // positives. Inactive slots stay in the denominator.
  std::array<bool, 3> positive_mask = {true, true, true};
};

template <typename Scalar>
struct DistillLossResult {
  Scalar loss;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 4> grad;
  int numerator_terms = 0;
  int denominator_terms = 0;
};

template <typename Scalar>
DistillLossResult<Scalar> DistillLoss(const DistillBatchScores<Scalar>& batch) {
  const auto& s = batch.scores;
  const Eigen::Index n = s.rows();
  if (batch.anchor < 0 || batch.anchor >= n) {
    throw std::invalid_argument("DistillLoss: anchor index out of range");
  }
  if (!s.allFinite()) {
    throw std::invalid_argument("DistillLoss: non-finite similarity");
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> positives(3);
  int active = 0;
  for (int k = 0; k < 3; ++k) {
    if (batch.positive_mask[k]) positives(active++) = s(batch.anchor, k);
  }
  if (active == 0) {
    throw std::invalid_argument("DistillLoss: anchor has no active positive");
  }
  const Scalar lse_num = LogSumExp(positives.head(active));
  const Scalar lse_den = LogSumExp(s);

  DistillLossResult<Scalar> out;
  out.loss = lse_den - lse_num;
  out.grad = (s.array() - lse_den).exp().matrix();
  for (int k = 0; k < 3; ++k) {
    if (batch.positive_mask[k]) {
      out.grad(batch.anchor, k) -= std::exp(s(batch.anchor, k) - lse_num);
    }
  }
  out.numerator_terms = active;
  out.denominator_terms = static_cast<int>(s.size());
  return out;
}

template <typename Scalar>
struct PairLoss {
  Scalar loss;
  Scalar d_win;
  Scalar d_lose;
};

template <typename Scalar>
PairLoss<Scalar> BtLoss(Scalar s_win, Scalar s_lose) {
  const Scalar margin = s_lose - s_win;
  const Scalar p_lose = Sigmoid(margin);
  return {Softplus(margin), -p_lose, p_lose};
}

// p(y_1 > y_2 | q) under Bradley-Terry with rewards r1, r2.
template <typename Scalar>
Scalar BtProbability(Scalar r1, Scalar r2) {
  return Sigmoid(r1 - r2);
}

inline constexpr int kMaxBruteForceItems = 9;

// Plackett-Luce probability of a full ranking: ranking[m] is the item placed
// at position m. Only meant for small oracle instances.
template <typename Derived>
typename Derived::Scalar PlBruteForceProb(const Eigen::MatrixBase<Derived>& z,
                                          std::span<const int> ranking) {
  using Scalar = typename Derived::Scalar;
  const int m = static_cast<int>(z.size());
  if (m > kMaxBruteForceItems) {
    throw std::invalid_argument("PlBruteForceProb: too many items for oracle use");
  }
  if (static_cast<int>(ranking.size()) != m) {
    throw std::invalid_argument("PlBruteForceProb: ranking length mismatch");
  }
  std::vector<bool> seen(m, false);
  for (int idx : ranking) {
    if (idx < 0 || idx >= m || seen[idx]) {
      throw std::invalid_argument("PlBruteForceProb: not a permutation");
    }
    seen[idx] = true;
  }
  if ((z.array() <= Scalar(0)).any()) {
    throw std::invalid_argument("PlBruteForceProb: rewards must be positive");
  }
  Scalar prob = 1;
  for (int pos = 0; pos < m; ++pos) {
    Scalar tail = 0;
    for (int j = pos; j < m; ++j) tail += z(ranking[j]);
    prob *= z(ranking[pos]) / tail;
  }
  return prob;
}

// Marginal probability that `first` ranks first and `second` ranks second,
// summed over every ordering of the remaining items.
template <typename Derived>
typename Derived::Scalar MarginalTop2Prob(const Eigen::MatrixBase<Derived>& z,
                                          Eigen::Index first,
                                          Eigen::Index second) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index m = z.size();
  if (m < 2) throw std::invalid_argument("MarginalTop2Prob: need >= 2 items");
  if (first < 0 || first >= m || second < 0 || second >= m) {
    throw std::invalid_argument("MarginalTop2Prob: index out of range");
  }
  if (first == second) {
    throw std::invalid_argument("MarginalTop2Prob: first == second");
  }
  if ((z.array() <= Scalar(0)).any()) {
    throw std::invalid_argument("MarginalTop2Prob: rewards must be positive");
  }
  const VectorX<Scalar> log_z = z.array().log().matrix();
  VectorX<Scalar> rest(m - 1);
  for (Eigen::Index j = 0, k = 0; j < m; ++j) {
    if (j != first) rest(k++) = log_z(j);
  }
  const Scalar log_p = log_z(first) - LogSumExp(log_z) + log_z(second) -
                       LogSumExp(rest);
  return std::exp(log_p);
}

template <typename Scalar>
struct AlignBatchScores {
  // Column 0: s(q_i, c_j^+), column 1: s(q_i, c_j^-).
  Eigen::Matrix<Scalar, Eigen::Dynamic, 2> scores;
  Eigen::Index anchor = 0;
};

template <typename Scalar>
struct AlignLossResult {
  Scalar loss;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 2> grad;
  int first_denominator_terms = 0;
  int second_denominator_terms = 0;
};

template <typename Scalar>
AlignLossResult<Scalar> PartialPlLoss(const AlignBatchScores<Scalar>& batch) {
  const auto& s = batch.scores;
  const Eigen::Index n = s.rows();
  const Eigen::Index i = batch.anchor;
  if (i < 0 || i >= n) {
    throw std::invalid_argument("PartialPlLoss: anchor index out of range");
  }
  if (!s.allFinite()) {
    throw std::invalid_argument("PartialPlLoss: non-finite similarity");
  }
  // Every slot except the anchor's winner, for the second factor, and every
  // slot except both anchor entries.
  VectorX<Scalar> rest(2 * n - 1);
  VectorX<Scalar> others(2 * n - 2);
  Eigen::Index k = 0, o = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j != i) {
      rest(k++) = s(j, 0);
      others(o++) = s(j, 0);
      others(o++) = s(j, 1);
    }
    rest(k++) = s(j, 1);
  }
  const Scalar lse_all = LogSumExp(s);
  const Scalar lse_rest = LogSumExp(rest);

  AlignLossResult<Scalar> out;
  out.loss = (lse_all - s(i, 0)) + (lse_rest - s(i, 1));
  out.grad = (s.array() - lse_all).exp().matrix();
  out.grad += (s.array() - lse_rest).exp().matrix();
  // p - 1 written as minus the complementary mass to avoid cancellation.
  // The winner is not part of the second denominator.
  out.grad(i, 0) = -std::exp(lse_rest - lse_all);
  out.grad(i, 1) = std::exp(s(i, 1) - lse_all);
  if (n > 1) out.grad(i, 1) -= std::exp(LogSumExp(others) - lse_rest);
  out.first_denominator_terms = static_cast<int>(s.size());
  out.second_denominator_terms = static_cast<int>(rest.size());
  return out;
}

// Bradley-Terry on the anchor's own pair, in the same shape as PartialPlLoss
// so the two can be swapped without touching the caller.
template <typename Scalar>
AlignLossResult<Scalar> BtAnchorLoss(const AlignBatchScores<Scalar>& batch) {
  const auto& s = batch.scores;
  const Eigen::Index i = batch.anchor;
  if (i < 0 || i >= s.rows()) {
    throw std::invalid_argument("BtAnchorLoss: anchor index out of range");
  }
  const auto pair = BtLoss(s(i, 0), s(i, 1));
  AlignLossResult<Scalar> out;
  out.loss = pair.loss;
  out.grad = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>::Zero(s.rows(), 2);
  out.grad(i, 0) = pair.d_win;
  out.grad(i, 1) = pair.d_lose;
  out.first_denominator_terms = 2;
  out.second_denominator_terms = 1;
  return out;
}

}  // namespace synret

#endif  // SYNRET_LOSSES_H_
