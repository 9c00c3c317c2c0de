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

#include "synret/encoder.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include <gtest/gtest.h>

#include "synret/rng.h"
#include "test_util.h"

namespace synret {
namespace {

using testing::NumericGradient;
using testing::RelativeError;

EncoderConfig SmallConfig(int dim = 4, uint64_t buckets = 16) {
  EncoderConfig c;
  c.dim = dim;
  c.vocab_buckets = buckets;
  return c;
}

TEST(Tokenize, CaseFolding) {
  EXPECT_EQ(Tokenize("The cat", 1024), Tokenize("the CAT", 1024));
  EXPECT_EQ(Tokenize("the, cat!", 1024), Tokenize("the cat", 1024));
}

TEST(Tokenize, EmptyTextMapsToReservedBucket) {
  EXPECT_EQ(Tokenize("", 1024).buckets, std::vector<uint32_t>{0});
  EXPECT_EQ(Tokenize("  ,;  ", 1024).buckets, std::vector<uint32_t>{0});
}

TEST(Tokenize, DeterministicAndInRange) {
  const std::string text = "a quick brown fox jumps over the lazy dog 42";
  const auto a = Tokenize(text, 97);
  EXPECT_EQ(a, Tokenize(text, 97));
  EXPECT_EQ(a.buckets.size(), 10u);
  for (uint32_t b : a.buckets) {
    EXPECT_GE(b, 1u);
    EXPECT_LT(b, 97u);
  }
  EXPECT_TRUE(std::is_sorted(a.buckets.begin(), a.buckets.end()));
  EXPECT_NE(Tokenize(text, 1 << 15, 1).buckets,
            Tokenize(text, 1 << 15, 2).buckets);
}

TEST(Encode, SingletonRowIsNormalized) {
  RowMajorMatrix table = RowMajorMatrix::Zero(8, 4);
  table.row(5) << 3, 4, 0, 0;
  EncoderModel model(SmallConfig(4, 8), table);
  const Vector v = Encode(model, TokenBag{{5}});
  EXPECT_NEAR(v(0), 0.6, 1e-15);
  EXPECT_NEAR(v(1), 0.8, 1e-15);
  EXPECT_EQ(v(2), 0.0);
  EXPECT_EQ(v(3), 0.0);
}

TEST(Encode, DegenerateMeanGivesFirstBasisVector) {
  RowMajorMatrix table = RowMajorMatrix::Zero(8, 4);
  table.row(1) << 1, 2, 3, 4;
  table.row(2) << -1, -2, -3, -4;
  EncoderModel model(SmallConfig(4, 8), table);
  const Vector v = Encode(model, TokenBag{{1, 2}});
  EXPECT_EQ(v, Vector::Unit(4, 0));
  RowGradient grad(4);
  EncodeBackward(model, TokenBag{{1, 2}}, Vector::Ones(4), grad);
  EXPECT_TRUE(grad.empty() || grad.MaxAbs() == 0.0);
}

TEST(Encode, UnitNormForRandomModels) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    EncoderModel model(SmallConfig(2 + static_cast<int>(rng.Index(30)), 64),
                       rng.NextU64());
    TokenBag bag;
    const int n = 1 + static_cast<int>(rng.Index(12));
    for (int k = 0; k < n; ++k) bag.buckets.push_back(rng.Index(64));
    std::sort(bag.buckets.begin(), bag.buckets.end());
    const Vector v = Encode(model, bag);
    EXPECT_NEAR(v.norm(), 1.0, 1e-9);
    EXPECT_EQ(v, Encode(model, bag));
  }
}

TEST(Encode, InitializationRange) {
  EncoderModel model(SmallConfig(8, 128), 99);
  EXPECT_LE(model.embeddings().cwiseAbs().maxCoeff(), 0.5 / 8);
  EXPECT_EQ(model, EncoderModel(SmallConfig(8, 128), 99));
  EXPECT_FALSE(model == EncoderModel(SmallConfig(8, 128), 100));
}

TEST(Encode, RejectsBadConfig) {
  EXPECT_THROW(EncoderModel(SmallConfig(1, 16), 0), std::invalid_argument);
  EncoderConfig c = SmallConfig();
  c.tau = 0;
  EXPECT_THROW(EncoderModel(c, 0), std::invalid_argument);
  EXPECT_THROW(EncoderModel(SmallConfig(4, 16), RowMajorMatrix::Zero(15, 4)),
               std::invalid_argument);
}

TEST(Similarity, FixedValues) {
  EncoderConfig c = SmallConfig();
  c.tau = 0.05;
  EncoderModel model(c, 0);
  const Vector a = Vector::Unit(4, 0);
  const Vector b = Vector::Unit(4, 1);
  EXPECT_DOUBLE_EQ(Similarity(model, a, a), 20.0);
  EXPECT_EQ(Similarity(model, a, b), 0.0);
  EXPECT_DOUBLE_EQ(Similarity(model, a, Vector(-a)), -20.0);
}

TEST(Similarity, Symmetric) {
  Rng rng(5);
  EncoderModel model(SmallConfig(16, 64), 5);
  for (int i = 0; i < 20; ++i) {
    const Vector a = EncodeText(model, "text " + std::to_string(rng.NextU64()));
    const Vector b = EncodeText(model, "other " + std::to_string(rng.NextU64()));
    EXPECT_EQ(Similarity(model, a, b), Similarity(model, b, a));
  }
}

// Gradient of c . Encode(bag) with respect to the touched rows, by finite
// differences over the flattened rows.
void CheckEncodeGradient(const EncoderModel& base, const TokenBag& bag,
                         const Vector& c) {
  const RowGradient analytic = EncodeBackward(base, bag, c);
  std::vector<uint32_t> rows(bag.buckets.begin(), bag.buckets.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  const int dim = base.dim();
  Vector x(rows.size() * dim);
  for (size_t r = 0; r < rows.size(); ++r) {
    x.segment(r * dim, dim) = base.embeddings().row(rows[r]).transpose();
  }
  auto f = [&](const Vector& params) {
    EncoderModel m = base;
    for (size_t r = 0; r < rows.size(); ++r) {
      m.mutable_embeddings().row(rows[r]) = params.segment(r * dim, dim);
    }
    return c.dot(Encode(m, bag));
  };
  const Vector numeric = NumericGradient(f, x);
  Vector flat(x.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    flat.segment(r * dim, dim) = analytic.Row(rows[r]);
  }
  EXPECT_LE(RelativeError(flat, numeric), 1e-6);
}

TEST(EncodeBackward, ZeroUpstreamGivesZeroGradient) {
  EncoderModel model(SmallConfig(), 1);
  const RowGradient g = EncodeBackward(model, TokenBag{{1, 2, 3}}, Vector::Zero(4));
  EXPECT_EQ(g.MaxAbs(), 0.0);
}

TEST(EncodeBackward, MatchesFiniteDifferences) {
  Rng rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = 2 + static_cast<int>(rng.Index(8));
    EncoderModel model(SmallConfig(dim, 32), rng.NextU64());
    TokenBag bag;
    const int n = 1 + static_cast<int>(rng.Index(6));
    for (int k = 0; k < n; ++k) bag.buckets.push_back(rng.Index(32));
    std::sort(bag.buckets.begin(), bag.buckets.end());
    CheckEncodeGradient(model, bag,
                        testing::RandomVector(rng, dim, -1.0, 1.0));
  }
}

TEST(EncodeBackward, RepeatedBucketAccumulates) {
  Rng rng(7);
  EncoderModel model(SmallConfig(4, 16), 7);
  const Vector c = testing::RandomVector(rng, 4, -1.0, 1.0);
  CheckEncodeGradient(model, TokenBag{{3, 3, 9}}, c);

  // Every occurrence receives the same share of the pooled gradient, so a
  // bucket seen twice gets exactly twice the gradient of one seen once.
  const RowGradient g = EncodeBackward(model, TokenBag{{3, 3, 9}}, c);
  EXPECT_LE((g.Row(3) - 2.0 * g.Row(9)).norm(), 1e-15 * g.Row(3).norm() + 1e-300);
  EXPECT_GT(g.Row(9).norm(), 0.0);

  CheckEncodeGradient(model, Tokenize(model, "alpha alpha beta"), c);
}

TEST(RowGradient, MergeScaleAndMaxAbs) {
  RowGradient a(2), b(2);
  a.Add(1, Vector::Constant(2, 1.0));
  b.Add(1, Vector::Constant(2, 2.0));
  b.Add(4, Vector::Constant(2, -3.0));
  a.Merge(b, 0.5);
  EXPECT_EQ(a.Row(1), Vector::Constant(2, 2.0));
  EXPECT_EQ(a.Row(4), Vector::Constant(2, -1.5));
  EXPECT_EQ(a.Row(9), Vector::Zero(2));
  a.Scale(2);
  EXPECT_EQ(a.MaxAbs(), 4.0);
}

TEST(Checkpoint, RoundTripIsExact) {
  testing::TempDir dir;
  EncoderConfig c = SmallConfig(6, 50);
  c.tau = 0.07;
  c.hash_seed = 1234;
  EncoderModel model(c, 77);
  SaveCheckpoint(model, dir / "m.ckpt");
  const EncoderModel back = LoadCheckpoint(dir / "m.ckpt");
  EXPECT_EQ(back, model);
  EXPECT_EQ(back.tau(), 0.07);
  EXPECT_EQ(back.hash_seed(), 1234u);
  EXPECT_EQ(SerializeCheckpoint(back), SerializeCheckpoint(model));
}

TEST(Checkpoint, LayoutHeader) {
  EncoderModel model(SmallConfig(4, 16), 1);
  const std::string bytes = SerializeCheckpoint(model);
  ASSERT_EQ(bytes.size(), 40u + 8u * 16u * 4u);
  EXPECT_EQ(bytes.substr(0, 8), "SYNRETCK");
  uint32_t version, dim;
  uint64_t buckets;
  std::memcpy(&version, bytes.data() + 8, 4);
  std::memcpy(&dim, bytes.data() + 12, 4);
  std::memcpy(&buckets, bytes.data() + 16, 8);
  EXPECT_EQ(version, kCheckpointVersion);
  EXPECT_EQ(dim, 4u);
  EXPECT_EQ(buckets, 16u);
  double first;
  std::memcpy(&first, bytes.data() + 40, 8);
  EXPECT_EQ(first, model.embeddings()(0, 0));
}

TEST(Checkpoint, RejectsCorruptInput) {
  EncoderModel model(SmallConfig(4, 16), 1);
  std::string bytes = SerializeCheckpoint(model);
  EXPECT_THROW(DeserializeCheckpoint(bytes.substr(0, bytes.size() - 1)),
               std::runtime_error);
  bytes[0] = 'X';
  EXPECT_THROW(DeserializeCheckpoint(bytes), std::runtime_error);
}

TEST(Checkpoint, FingerprintTracksParameters) {
  EncoderModel model(SmallConfig(4, 16), 1);
  const std::string fp = Fingerprint(model);
  EXPECT_EQ(fp, Fingerprint(model));
  model.mutable_embeddings()(3, 2) += 1e-12;
  EXPECT_NE(fp, Fingerprint(model));
}

}  // namespace
}  // namespace synret
