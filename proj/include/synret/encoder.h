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

// Hashed bag-of-tokens text encoder.
//
// A text is lowercased and split on runs of non-alphanumeric ASCII. Each
// token is hashed with a seeded FNV-1a 64 followed by the splitmix64
// finalizer and mapped into buckets [1, vocab_buckets). Bucket 0 is reserved
// for empty text. The embedding of a text is the mean of its bucket rows,
// L2-normalized; a mean with norm below 1e-12 is replaced by e_0.
//
// Checkpoint layout (all integers and floats little-endian):
//   offset  size  field
//   0       8     magic "SYNRETCK"
//   8       4     format version (uint32, currently 1)
//   12      4     dim (uint32)
//   16      8     vocab_buckets (uint64)
//   24      8     tau (IEEE-754 binary64)
//   32      8     hash seed (uint64)
//   40      8*vocab_buckets*dim   embedding table, row-major binary64

#ifndef SYNRET_ENCODER_H_
#define SYNRET_ENCODER_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace synret {

inline constexpr uint64_t kDefaultHashSeed = 0x5eed5eed12345678ULL;
inline constexpr uint32_t kCheckpointVersion = 1;
inline constexpr double kDegenerateNorm = 1e-12;

using Vector = Eigen::VectorXd;
using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Multiset of bucket ids, kept sorted.
struct TokenBag {
  std::vector<uint32_t> buckets;

  bool operator==(const TokenBag&) const = default;
};

struct EncoderConfig {
  int dim = 64;
  uint64_t vocab_buckets = uint64_t{1} << 15;
  double tau = 0.05;
  uint64_t hash_seed = kDefaultHashSeed;
};

class EncoderModel {
 public:
  // Embeddings ~ uniform(-0.5/dim, +0.5/dim) drawn from `init_seed`.
  EncoderModel(const EncoderConfig& config, uint64_t init_seed);
  // Takes an explicit table; throws std::invalid_argument on a bad config.
  EncoderModel(const EncoderConfig& config, RowMajorMatrix embeddings);

  int dim() const { return config_.dim; }
  uint64_t vocab_buckets() const { return config_.vocab_buckets; }
  double tau() const { return config_.tau; }
  uint64_t hash_seed() const { return config_.hash_seed; }
  const EncoderConfig& config() const { return config_; }

  const RowMajorMatrix& embeddings() const { return embeddings_; }
  RowMajorMatrix& mutable_embeddings() { return embeddings_; }

  bool operator==(const EncoderModel& other) const;

 private:
  EncoderConfig config_;
  RowMajorMatrix embeddings_;
};

TokenBag Tokenize(std::string_view text, uint64_t vocab_buckets,
                  uint64_t hash_seed = kDefaultHashSeed);
inline TokenBag Tokenize(const EncoderModel& model, std::string_view text) {
  return Tokenize(text, model.vocab_buckets(), model.hash_seed());
}

// Unit-norm embedding of a bag.
Vector Encode(const EncoderModel& model, const TokenBag& bag);
inline Vector EncodeText(const EncoderModel& model, std::string_view text) {
  return Encode(model, Tokenize(model, text));
}

// s_tau(a, b) = (a . b) / tau for unit vectors a, b.
template <typename DerivedA, typename DerivedB>
double Similarity(const EncoderModel& model,
                  const Eigen::MatrixBase<DerivedA>& a,
                  const Eigen::MatrixBase<DerivedB>& b) {
  return a.dot(b) / model.tau();
}

// Gradient with respect to embedding rows; only touched rows are stored.
class RowGradient {
 public:
  explicit RowGradient(int dim) : dim_(dim) {}

  // row(bucket) += scale * g
  template <typename Derived>
  void Add(uint32_t bucket, const Eigen::MatrixBase<Derived>& g,
           double scale = 1.0) {
    auto [it, inserted] = rows_.try_emplace(bucket);
    if (inserted) it->second = Vector::Zero(dim_);
    it->second.noalias() += scale * g;
  }

  void Merge(const RowGradient& other, double scale = 1.0);
  void Scale(double factor);

  int dim() const { return dim_; }
  bool empty() const { return rows_.empty(); }
  const std::map<uint32_t, Vector>& rows() const { return rows_; }
  // Zero vector when the row was never touched.
  Vector Row(uint32_t bucket) const;
  double MaxAbs() const;

 private:
  int dim_;
  std::map<uint32_t, Vector> rows_;
};

// Chain rule through L2 normalization and mean pooling. `upstream` is
// dL/d(normalized embedding); contributions are accumulated into `grad`
// scaled by `scale`. A degenerate bag contributes nothing.
void EncodeBackward(const EncoderModel& model, const TokenBag& bag,
                    const Eigen::Ref<const Vector>& upstream, RowGradient& grad,
                    double scale = 1.0);
RowGradient EncodeBackward(const EncoderModel& model, const TokenBag& bag,
                           const Eigen::Ref<const Vector>& upstream);

void SaveCheckpoint(const EncoderModel& model,
                    const std::filesystem::path& path);
EncoderModel LoadCheckpoint(const std::filesystem::path& path);
std::string SerializeCheckpoint(const EncoderModel& model);
EncoderModel DeserializeCheckpoint(std::string_view bytes);

// Hex FNV-1a 64 of the checkpoint bytes.
std::string Fingerprint(const EncoderModel& model);

}  // namespace synret

#endif  // SYNRET_ENCODER_H_
