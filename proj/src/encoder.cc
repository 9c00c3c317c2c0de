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
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "synret/rng.h"
#include "synret/text.h"

namespace synret {

namespace {

void ValidateConfig(const EncoderConfig& c) {
  if (c.dim < 2) throw std::invalid_argument("encoder dim must be >= 2");
  if (c.vocab_buckets < 2) {
    throw std::invalid_argument("vocab_buckets must be >= 2");
  }
  if (!(c.tau > 0) || !std::isfinite(c.tau)) {
    throw std::invalid_argument("tau must be positive and finite");
  }
}

// Mean of the bag's rows.
Vector MeanRow(const EncoderModel& model, const TokenBag& bag) {
  Vector v = Vector::Zero(model.dim());
  for (uint32_t b : bag.buckets) v += model.embeddings().row(b).transpose();
  if (!bag.buckets.empty()) v /= static_cast<double>(bag.buckets.size());
  return v;
}

template <typename T>
void PutLe(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(buf, buf + sizeof(T));
  }
  out.append(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T GetLe(std::string_view bytes, size_t offset) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, bytes.data() + offset, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(buf, buf + sizeof(T));
  }
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

constexpr char kMagic[8] = {'S', 'Y', 'N', 'R', 'E', 'T', 'C', 'K'};
constexpr size_t kHeaderSize = 40;

}  // namespace

EncoderModel::EncoderModel(const EncoderConfig& config, uint64_t init_seed)
    : config_(config) {
  ValidateConfig(config_);
  embeddings_.resize(static_cast<Eigen::Index>(config_.vocab_buckets),
                     config_.dim);
  Rng rng(init_seed);
  const double half_width = 0.5 / config_.dim;
  double* data = embeddings_.data();
  for (Eigen::Index i = 0; i < embeddings_.size(); ++i) {
    data[i] = rng.Uniform(-half_width, half_width);
  }
}

EncoderModel::EncoderModel(const EncoderConfig& config,
                           RowMajorMatrix embeddings)
    : config_(config), embeddings_(std::move(embeddings)) {
  ValidateConfig(config_);
  if (embeddings_.rows() != static_cast<Eigen::Index>(config_.vocab_buckets) ||
      embeddings_.cols() != config_.dim) {
    throw std::invalid_argument("embedding table shape does not match config");
  }
  if (!embeddings_.allFinite()) {
    throw std::invalid_argument("embedding table has non-finite entries");
  }
}

bool EncoderModel::operator==(const EncoderModel& other) const {
  return config_.dim == other.config_.dim &&
         config_.vocab_buckets == other.config_.vocab_buckets &&
         config_.tau == other.config_.tau &&
         config_.hash_seed == other.config_.hash_seed &&
         embeddings_ == other.embeddings_;
}

TokenBag Tokenize(std::string_view text, uint64_t vocab_buckets,
                  uint64_t hash_seed) {
  TokenBag bag;
  const uint64_t basis = 0xcbf29ce484222325ULL ^ hash_seed;
  for (const auto& token : WordTokens(text)) {
    const uint64_t h = MixBits(Fnv1a(token, basis));
    bag.buckets.push_back(static_cast<uint32_t>(1 + h % (vocab_buckets - 1)));
  }
  if (bag.buckets.empty()) bag.buckets.push_back(0);
  std::sort(bag.buckets.begin(), bag.buckets.end());
  return bag;
}

Vector Encode(const EncoderModel& model, const TokenBag& bag) {
  Vector v = MeanRow(model, bag);
  const double norm = v.norm();
  if (norm < kDegenerateNorm) return Vector::Unit(model.dim(), 0);
  return v / norm;
}

void RowGradient::Merge(const RowGradient& other, double scale) {
  for (const auto& [bucket, g] : other.rows_) Add(bucket, g, scale);
}

void RowGradient::Scale(double factor) {
  for (auto& [_, g] : rows_) g *= factor;
}

Vector RowGradient::Row(uint32_t bucket) const {
  auto it = rows_.find(bucket);
  return it == rows_.end() ? Vector::Zero(dim_) : it->second;
}

double RowGradient::MaxAbs() const {
  double m = 0;
  for (const auto& [_, g] : rows_) m = std::max(m, g.cwiseAbs().maxCoeff());
  return m;
}

void EncodeBackward(const EncoderModel& model, const TokenBag& bag,
                    const Eigen::Ref<const Vector>& upstream, RowGradient& grad,
                    double scale) {
  if (upstream.size() != model.dim()) {
    throw std::invalid_argument("upstream gradient has wrong length");
  }
  const Vector v = MeanRow(model, bag);
  const double norm = v.norm();
  if (norm < kDegenerateNorm) return;
  const Vector u = v / norm;
  // d(v/|v|)/dv = (I - u u^T) / |v|
  const Vector dv = (upstream - u * u.dot(upstream)) / norm;
  const double per_token = scale / static_cast<double>(bag.buckets.size());
  for (uint32_t b : bag.buckets) grad.Add(b, dv, per_token);
}

RowGradient EncodeBackward(const EncoderModel& model, const TokenBag& bag,
                           const Eigen::Ref<const Vector>& upstream) {
  RowGradient grad(model.dim());
  EncodeBackward(model, bag, upstream, grad);
  return grad;
}

std::string SerializeCheckpoint(const EncoderModel& model) {
  std::string out;
  const auto& table = model.embeddings();
  out.reserve(kHeaderSize + sizeof(double) * table.size());
  out.append(kMagic, sizeof(kMagic));
  PutLe<uint32_t>(out, kCheckpointVersion);
  PutLe<uint32_t>(out, static_cast<uint32_t>(model.dim()));
  PutLe<uint64_t>(out, model.vocab_buckets());
  PutLe<double>(out, model.tau());
  PutLe<uint64_t>(out, model.hash_seed());
  if constexpr (std::endian::native == std::endian::little) {
    out.append(reinterpret_cast<const char*>(table.data()),
               sizeof(double) * table.size());
  } else {
    for (Eigen::Index i = 0; i < table.size(); ++i) {
      PutLe<double>(out, table.data()[i]);
    }
  }
  return out;
}

EncoderModel DeserializeCheckpoint(std::string_view bytes) {
  if (bytes.size() < kHeaderSize ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a synret checkpoint");
  }
  const auto version = GetLe<uint32_t>(bytes, 8);
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " +
                             std::to_string(version));
  }
  EncoderConfig config;
  config.dim = static_cast<int>(GetLe<uint32_t>(bytes, 12));
  config.vocab_buckets = GetLe<uint64_t>(bytes, 16);
  config.tau = GetLe<double>(bytes, 24);
  config.hash_seed = GetLe<uint64_t>(bytes, 32);
  ValidateConfig(config);
  const size_t count = config.vocab_buckets * static_cast<size_t>(config.dim);
  if (bytes.size() != kHeaderSize + count * sizeof(double)) {
    throw std::runtime_error("checkpoint size does not match its header");
  }
  RowMajorMatrix table(static_cast<Eigen::Index>(config.vocab_buckets),
                       config.dim);
  for (size_t i = 0; i < count; ++i) {
    table.data()[i] = GetLe<double>(bytes, kHeaderSize + i * sizeof(double));
  }
  return EncoderModel(config, std::move(table));
}

void SaveCheckpoint(const EncoderModel& model,
                    const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  const std::string bytes = SerializeCheckpoint(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
}

EncoderModel LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return DeserializeCheckpoint(buf.str());
}

std::string Fingerprint(const EncoderModel& model) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0')
     << Fnv1a(SerializeCheckpoint(model));
  return os.str();
}

}  // namespace synret
