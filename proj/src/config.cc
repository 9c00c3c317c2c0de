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

#include "synret/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "synret/data_model.h"
#include "synret/text.h"

namespace synret {

namespace fs = std::filesystem;

namespace {

bool ParseInt(const std::string& s, int64_t* out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, *out);
  return ec == std::errc() && ptr == end;
}

bool ParseUint(const std::string& s, uint64_t* out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    begin += 2;
    base = 16;
  }
  auto [ptr, ec] = std::from_chars(begin, end, *out, base);
  return ec == std::errc() && ptr == end && begin != end;
}

bool ParseDouble(const std::string& s, double* out) {
  std::istringstream in(s);
  in >> *out;
  return !in.fail() && in.eof();
}

using Setter = std::function<bool(PipelineConfig&, const std::string&)>;

Setter Int(std::function<void(PipelineConfig&, int64_t)> set) {
  return [set](PipelineConfig& c, const std::string& v) {
    int64_t x;
    if (!ParseInt(v, &x)) return false;
    set(c, x);
    return true;
  };
}

Setter Uint(std::function<void(PipelineConfig&, uint64_t)> set) {
  return [set](PipelineConfig& c, const std::string& v) {
    uint64_t x;
    if (!ParseUint(v, &x)) return false;
    set(c, x);
    return true;
  };
}

Setter Real(std::function<void(PipelineConfig&, double)> set) {
  return [set](PipelineConfig& c, const std::string& v) {
    double x;
    if (!ParseDouble(v, &x)) return false;
    set(c, x);
    return true;
  };
}

Setter Text(std::function<void(PipelineConfig&, const std::string&)> set) {
  return [set](PipelineConfig& c, const std::string& v) {
    set(c, v);
    return true;
  };
}

const std::map<std::string, Setter>& Setters() {
  static const auto* table = new std::map<std::string, Setter>{
      {"pipeline.dataset",
       Text([](auto& c, const auto& v) { c.dataset_dir = v; })},
      {"pipeline.prompts",
       Text([](auto& c, const auto& v) { c.prompts_dir = v; })},
      {"pipeline.output", Text([](auto& c, const auto& v) { c.output_dir = v; })},
      {"pipeline.split", Text([](auto& c, const auto& v) { c.split = v; })},
      {"pipeline.seed", Uint([](auto& c, uint64_t v) { c.seed = v; })},

      {"endpoint.base_url",
       Text([](auto& c, const auto& v) { c.endpoint.base_url = v; })},
      {"endpoint.model",
       Text([](auto& c, const auto& v) { c.endpoint.model_name = v; })},
      {"endpoint.api_key_env",
       Text([](auto& c, const auto& v) { c.endpoint.api_key_env = v; })},
      {"endpoint.request_timeout",
       Real([](auto& c, double v) { c.endpoint.request_timeout = v; })},
      {"endpoint.max_retries",
       Int([](auto& c, int64_t v) { c.endpoint.max_retries = static_cast<int>(v); })},
      {"endpoint.temperature",
       Real([](auto& c, double v) { c.endpoint.sampling_temperature = v; })},

      {"encoder.dim",
       Int([](auto& c, int64_t v) { c.stage1.encoder.dim = static_cast<int>(v); })},
      {"encoder.vocab_buckets",
       Uint([](auto& c, uint64_t v) { c.stage1.encoder.vocab_buckets = v; })},
      {"encoder.tau", Real([](auto& c, double v) { c.stage1.encoder.tau = v; })},
      {"encoder.hash_seed",
       Uint([](auto& c, uint64_t v) { c.stage1.encoder.hash_seed = v; })},

      {"synthesis.parallelism",
       Int([](auto& c, int64_t v) { c.synthesis_parallelism = static_cast<int>(v); })},
      {"synthesis.max_failure_ratio",
       Real([](auto& c, double v) { c.max_failure_ratio = v; })},

      {"mock.hallucination_rate",
       Real([](auto& c, double v) { c.mock.hallucination_rate = v; })},
      {"mock.verify_overlap_threshold",
       Real([](auto& c, double v) { c.mock.verify_overlap_threshold = v; })},

      {"stage1.batch_size",
       Int([](auto& c, int64_t v) { c.stage1.batch_size = static_cast<int>(v); })},
      {"stage1.learning_rate",
       Real([](auto& c, double v) { c.stage1.learning_rate = v; })},
      {"stage1.epochs",
       Int([](auto& c, int64_t v) { c.stage1.epochs = static_cast<int>(v); })},
      {"stage1.warmup_steps",
       Int([](auto& c, int64_t v) { c.stage1.warmup_steps = v; })},
      {"stage1.weight_decay",
       Real([](auto& c, double v) { c.stage1.weight_decay = v; })},
      {"stage1.lr_schedule",
       Text([](auto& c, const auto& v) { c.stage1.lr_schedule = v; })},

      {"stage2.k", Int([](auto& c, int64_t v) { c.stage2.top_k = static_cast<int>(v); })},
      {"stage2.n",
       Int([](auto& c, int64_t v) { c.stage2.num_pairs = static_cast<int>(v); })},
      {"stage2.batch_size",
       Int([](auto& c, int64_t v) { c.stage2.batch_size = static_cast<int>(v); })},
      {"stage2.learning_rate",
       Real([](auto& c, double v) { c.stage2.learning_rate = v; })},
      {"stage2.epochs",
       Int([](auto& c, int64_t v) { c.stage2.epochs = static_cast<int>(v); })},
      {"stage2.warmup_steps",
       Int([](auto& c, int64_t v) { c.stage2.warmup_steps = v; })},
      {"stage2.weight_decay",
       Real([](auto& c, double v) { c.stage2.weight_decay = v; })},
      {"stage2.loss",
       [](PipelineConfig& c, const std::string& v) {
         auto kind = ParseAlignLoss(v);
         if (!kind) return false;
         c.stage2.loss = *kind;
         return true;
       }},
      {"stage2.max_skip_ratio",
       Real([](auto& c, double v) { c.stage2.max_skip_ratio = v; })},
      {"stage2.parallelism",
       Int([](auto& c, int64_t v) { c.stage2.parallelism = static_cast<int>(v); })},
  };
  return *table;
}

}  // namespace

void PipelineConfig::PropagateSeed() {
  mock.seed = seed;
  stage1.seed = seed;
  stage2.seed = seed;
}

std::vector<std::string> PipelineConfig::Validate(bool check_paths) const {
  std::vector<std::string> errors;
  auto append = [&](std::vector<std::string> more) {
    errors.insert(errors.end(), more.begin(), more.end());
  };
  if (check_paths) {
    if (dataset_dir.empty()) {
      errors.push_back("pipeline.dataset is required");
    } else if (!fs::is_directory(dataset_dir)) {
      errors.push_back("pipeline.dataset: no such directory " +
                       dataset_dir.string());
    }
    if (!fs::is_directory(prompts_dir)) {
      errors.push_back("pipeline.prompts: no such directory " +
                       prompts_dir.string());
    }
  }
  if (split.empty()) errors.push_back("pipeline.split must be set");
  append(endpoint.Validate());
  if (synthesis_parallelism < 1) {
    errors.push_back("synthesis.parallelism must be >= 1");
  }
  if (!(max_failure_ratio >= 0 && max_failure_ratio <= 1)) {
    errors.push_back("synthesis.max_failure_ratio must be in [0, 1]");
  }
  append(mock.Validate());
  append(stage1.Validate());
  append(stage2.Validate());
  return errors;
}

ConfigEntries ParseConfigText(const std::string& text,
                              const std::string& source) {
  ConfigEntries entries;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ParseError(source, line_no, "malformed section header");
      }
      section = std::string(Trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(source, line_no, "expected key = value");
    }
    const std::string key(Trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError(source, line_no, "empty key");
    if (section.empty()) {
      throw ParseError(source, line_no, "key '" + key + "' outside a section");
    }
    entries.emplace_back(section + "." + key,
                         std::string(Trim(line.substr(eq + 1))));
  }
  return entries;
}

ConfigEntries LoadConfigFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseConfigText(buf.str(), path.string());
}

std::vector<std::string> ApplyConfig(const ConfigEntries& entries,
                                     PipelineConfig* config) {
  std::vector<std::string> errors;
  const auto& setters = Setters();
  for (const auto& [key, value] : entries) {
    auto it = setters.find(key);
    if (it == setters.end()) {
      errors.push_back("unknown config key '" + key + "'");
    } else if (!it->second(*config, value)) {
      errors.push_back("invalid value '" + value + "' for " + key);
    }
  }
  return errors;
}

std::vector<std::string> KnownConfigKeys() {
  std::vector<std::string> keys;
  for (const auto& [key, _] : Setters()) keys.push_back(key);
  return keys;
}

}  // namespace synret
