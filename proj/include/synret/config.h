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

// Pipeline configuration. Files are flat `key = value` lines grouped under
// `[section]` headers; `#` starts a comment. Keys are addressed as
// `section.key`. Values are applied over the defaults in order, so a caller
// layers file values and then command-line flags.
//
//   [pipeline]  dataset, prompts, output, split, seed
//   [endpoint]  base_url, model, api_key_env, request_timeout, max_retries,
//               temperature
//   [encoder]   dim, vocab_buckets, tau, hash_seed
//   [synthesis] parallelism, max_failure_ratio
//   [mock]      hallucination_rate, verify_overlap_threshold
//   [stage1]    batch_size, learning_rate, epochs, warmup_steps,
//               weight_decay, lr_schedule
//   [stage2]    k, n, batch_size, learning_rate, epochs, warmup_steps,
//               weight_decay, loss, max_skip_ratio, parallelism

#ifndef SYNRET_CONFIG_H_
#define SYNRET_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "synret/align.h"
#include "synret/distill.h"
#include "synret/llm_client.h"
#include "synret/mock_oracle.h"

namespace synret {

struct PipelineConfig {
  std::filesystem::path dataset_dir;
  std::filesystem::path prompts_dir = DefaultPromptsDir();
  std::filesystem::path output_dir = "out";
  std::string split = "train";
  uint64_t seed = 0;
  LlmEndpoint endpoint;
  int synthesis_parallelism = 4;
  double max_failure_ratio = 0.1;
  MockOracleConfig mock;
  TrainConfig stage1;
  AlignConfig stage2;

  // Copies `seed` into every seeded component.
  void PropagateSeed();

  // Every violated constraint. Path checks are skipped when `check_paths`
  // is false; nothing is touched on disk either way.
  std::vector<std::string> Validate(bool check_paths = true) const;
};

// (section.key, value) in file order.
using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

// Throws ParseError for a line that is neither blank, a comment, a section
// header nor `key = value`, and for a key outside any section.
ConfigEntries ParseConfigText(const std::string& text,
                              const std::string& source = "<config>");
ConfigEntries LoadConfigFile(const std::filesystem::path& path);

// Applies entries in order. Returns one message per unknown key or
// malformed value; valid entries are applied regardless.
std::vector<std::string> ApplyConfig(const ConfigEntries& entries,
                                     PipelineConfig* config);

// All known keys, for documentation and tests.
std::vector<std::string> KnownConfigKeys();

}  // namespace synret

#endif  // SYNRET_CONFIG_H_
