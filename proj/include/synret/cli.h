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

// The `synret` command line: ingest, synth, distill, align, eval, demo.
// Exit status 0 on success, 1 on a usage or validation error, 2 on a
// runtime failure.

#ifndef SYNRET_CLI_H_
#define SYNRET_CLI_H_

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "synret/config.h"
#include "synret/retrieval.h"
#include "synret/synthesis.h"

namespace synret {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// `args` excludes the program name.
int RunCommand(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err);

std::filesystem::path DefaultDemoDir();

// Settings the demo uses for `seed` on the bundled dataset.
PipelineConfig DemoConfig(uint64_t seed);

struct DemoResult {
  size_t passages = 0;
  size_t train_queries = 0;
  size_t test_queries = 0;
  SynthesisSummary synthesis;
  int comparisons = 0;
  int skipped = 0;
  size_t triples = 0;
  EvalReport random_init;
  EvalReport distilled;
  EvalReport aligned_pl;
  EvalReport aligned_bt;
};

// Full offline loop with the mock oracle: synthesize, distill, collect
// preferences, align with both losses, evaluate every model on the test
// split. Intermediate files go to `work_dir`.
DemoResult RunDemo(const PipelineConfig& config,
                   const std::filesystem::path& work_dir);

void PrintDemoTable(const DemoResult& result, uint64_t seed, std::ostream& out);

}  // namespace synret

#endif  // SYNRET_CLI_H_
