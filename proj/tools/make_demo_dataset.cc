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

// Regenerates the bundled demo dataset: make_demo_dataset [out_dir]

#include <iostream>

#include "synret/cli.h"
#include "synret/toy_dataset.h"

int main(int argc, char** argv) {
  const std::filesystem::path dir =
      argc > 1 ? std::filesystem::path(argv[1]) : synret::DefaultDemoDir();
  try {
    const auto data = synret::MakeToyDataset();
    synret::WriteToyDataset(data, dir);
    std::cout << "wrote " << data.corpus.size() << " passages and "
              << data.queries.size() << " queries to " << dir.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
