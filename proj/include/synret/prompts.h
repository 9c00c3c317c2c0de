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

#ifndef SYNRET_PROMPTS_H_
#define SYNRET_PROMPTS_H_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace synret {

enum class PromptKind { kCot, kPositive, kNegative, kRelabel, kCompare };

inline constexpr std::array<PromptKind, 5> kAllPromptKinds = {
    PromptKind::kCot, PromptKind::kPositive, PromptKind::kNegative,
    PromptKind::kRelabel, PromptKind::kCompare};

std::string_view PromptKindName(PromptKind kind);
// "<name>.txt"
std::string TemplateFileName(PromptKind kind);

// Generation kinds sample at 0.7, judgment kinds at 0.0.
double DefaultTemperature(PromptKind kind);

class PromptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using PromptSlots = std::map<std::string, std::string, std::less<>>;

// Placeholders are `{name}` with name in {question, passage, passage1,
// passage2}.
class PromptLibrary {
 public:
  // Reads one template file per kind from `dir`.
  static PromptLibrary Load(const std::filesystem::path& dir);
  // Loads the templates shipped with the repository.
  static PromptLibrary Default();

  const std::string& Template(PromptKind kind) const;

  // Byte-exact substitution. Throws PromptError naming the placeholder when
  // a binding is missing or a binding has no placeholder in the template.
  std::string Render(PromptKind kind, const PromptSlots& slots) const;

  // Recovers the kind and slot values of a prompt produced by Render.
  std::optional<std::pair<PromptKind, PromptSlots>> Parse(
      std::string_view prompt) const;

 private:
  std::array<std::string, 5> templates_;
};

std::filesystem::path DefaultPromptsDir();

}  // namespace synret

#endif  // SYNRET_PROMPTS_H_
