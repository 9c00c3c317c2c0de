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

#include "synret/prompts.h"

#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace synret {

namespace {

constexpr std::array<std::string_view, 4> kPlaceholders = {
    "question", "passage", "passage1", "passage2"};

struct Piece {
  bool is_slot;
  std::string text;  // literal text or slot name
};

// Splits a template into alternating literals and placeholders.
std::vector<Piece> SplitTemplate(std::string_view tmpl) {
  std::vector<Piece> pieces;
  std::string literal;
  size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const size_t close = tmpl.find('}', i);
      if (close != std::string_view::npos) {
        const std::string_view name = tmpl.substr(i + 1, close - i - 1);
        bool known = false;
        for (auto p : kPlaceholders) known |= (p == name);
        if (known) {
          pieces.push_back({false, std::move(literal)});
          literal.clear();
          pieces.push_back({true, std::string(name)});
          i = close + 1;
          continue;
        }
      }
    }
    literal.push_back(tmpl[i++]);
  }
  pieces.push_back({false, std::move(literal)});
  return pieces;
}

size_t KindIndex(PromptKind kind) { return static_cast<size_t>(kind); }

}  // namespace

std::string_view PromptKindName(PromptKind kind) {
  switch (kind) {
    case PromptKind::kCot:
      return "cot";
    case PromptKind::kPositive:
      return "positive";
    case PromptKind::kNegative:
      return "negative";
    case PromptKind::kRelabel:
      return "relabel";
    case PromptKind::kCompare:
      return "compare";
  }
  return "unknown";
}

std::string TemplateFileName(PromptKind kind) {
  return std::string(PromptKindName(kind)) + ".txt";
}

double DefaultTemperature(PromptKind kind) {
  switch (kind) {
    case PromptKind::kRelabel:
    case PromptKind::kCompare:
      return 0.0;
    default:
      return 0.7;
  }
}

std::filesystem::path DefaultPromptsDir() { return SYNRET_PROMPTS_DIR; }

PromptLibrary PromptLibrary::Load(const std::filesystem::path& dir) {
  PromptLibrary lib;
  for (PromptKind kind : kAllPromptKinds) {
    const auto path = dir / TemplateFileName(kind);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PromptError("missing prompt template " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    lib.templates_[KindIndex(kind)] = buf.str();
  }
  return lib;
}

PromptLibrary PromptLibrary::Default() { return Load(DefaultPromptsDir()); }

const std::string& PromptLibrary::Template(PromptKind kind) const {
  return templates_[KindIndex(kind)];
}

std::string PromptLibrary::Render(PromptKind kind,
                                  const PromptSlots& slots) const {
  const auto pieces = SplitTemplate(Template(kind));
  std::set<std::string, std::less<>> used;
  std::string out;
  for (const auto& piece : pieces) {
    if (!piece.is_slot) {
      out += piece.text;
      continue;
    }
    auto it = slots.find(piece.text);
    if (it == slots.end()) {
      throw PromptError("no binding for placeholder {" + piece.text + "} in " +
                        std::string(PromptKindName(kind)) + " template");
    }
    used.insert(piece.text);
    out += it->second;
  }
  for (const auto& [name, _] : slots) {
    if (!used.count(name)) {
      throw PromptError("placeholder {" + name + "} does not appear in " +
                        std::string(PromptKindName(kind)) + " template");
    }
  }
  return out;
}

std::optional<std::pair<PromptKind, PromptSlots>> PromptLibrary::Parse(
    std::string_view prompt) const {
  for (PromptKind kind : kAllPromptKinds) {
    const auto pieces = SplitTemplate(Template(kind));
    PromptSlots slots;
    size_t pos = 0;
    bool ok = true;
    for (size_t i = 0; i < pieces.size() && ok; ++i) {
      const auto& piece = pieces[i];
      if (!piece.is_slot) {
        if (i == 0) {
          ok = prompt.substr(0, piece.text.size()) == piece.text;
          pos = piece.text.size();
        }
        continue;
      }
      // The literal after a slot ends it; the final literal must be a suffix.
      const std::string& next = pieces[i + 1].text;
      size_t end;
      if (i + 2 == pieces.size()) {
        ok = prompt.size() >= pos + next.size() &&
             prompt.substr(prompt.size() - next.size()) == next;
        end = prompt.size() - next.size();
      } else {
        end = prompt.find(next, pos);
        ok = end != std::string_view::npos;
      }
      if (!ok) break;
      slots[piece.text] = std::string(prompt.substr(pos, end - pos));
      pos = end + next.size();
    }
    if (ok) return std::make_pair(kind, std::move(slots));
  }
  return std::nullopt;
}

}  // namespace synret
