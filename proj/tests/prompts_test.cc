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

#include <string>

#include <gtest/gtest.h>

#include "golden_prompts.h"
#include "test_util.h"

namespace synret {
namespace {

using namespace std::string_literals;

std::string Golden(PromptKind kind) {
  std::string_view tail;
  switch (kind) {
    case PromptKind::kCot:
      tail = testing::kGoldenCotTail;
      break;
    case PromptKind::kPositive:
      tail = testing::kGoldenPositiveTail;
      break;
    case PromptKind::kNegative:
      tail = testing::kGoldenNegativeTail;
      break;
    case PromptKind::kRelabel:
      tail = testing::kGoldenRelabelTail;
      break;
    case PromptKind::kCompare:
      tail = testing::kGoldenCompareTail;
      break;
  }
  return std::string(testing::kGoldenPersona) + std::string(tail);
}

TEST(Templates, ShippedFilesByteMatchGolden) {
  for (PromptKind kind : kAllPromptKinds) {
    const std::string file =
        testing::ReadFile(DefaultPromptsDir() / TemplateFileName(kind));
    EXPECT_EQ(file, Golden(kind)) << PromptKindName(kind);
    EXPECT_EQ(PromptLibrary::Default().Template(kind), file);
  }
}

TEST(Render, PositiveSubstitutesQuestion) {
  const auto lib = PromptLibrary::Default();
  const std::string out = lib.Render(PromptKind::kPositive, {{"question", "Q"}});
  EXPECT_NE(out.find("Question: Q\n"), std::string::npos);
  EXPECT_NE(out.find("Write a passage that elaborates on the question."),
            std::string::npos);
  EXPECT_EQ(out.find('{'), std::string::npos);
}

TEST(Render, IsByteExact) {
  const auto lib = PromptLibrary::Default();
  const PromptSlots slots = {{"question", "a {passage} b\n"}, {"passage", "x\ty"}};
  const std::string out = lib.Render(PromptKind::kRelabel, slots);
  EXPECT_EQ(out, lib.Render(PromptKind::kRelabel, slots));
  std::string expected = Golden(PromptKind::kRelabel);
  expected.replace(expected.find("{question}"), 10, "a {passage} b\n");
  expected.replace(expected.find("{passage}", expected.find("Passage: ")), 9, "x\ty");
  EXPECT_EQ(out, expected);
}

TEST(Render, MissingBindingNamesPlaceholder) {
  const auto lib = PromptLibrary::Default();
  try {
    lib.Render(PromptKind::kRelabel, {{"question", "q"}});
    FAIL() << "expected PromptError";
  } catch (const PromptError& e) {
    EXPECT_NE(std::string(e.what()).find("{passage}"), std::string::npos);
  }
}

TEST(Render, UnknownBindingIsError) {
  const auto lib = PromptLibrary::Default();
  try {
    lib.Render(PromptKind::kCot, {{"question", "q"}, {"passage", "p"}});
    FAIL() << "expected PromptError";
  } catch (const PromptError& e) {
    EXPECT_NE(std::string(e.what()).find("{passage}"), std::string::npos);
  }
}

TEST(Parse, RecoversKindAndSlots) {
  const auto lib = PromptLibrary::Default();
  const PromptSlots compare = {{"question", "which one?"},
                               {"passage1", "first\nmultiline"},
                               {"passage2", "second"}};
  for (PromptKind kind : kAllPromptKinds) {
    PromptSlots slots;
    switch (kind) {
      case PromptKind::kRelabel:
        slots = {{"question", "q text"}, {"passage", "some passage"}};
        break;
      case PromptKind::kCompare:
        slots = compare;
        break;
      default:
        slots = {{"question", "q text: with colon"}};
    }
    const auto parsed = lib.Parse(lib.Render(kind, slots));
    ASSERT_TRUE(parsed.has_value()) << PromptKindName(kind);
    EXPECT_EQ(parsed->first, kind);
    EXPECT_EQ(parsed->second, slots);
  }
  EXPECT_FALSE(lib.Parse("hello").has_value());
}

TEST(Library, LoadFromDirectory) {
  testing::TempDir dir;
  for (PromptKind kind : kAllPromptKinds) {
    testing::WriteFile(dir / TemplateFileName(kind),
                       std::string(PromptKindName(kind)) + ": {question}");
  }
  const auto lib = PromptLibrary::Load(dir.path());
  EXPECT_EQ(lib.Render(PromptKind::kNegative, {{"question", "x"}}), "negative: x");
  std::filesystem::remove(dir / "compare.txt");
  EXPECT_THROW(PromptLibrary::Load(dir.path()), PromptError);
}

TEST(Temperature, GenerationSamplesJudgmentsAreGreedy) {
  EXPECT_EQ(DefaultTemperature(PromptKind::kCot), 0.7);
  EXPECT_EQ(DefaultTemperature(PromptKind::kPositive), 0.7);
  EXPECT_EQ(DefaultTemperature(PromptKind::kNegative), 0.7);
  EXPECT_EQ(DefaultTemperature(PromptKind::kRelabel), 0.0);
  EXPECT_EQ(DefaultTemperature(PromptKind::kCompare), 0.0);
}

}  // namespace
}  // namespace synret
