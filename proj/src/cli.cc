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

#include "synret/cli.h"

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "synret/align.h"
#include "synret/distill.h"
#include "synret/mock_oracle.h"

namespace synret {

namespace fs = std::filesystem;

namespace {

// Validation failure carrying every violated constraint.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(std::vector<std::string> errors)
      : std::runtime_error(Join(errors, "\n")), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string Join(const std::vector<std::string>& parts,
                          const char* sep) {
    std::string out;
    for (const auto& p : parts) {
      if (!out.empty()) out += sep;
      out += p;
    }
    return out;
  }
  std::vector<std::string> errors_;
};

void ThrowIfInvalid(std::vector<std::string> errors) {
  if (!errors.empty()) throw UsageError(std::move(errors));
}

// Flags shared by the subcommands that build a PipelineConfig. Unset flags
// leave file and default values alone.
struct CommonFlags {
  std::string config_path;
  std::string dataset;
  std::string split;
  std::optional<uint64_t> seed;
  bool mock = false;
  std::optional<double> hallucination_rate;
  std::string endpoint_url;
  std::string model;
  std::optional<int> parallelism;
};

void AddConfigFlag(CLI::App* cmd, CommonFlags* f) {
  cmd->add_option("--config", f->config_path, "Config file (key = value)");
}
void AddSeedFlag(CLI::App* cmd, CommonFlags* f) {
  cmd->add_option("--seed", f->seed, "Seed for every random choice");
}
void AddLlmFlags(CLI::App* cmd, CommonFlags* f) {
  cmd->add_flag("--mock", f->mock, "Answer every LLM call with the mock oracle");
  cmd->add_option("--endpoint-url", f->endpoint_url,
                  "Chat-completions base URL");
  cmd->add_option("--model", f->model, "LLM model name");
  cmd->add_option("--parallelism", f->parallelism, "Max in-flight LLM calls");
}

// defaults < config file < flags
PipelineConfig BuildConfig(const CommonFlags& f, PipelineConfig config = {}) {
  std::vector<std::string> errors;
  if (!f.config_path.empty()) {
    if (!fs::exists(f.config_path)) {
      throw UsageError({"--config: no such file " + f.config_path});
    }
    errors = ApplyConfig(LoadConfigFile(f.config_path), &config);
  }
  ConfigEntries flags;
  if (!f.dataset.empty()) flags.emplace_back("pipeline.dataset", f.dataset);
  if (!f.split.empty()) flags.emplace_back("pipeline.split", f.split);
  if (f.seed) flags.emplace_back("pipeline.seed", std::to_string(*f.seed));
  if (f.hallucination_rate) {
    std::ostringstream os;
    os << std::setprecision(17) << *f.hallucination_rate;
    flags.emplace_back("mock.hallucination_rate", os.str());
  }
  if (!f.endpoint_url.empty()) {
    flags.emplace_back("endpoint.base_url", f.endpoint_url);
  }
  if (!f.model.empty()) flags.emplace_back("endpoint.model", f.model);
  if (f.parallelism) {
    flags.emplace_back("synthesis.parallelism", std::to_string(*f.parallelism));
    flags.emplace_back("stage2.parallelism", std::to_string(*f.parallelism));
  }
  auto more = ApplyConfig(flags, &config);
  errors.insert(errors.end(), more.begin(), more.end());
  config.PropagateSeed();
  ThrowIfInvalid(std::move(errors));
  return config;
}

std::vector<std::string> ValidateLlm(const PipelineConfig& config, bool mock) {
  std::vector<std::string> errors;
  if (!mock) {
    const char* key = std::getenv(config.endpoint.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      errors.push_back("environment variable " + config.endpoint.api_key_env +
                       " is not set (or pass --mock)");
    }
  }
  return errors;
}

void RequireFile(const std::string& flag, const std::string& path,
                 std::vector<std::string>* errors) {
  if (!fs::is_regular_file(path)) {
    errors->push_back(flag + ": no such file " + path);
  }
}

Dataset LoadSplit(const PipelineConfig& config, std::ostream& err) {
  auto loaded = LoadDatasetDir(config.dataset_dir, config.split);
  for (const auto& w : loaded.warnings) err << "warning: " << w << "\n";
  return std::move(loaded.dataset);
}

std::unique_ptr<ChatClient> MakeClient(const PipelineConfig& config, bool mock,
                                       const Dataset& dataset,
                                       const PromptLibrary& library) {
  if (mock) return std::make_unique<MockOracle>(config.mock, dataset, library);
  return std::make_unique<RemoteChatClient>(config.endpoint);
}

void PrintSynthesisSummary(const SynthesisSummary& s, std::ostream& out) {
  out << "records: " << s.total << " (" << s.generated << " new, " << s.resumed
      << " resumed)\n"
      << "relabeled: " << s.relabeled << "\n"
      << "failed: " << s.failed << "\n"
      << "skipped (no gold passage): " << s.skipped << "\n"
      << "relabel parse warnings: " << s.warnings << "\n";
}

std::vector<size_t> ParseKs(const std::string& text) {
  std::vector<size_t> ks;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    size_t pos = 0;
    long long k = 0;
    try {
      k = std::stoll(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || k < 1) {
      throw UsageError({"--k: '" + item + "' is not a positive integer"});
    }
    ks.push_back(static_cast<size_t>(k));
  }
  if (ks.empty()) throw UsageError({"--k: empty list"});
  return ks;
}

std::string Fixed4(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

// Removes a temporary directory on scope exit.
struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "synret-demo-XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) {
      throw std::runtime_error("cannot create a temporary directory");
    }
    path = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

fs::path DefaultDemoDir() { return SYNRET_DEMO_DIR; }

PipelineConfig DemoConfig(uint64_t seed) {
  PipelineConfig c;
  c.dataset_dir = DefaultDemoDir();
  c.seed = seed;
  c.synthesis_parallelism = 4;
  c.stage1.encoder.tau = 0.5;
  c.stage1.encoder.dim = 64;
  c.stage1.batch_size = 10;
  c.stage1.epochs = 30;
  c.stage1.learning_rate = 1e-2;
  c.stage1.warmup_steps = 10;
  c.stage2.batch_size = 2;
  c.stage2.epochs = 10;
  c.stage2.learning_rate = 1e-3;
  c.stage2.warmup_steps = 5;
  c.stage2.parallelism = 4;
  c.PropagateSeed();
  return c;
}

DemoResult RunDemo(const PipelineConfig& config, const fs::path& work_dir) {
  const Dataset train = LoadDatasetDir(config.dataset_dir, "train").dataset;
  const Dataset test = LoadDatasetDir(config.dataset_dir, "test").dataset;
  const PromptLibrary library = PromptLibrary::Load(config.prompts_dir);
  fs::create_directories(work_dir);

  DemoResult result;
  result.passages = train.corpus.size();
  result.train_queries = train.JudgedQueries().size();
  result.test_queries = test.JudgedQueries().size();

  MockOracle oracle(config.mock, train, library);
  SynthesisOptions synth;
  synth.parallelism = config.synthesis_parallelism;
  synth.max_failure_ratio = config.max_failure_ratio;
  synth.clock = [] { return std::string(kFixedTimestamp); };
  const fs::path records_path = work_dir / "records.jsonl";
  fs::remove(records_path);
  result.synthesis = RunSynthesis(oracle, library, train, records_path, synth);
  const auto records = ReadRecords(records_path);

  const EncoderModel initial(config.stage1.encoder, InitSeed(config.seed));
  result.random_init = Evaluate(initial, test);

  const auto distilled =
      TrainDistill(initial, JoinExamples(train, records), config.stage1,
                   work_dir / "stage1");
  result.distilled = Evaluate(distilled.model, test);

  const fs::path log_path = work_dir / "comparisons.jsonl";
  fs::remove(log_path);
  const PreferenceSet prefs = CollectPreferences(
      oracle, library, distilled.model, train, config.stage2, log_path);
  WriteTriples(prefs.triples, work_dir / "triples.jsonl");
  result.comparisons = static_cast<int>(prefs.log.size());
  result.skipped = prefs.skipped;
  result.triples = prefs.triples.size();

  AlignConfig pl = config.stage2;
  pl.loss = AlignLossKind::kPartialPl;
  AlignConfig bt = config.stage2;
  bt.loss = AlignLossKind::kBt;
  const auto aligned_pl = TrainAlign(distilled.model, train, prefs.triples, pl,
                                     work_dir / "stage2-partial-pl");
  const auto aligned_bt = TrainAlign(distilled.model, train, prefs.triples, bt,
                                     work_dir / "stage2-bt");
  result.aligned_pl = Evaluate(aligned_pl.model, test);
  result.aligned_bt = Evaluate(aligned_bt.model, test);
  return result;
}

void PrintDemoTable(const DemoResult& r, uint64_t seed, std::ostream& out) {
  out << "demo (seed " << seed << ")\n"
      << "dataset: " << r.passages << " passages, " << r.train_queries
      << " train queries, " << r.test_queries << " test queries\n"
      << "synthesis: " << r.synthesis.total << " records, "
      << r.synthesis.relabeled << " relabeled\n"
      << "preferences: " << r.comparisons << " comparisons, " << r.skipped
      << " skipped, " << r.triples << " triples\n\n";
  out << std::left << std::setw(22) << "model";
  for (size_t k : r.random_init.ks) {
    out << std::right << std::setw(9) << ("nDCG@" + std::to_string(k));
  }
  out << "\n";
  auto row = [&](const char* name, const EvalReport& rep) {
    out << std::left << std::setw(22) << name;
    for (double v : rep.macro) out << std::right << std::setw(9) << Fixed4(v);
    out << "\n";
  };
  row("random-init", r.random_init);
  row("distilled", r.distilled);
  row("aligned (partial-pl)", r.aligned_pl);
  row("aligned (bt)", r.aligned_bt);
}

int RunCommand(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Two-stage LLM-distilled dense retriever", "synret"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  // ingest
  CommonFlags ingest_f;
  bool lenient = false;
  auto* ingest = app.add_subcommand("ingest", "Load and validate a dataset");
  ingest->add_option("--dataset", ingest_f.dataset, "Dataset directory")
      ->required();
  ingest->add_option("--split", ingest_f.split, "Qrels split")
      ->default_str("train");
  ingest->add_flag("--lenient", lenient, "Drop dangling qrels rows with a warning");

  // synth
  CommonFlags synth_f;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate stage-1 records");
  synth->add_option("--dataset", synth_f.dataset, "Dataset directory")->required();
  synth->add_option("--split", synth_f.split, "Qrels split")->default_str("train");
  synth->add_option("--out", synth_out, "Output records (JSONL)")->required();
  AddConfigFlag(synth, &synth_f);
  AddSeedFlag(synth, &synth_f);
  AddLlmFlags(synth, &synth_f);
  synth->add_option("--hallucination-rate", synth_f.hallucination_rate,
                    "Mock oracle hallucination rate");

  // distill
  CommonFlags distill_f;
  std::string records_path, distill_out;
  auto* distill = app.add_subcommand("distill", "Stage-1 training");
  distill->add_option("--records", records_path, "Synthesis records")->required();
  distill->add_option("--dataset", distill_f.dataset, "Dataset directory")
      ->required();
  distill->add_option("--split", distill_f.split, "Qrels split")
      ->default_str("train");
  distill->add_option("--out", distill_out, "Checkpoint directory")->required();
  AddConfigFlag(distill, &distill_f);
  AddSeedFlag(distill, &distill_f);

  // align
  CommonFlags align_f;
  std::string align_ckpt, align_out, loss_name;
  auto* align = app.add_subcommand("align", "Stage-2 preference alignment");
  align->add_option("--ckpt", align_ckpt, "Stage-1 checkpoint")->required();
  align->add_option("--dataset", align_f.dataset, "Dataset directory")->required();
  align->add_option("--split", align_f.split, "Qrels split")->default_str("train");
  align->add_option("--out", align_out, "Output directory")->required();
  align->add_option("--loss", loss_name, "partial-pl or bt")
      ->check(CLI::IsMember({"partial-pl", "bt"}));
  AddConfigFlag(align, &align_f);
  AddSeedFlag(align, &align_f);
  AddLlmFlags(align, &align_f);

  // eval
  std::string eval_ckpt, eval_dataset, eval_split = "test", eval_ks = "1,3,5,10",
                                       eval_out;
  auto* eval = app.add_subcommand("eval", "nDCG@K evaluation");
  eval->add_option("--ckpt", eval_ckpt, "Checkpoint")->required();
  eval->add_option("--dataset", eval_dataset, "Dataset directory")->required();
  eval->add_option("--split", eval_split, "Qrels split")->capture_default_str();
  eval->add_option("--k", eval_ks, "Comma-separated cutoffs")->capture_default_str();
  eval->add_option("--out", eval_out, "Report CSV");

  // demo
  CommonFlags demo_f;
  std::string demo_out;
  auto* demo = app.add_subcommand("demo", "Offline end-to-end run");
  demo->add_option("--dataset", demo_f.dataset, "Dataset directory")
      ->default_str(DefaultDemoDir().string());
  demo->add_option("--out", demo_out, "Keep intermediate files here");
  AddConfigFlag(demo, &demo_f);
  AddSeedFlag(demo, &demo_f);

  std::vector<std::string> argv_store = {"synret"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*ingest) {
      if (ingest_f.split.empty()) ingest_f.split = "train";
      auto loaded = LoadDatasetDir(ingest_f.dataset, ingest_f.split,
                                   LoadOptions{!lenient});
      for (const auto& w : loaded.warnings) err << "warning: " << w << "\n";
      const auto& d = loaded.dataset;
      out << "passages: " << d.corpus.size() << "\n"
          << "queries: " << d.queries.size() << "\n"
          << "judged queries (" << ingest_f.split
          << "): " << d.JudgedQueries().size() << "\n"
          << "qrels rows: " << d.qrels.size() << "\n";
      return kExitOk;
    }

    if (*synth) {
      const PipelineConfig config = BuildConfig(synth_f);
      auto errors = config.Validate();
      auto llm = ValidateLlm(config, synth_f.mock);
      errors.insert(errors.end(), llm.begin(), llm.end());
      ThrowIfInvalid(std::move(errors));
      const Dataset dataset = LoadSplit(config, err);
      const PromptLibrary library = PromptLibrary::Load(config.prompts_dir);
      auto client = MakeClient(config, synth_f.mock, dataset, library);
      SynthesisOptions options;
      options.parallelism = config.synthesis_parallelism;
      options.max_failure_ratio = config.max_failure_ratio;
      options.temperature = config.endpoint.sampling_temperature;
      if (synth_f.mock) {
        options.clock = [] { return std::string(kFixedTimestamp); };
      }
      if (fs::path(synth_out).has_parent_path()) {
        fs::create_directories(fs::path(synth_out).parent_path());
      }
      PrintSynthesisSummary(
          RunSynthesis(*client, library, dataset, synth_out, options), out);
      return kExitOk;
    }

    if (*distill) {
      const PipelineConfig config = BuildConfig(distill_f);
      auto errors = config.Validate();
      RequireFile("--records", records_path, &errors);
      ThrowIfInvalid(std::move(errors));
      const Dataset dataset = LoadSplit(config, err);
      const auto records = ReadRecords(records_path);
      fs::create_directories(distill_out);
      const auto result =
          TrainDistill(dataset, records, config.stage1, fs::path(distill_out));
      out << "examples: " << records.size() << "\n"
          << "steps: " << result.curve.size() << "\n";
      if (!result.curve.empty()) {
        out << "final mean loss: " << result.curve.back().mean_loss << "\n";
      }
      out << "checkpoint: " << (fs::path(distill_out) / "model.ckpt").string()
          << "\n";
      return kExitOk;
    }

    if (*align) {
      PipelineConfig config = BuildConfig(align_f);
      if (!loss_name.empty()) config.stage2.loss = *ParseAlignLoss(loss_name);
      auto errors = config.Validate();
      RequireFile("--ckpt", align_ckpt, &errors);
      auto llm = ValidateLlm(config, align_f.mock);
      errors.insert(errors.end(), llm.begin(), llm.end());
      ThrowIfInvalid(std::move(errors));
      const Dataset dataset = LoadSplit(config, err);
      const EncoderModel stage1 = LoadCheckpoint(align_ckpt);
      const PromptLibrary library = PromptLibrary::Load(config.prompts_dir);
      auto client = MakeClient(config, align_f.mock, dataset, library);
      fs::create_directories(align_out);
      const auto prefs =
          CollectPreferences(*client, library, stage1, dataset, config.stage2,
                             fs::path(align_out) / "comparisons.jsonl");
      WriteTriples(prefs.triples, fs::path(align_out) / "triples.jsonl");
      const auto result = TrainAlign(stage1, dataset, prefs.triples,
                                     config.stage2, fs::path(align_out));
      out << "loss: " << AlignLossName(config.stage2.loss) << "\n"
          << "comparisons: " << prefs.log.size() << " (" << prefs.comparisons
          << " new, " << prefs.skipped << " skipped)\n"
          << "triples: " << prefs.triples.size() << "\n"
          << "steps: " << result.curve.size() << "\n"
          << "checkpoint: " << (fs::path(align_out) / "model.ckpt").string()
          << "\n";
      return kExitOk;
    }

    if (*eval) {
      std::vector<std::string> errors;
      RequireFile("--ckpt", eval_ckpt, &errors);
      if (!fs::is_directory(eval_dataset)) {
        errors.push_back("--dataset: no such directory " + eval_dataset);
      }
      std::vector<size_t> ks;
      try {
        ks = ParseKs(eval_ks);
      } catch (const UsageError& e) {
        errors.insert(errors.end(), e.errors().begin(), e.errors().end());
      }
      ThrowIfInvalid(std::move(errors));
      auto loaded = LoadDatasetDir(eval_dataset, eval_split);
      for (const auto& w : loaded.warnings) err << "warning: " << w << "\n";
      const EncoderModel model = LoadCheckpoint(eval_ckpt);
      const EvalReport report = Evaluate(model, loaded.dataset, ks);
      PrintReportTable(report, out);
      if (!eval_out.empty()) WriteReportCsv(report, fs::path(eval_out));
      return kExitOk;
    }

    if (*demo) {
      PipelineConfig defaults = DemoConfig(demo_f.seed.value_or(7));
      const PipelineConfig config = BuildConfig(demo_f, defaults);
      ThrowIfInvalid(config.Validate());
      DemoResult result;
      if (demo_out.empty()) {
        TempDir tmp;
        result = RunDemo(config, tmp.path);
      } else {
        result = RunDemo(config, demo_out);
      }
      PrintDemoTable(result, config.seed, out);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    for (const auto& msg : e.errors()) err << "error: " << msg << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace synret
