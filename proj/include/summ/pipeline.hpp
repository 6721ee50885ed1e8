// Copyright 2026 The summ Authors.
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

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "summ/abstractor.hpp"
#include "summ/config.hpp"
#include "summ/decoding.hpp"
#include "summ/extractor.hpp"
#include "summ/ff_extractor.hpp"
#include "summ/proxy.hpp"
#include "summ/rl.hpp"

namespace summ {

// ---------------------------------------------------------------------------
// Data

struct Dataset {
  Vocabulary vocab;
  std::vector<SummaryPair> train;
  std::vector<SummaryPair> validation;
  std::vector<SummaryPair> test;
  std::vector<ProxyLabels> train_labels;
  std::vector<ProxyLabels> validation_labels;
};

// Loads (or generates) the corpus, truncates, splits, builds the vocabulary
// on the training split and computes proxy labels. Deterministic in the
// config.
Dataset prepare_data(const RunConfig& config);

ExtractorDims extractor_dims(const RunConfig& config, const Vocabulary& vocab);
AbstractorDims abstractor_dims(const RunConfig& config, const Vocabulary& vocab);

// ---------------------------------------------------------------------------
// Maximum-likelihood training

// Per-example summed loss plus the number of units it sums over; a batch is
// optimized on sum(loss) / sum(units).
struct MlTask {
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
  std::function<Var(Graph&, std::size_t index, bool validation)> loss;
  std::function<double(std::size_t index, bool validation)> units;
};

struct MlOptions {
  double lr = 1e-3;
  double clip_norm = 2.0;
  int batch_size = 32;
  int max_epochs = 20;
  int max_halvings = 3;
  int eval_every = 0;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string name = "ml";

  static MlOptions from(const RunConfig& config, const std::string& name);
};

struct MlResult {
  std::vector<double> validation_history;
  double best_validation = 0.0;
  int epochs = 0;
  int updates = 0;
  bool stopped_early = false;
};

// Mini-batch Adam with clipping, plateau halving of the learning rate and
// early stopping; the parameters with the lowest validation loss are kept.
MlResult train_ml(ParamSet& params, const MlTask& task, const MlOptions& options);
double validation_loss(const ParamSet& params, const MlTask& task, int workers);

MlResult train_extractor_ml(ExtractorModel& model, const Dataset& data, const MlOptions& options);
MlResult train_ff_extractor(FFExtractorModel& model, const Dataset& data, const MlOptions& options);
MlResult train_abstractor_ml(AbstractorModel& model, const Dataset& data, const MlOptions& options);

// ---------------------------------------------------------------------------
// RL

RlConfig rl_config(const RunConfig& config);

// Rewrites every sentence once with the frozen abstractor (or keeps it when
// `abstractor` is null) and encodes the documents.
std::vector<RlExample> make_rl_examples(const std::vector<SummaryPair>& pairs,
                                        const Vocabulary& vocab,
                                        const AbstractorModel* abstractor, int max_len,
                                        int workers);

// ---------------------------------------------------------------------------
// Checkpoints

inline constexpr const char* kKindExtractor = "rnn-ext";
inline constexpr const char* kKindFFExtractor = "ff-ext";
inline constexpr const char* kKindAbstractor = "abstractor";

void save_extractor(const std::filesystem::path& path, const ExtractorModel& model,
                    const Vocabulary& vocab, const std::string& config_hash,
                    const std::string& stage);
void save_ff_extractor(const std::filesystem::path& path, const FFExtractorModel& model,
                       const Vocabulary& vocab, const std::string& config_hash);
void save_abstractor(const std::filesystem::path& path, const AbstractorModel& model,
                     const Vocabulary& vocab, const std::string& config_hash);

template <class Model>
struct Loaded {
  Model model;
  Vocabulary vocab;
  std::string config_hash;
  nlohmann::json meta;
};

// `expected_hash` empty disables the config check; otherwise a mismatch
// throws unless `allow_mismatch` is set (then it only warns).
Loaded<ExtractorModel> load_extractor(const std::filesystem::path& path,
                                      const std::string& expected_hash = "",
                                      bool allow_mismatch = false);
Loaded<FFExtractorModel> load_ff_extractor(const std::filesystem::path& path,
                                           const std::string& expected_hash = "",
                                           bool allow_mismatch = false);
Loaded<AbstractorModel> load_abstractor(const std::filesystem::path& path,
                                        const std::string& expected_hash = "",
                                        bool allow_mismatch = false);

// ---------------------------------------------------------------------------
// Evaluation

struct SummaryRecord {
  std::string id;
  std::vector<Tokens> sentences;
  std::vector<int> indices;
  bool stopped_by_eoe = false;
};

void write_summaries_jsonl(const std::filesystem::path& path,
                           const std::vector<SummaryRecord>& records);
std::vector<SummaryRecord> read_summaries_jsonl(const std::filesystem::path& path);

// Metrics of one system over a test set, keyed by metric name:
// rouge1, rouge2, rougeL (F1), novel1..novel4, mean_length (words),
// mean_sentences, mean_reward, repeated_bigrams (total count),
// and for synthetic data extraction_f1 and eoe_within_one.
struct ModelReport {
  std::string name;
  std::map<std::string, double> metrics;
};

struct EvalReport {
  std::string config_hash;
  std::vector<ModelReport> models;

  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
  // Sorted keys, fixed indentation, trailing newline.
  std::string serialize() const;
};

// Records must align with `pairs`. With `fixed_length` every summary ends in
// a scored stop; otherwise only summaries that stopped by EOE do. `stem`
// applies to the ROUGE metrics only.
ModelReport score_summaries(const std::string& name, const std::vector<SummaryPair>& pairs,
                            const std::vector<SummaryRecord>& records, bool fixed_length,
                            bool stem = true);

// Aligned text table over the shared metrics with the best value per metric
// marked '*' (lowest for repeated_bigrams, highest otherwise). Rows keep
// their input order unless `sort_by` names a metric (then descending).
// Throws when the reports do not share the same metrics.
std::string compare_models(const std::vector<ModelReport>& reports,
                           const std::string& sort_by = "");

// ---------------------------------------------------------------------------
// Orchestration

enum class Stage { kMlAbs, kMlExt, kRl, kEval };
Stage parse_stage(const std::string& name);
std::string stage_name(Stage stage);

struct RunPaths {
  std::filesystem::path root;
  std::filesystem::path abstractor() const { return root / "abstractor.ckpt"; }
  std::filesystem::path extractor_ml() const { return root / "extractor_ml.ckpt"; }
  std::filesystem::path ff_extractor() const { return root / "ff_extractor.ckpt"; }
  std::filesystem::path extractor_rl() const { return root / "extractor_rl.ckpt"; }
  std::filesystem::path rl_curve() const { return root / "rl_curve.csv"; }
  std::filesystem::path report() const { return root / "report.json"; }
  std::filesystem::path comparison() const { return root / "comparison.txt"; }
  std::filesystem::path timing() const { return root / "timing.json"; }
  std::filesystem::path outputs(const std::string& model) const;
};

struct ExperimentOptions {
  bool allow_config_mismatch = false;
};

// Runs one stage, writing its artifacts under config.out_dir. Later stages
// throw (naming the missing stage) when prerequisites are absent.
void run_experiment(const RunConfig& config, Stage stage, const ExperimentOptions& options = {});

// All stages in order.
void run_all(const RunConfig& config, const ExperimentOptions& options = {});

// The eval stage's model list for a config.
std::vector<std::string> eval_model_names(const RunConfig& config);

}  // namespace summ
