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

#include "summ/pipeline.hpp"

#include <spdlog/sinks/basic_file_sink.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "summ/checkpoint.hpp"
#include "summ/parallel.hpp"

namespace summ {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Data

namespace {

SummaryPair clip_pair(const SummaryPair& pair, const RunConfig& config) {
  SummaryPair out = truncate_pair(pair, config.data.max_sentence_tokens,
                                  config.data.max_sentence_tokens);
  const std::size_t cap = config.data.max_document_sentences;
  if (out.document.sentences.size() > cap) {
    out.document.sentences.resize(cap);
    std::vector<int> kept;
    for (int j : out.salient)
      if (static_cast<std::size_t>(j) < cap) kept.push_back(j);
    out.salient = kept;
  }
  return out;
}

std::vector<ProxyLabels> label_all(const std::vector<SummaryPair>& pairs) {
  std::vector<ProxyLabels> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.document.sentences.empty() || p.summary.empty()) {
      out.push_back(ProxyLabels{p.document.id, {}});
    } else {
      out.push_back(match_proxy_labels(p));
    }
  }
  return out;
}

}  // namespace

Dataset prepare_data(const RunConfig& config) {
  std::vector<SummaryPair> pool;
  Dataset data;
  if (config.data.train.empty()) {
    const auto corpus = generate_synthetic_corpus(config.synthetic);
    const Split outer = split_validation(corpus, config.data.test_fraction,
                                         derive_seed(config.seed, 0x7e57, 0));
    pool = outer.train;
    data.test = outer.validation;
  } else {
    pool = read_jsonl(config.data.train);
    if (!config.data.test.empty()) data.test = read_jsonl(config.data.test);
  }
  const double rel = config.data.validation_fraction /
                     (config.data.train.empty() ? 1.0 - config.data.test_fraction : 1.0);
  const Split inner = split_validation(pool, rel, derive_seed(config.seed, 0x7a11d, 0));
  for (const auto& p : inner.train) data.train.push_back(clip_pair(p, config));
  for (const auto& p : inner.validation) data.validation.push_back(clip_pair(p, config));
  for (auto& p : data.test) p = clip_pair(p, config);
  if (data.train.empty()) throw std::invalid_argument("training split is empty");
  data.vocab = Vocabulary::build(data.train, config.model.vocab_cap);
  data.train_labels = label_all(data.train);
  data.validation_labels = label_all(data.validation);
  spdlog::info("data: {} train / {} validation / {} test documents, vocabulary {}",
               data.train.size(), data.validation.size(), data.test.size(), data.vocab.size());
  return data;
}

ExtractorDims extractor_dims(const RunConfig& config, const Vocabulary& vocab) {
  ExtractorDims d;
  d.vocab = static_cast<int>(vocab.size());
  d.embedding = config.model.embedding;
  d.filters = config.model.filters;
  d.hidden = config.model.hidden;
  return d;
}

AbstractorDims abstractor_dims(const RunConfig& config, const Vocabulary& vocab) {
  AbstractorDims d;
  d.vocab = static_cast<int>(vocab.size());
  d.embedding = config.model.embedding;
  d.hidden = config.model.hidden;
  return d;
}

// ---------------------------------------------------------------------------
// Maximum-likelihood training

MlOptions MlOptions::from(const RunConfig& config, const std::string& name) {
  MlOptions o;
  o.lr = config.ml.lr;
  o.clip_norm = config.ml.clip_norm;
  o.batch_size = config.ml.batch_size;
  o.max_epochs = config.ml.max_epochs;
  o.max_halvings = config.ml.max_halvings;
  o.eval_every = config.ml.eval_every;
  o.seed = derive_seed(config.seed, fnv1a64(name), 0);
  o.workers = config.workers;
  o.name = name;
  return o;
}

double validation_loss(const ParamSet& params, const MlTask& task, int workers) {
  if (task.validation_size == 0) return 0.0;
  const auto losses = parallel_map<double>(task.validation_size, workers, [&](std::size_t i) {
    Graph g(&params);
    return g.scalar(task.loss(g, i, true));
  });
  double units = 0.0;
  for (std::size_t i = 0; i < task.validation_size; ++i) units += task.units(i, true);
  return std::accumulate(losses.begin(), losses.end(), 0.0) / units;
}

MlResult train_ml(ParamSet& params, const MlTask& task, const MlOptions& options) {
  if (task.train_size == 0) throw std::invalid_argument(options.name + ": no training examples");
  if (options.batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  OptimState optim = OptimState::for_params(params, options.lr);
  PlateauSchedule schedule(options.max_halvings);
  MlResult result;
  result.best_validation = std::numeric_limits<double>::infinity();
  std::vector<Matrix> best;
  auto snapshot = [&] {
    best.clear();
    for (const auto& p : params.all()) best.push_back(p.value);
  };
  snapshot();

  const auto batch = static_cast<std::size_t>(options.batch_size);
  const std::size_t batches_per_epoch = (task.train_size + batch - 1) / batch;
  const std::size_t eval_every =
      options.eval_every > 0 ? static_cast<std::size_t>(options.eval_every) : batches_per_epoch;
  std::vector<std::size_t> order(task.train_size);
  std::iota(order.begin(), order.end(), 0);

  bool stop = false;
  for (int epoch = 1; epoch <= options.max_epochs && !stop; ++epoch) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(epoch), 0));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    double epoch_loss = 0.0, epoch_units = 0.0;
    for (std::size_t start = 0; start < order.size() && !stop; start += batch) {
      const std::size_t count = std::min(batch, order.size() - start);
      BatchGradient bg = batch_gradient(params, count, options.workers, [&](Graph& g, std::size_t i) {
        return task.loss(g, order[start + i], false);
      });
      double units = 0.0;
      for (std::size_t i = 0; i < count; ++i) units += task.units(order[start + i], false);
      bg.grads.scale(1.0 / units);
      clip_gradients(bg.grads, options.clip_norm);
      adam_step(params, bg.grads, optim);
      epoch_loss += bg.loss_sum;
      epoch_units += units;
      ++result.updates;

      if (task.validation_size > 0 && result.updates % static_cast<int>(eval_every) == 0) {
        const double v = validation_loss(params, task, options.workers);
        result.validation_history.push_back(v);
        if (v < result.best_validation) {
          result.best_validation = v;
          snapshot();
        }
        spdlog::info("{}: epoch {} update {} train {:.4f} validation {:.4f} lr {:.2e}", options.name,
                     epoch, result.updates, epoch_loss / epoch_units, v, optim.lr);
        if (!schedule.record(optim, v)) {
          result.stopped_early = true;
          stop = true;
        }
      }
    }
    result.epochs = epoch;
    if (task.validation_size == 0) {
      spdlog::info("{}: epoch {} train {:.4f}", options.name, epoch, epoch_loss / epoch_units);
    }
  }
  if (task.validation_size > 0) {
    for (std::size_t i = 0; i < best.size(); ++i) params[ParamId{i}].value = best[i];
  } else {
    result.best_validation = 0.0;
  }
  return result;
}

namespace {

struct ExtractionExamples {
  std::vector<SentenceIds> docs;
  std::vector<std::vector<int>> labels;
};

ExtractionExamples extraction_examples(const std::vector<SummaryPair>& pairs,
                                       const std::vector<ProxyLabels>& labels,
                                       const Vocabulary& vocab) {
  ExtractionExamples out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (labels[i].indices.empty()) continue;
    out.docs.push_back(encode_sentences(vocab, pairs[i].document.sentences));
    out.labels.push_back(labels[i].indices);
  }
  return out;
}

std::vector<SentencePair> sentence_pairs(const std::vector<SummaryPair>& pairs,
                                         const std::vector<ProxyLabels>& labels) {
  std::vector<SentencePair> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (labels[i].indices.empty()) continue;
    for (auto& sp : build_abstractor_pairs(pairs[i], labels[i])) {
      if (!sp.source.empty() && !sp.target.empty()) out.push_back(std::move(sp));
    }
  }
  return out;
}

}  // namespace

MlResult train_extractor_ml(ExtractorModel& model, const Dataset& data, const MlOptions& options) {
  const auto train = extraction_examples(data.train, data.train_labels, data.vocab);
  const auto val = extraction_examples(data.validation, data.validation_labels, data.vocab);
  MlTask task;
  task.train_size = train.docs.size();
  task.validation_size = val.docs.size();
  task.loss = [&](Graph& g, std::size_t i, bool v) {
    const auto& src = v ? val : train;
    return extractor_ml_loss(g, model, src.docs[i], src.labels[i]);
  };
  task.units = [&](std::size_t i, bool v) {
    return static_cast<double>((v ? val : train).labels[i].size());
  };
  return train_ml(model.params(), task, options);
}

MlResult train_ff_extractor(FFExtractorModel& model, const Dataset& data, const MlOptions& options) {
  const auto train = extraction_examples(data.train, data.train_labels, data.vocab);
  const auto val = extraction_examples(data.validation, data.validation_labels, data.vocab);
  MlTask task;
  task.train_size = train.docs.size();
  task.validation_size = val.docs.size();
  task.loss = [&](Graph& g, std::size_t i, bool v) {
    const auto& src = v ? val : train;
    return ff_ext_loss(g, model, src.docs[i], src.labels[i]);
  };
  task.units = [&](std::size_t i, bool v) {
    return static_cast<double>((v ? val : train).docs[i].size());
  };
  return train_ml(model.params(), task, options);
}

MlResult train_abstractor_ml(AbstractorModel& model, const Dataset& data, const MlOptions& options) {
  const auto train = sentence_pairs(data.train, data.train_labels);
  const auto val = sentence_pairs(data.validation, data.validation_labels);
  MlTask task;
  task.train_size = train.size();
  task.validation_size = val.size();
  task.loss = [&](Graph& g, std::size_t i, bool v) {
    int count = 0;
    return abstractor_nll(g, model, data.vocab, (v ? val : train)[i], count);
  };
  task.units = [&](std::size_t i, bool v) {
    return static_cast<double>((v ? val : train)[i].target.size() + 1);
  };
  return train_ml(model.params(), task, options);
}

// ---------------------------------------------------------------------------
// RL

RlConfig rl_config(const RunConfig& config) {
  RlConfig r;
  r.gamma = config.rl.gamma;
  r.lr = config.rl.lr;
  r.clip_norm = config.rl.clip_norm;
  r.batch_size = config.rl.batch_size;
  r.max_steps_cap = config.rl.max_steps_cap;
  r.updates = config.rl.updates;
  r.log_interval = config.rl.log_interval;
  r.eval_interval = config.rl.eval_interval;
  r.seed = derive_seed(config.seed, fnv1a64("rl"), 0);
  r.workers = config.workers;
  return r;
}

std::vector<RlExample> make_rl_examples(const std::vector<SummaryPair>& pairs,
                                        const Vocabulary& vocab,
                                        const AbstractorModel* abstractor, int max_len,
                                        int workers) {
  std::vector<const SummaryPair*> usable;
  for (const auto& p : pairs)
    if (!p.document.sentences.empty() && !p.summary.empty()) usable.push_back(&p);
  std::vector<RlExample> out(usable.size());
  parallel_for(usable.size(), workers, [&](std::size_t i) {
    const SummaryPair& p = *usable[i];
    RlExample& ex = out[i];
    ex.id = p.document.id;
    ex.sentences = encode_sentences(vocab, p.document.sentences);
    ex.references = p.summary;
    ex.rewrites = abstractor == nullptr
                      ? p.document.sentences
                      : sequential_abstract(p.document.sentences, *abstractor, vocab, max_len);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

nlohmann::json model_meta(const nlohmann::json& dims, const Vocabulary& vocab, const std::string& stage) {
  return {{"dims", dims}, {"vocab", vocab.words()}, {"stage", stage}};
}

void check_hash(const Checkpoint& ck, const fs::path& path, const std::string& expected,
                bool allow_mismatch) {
  if (expected.empty() || ck.config_hash == expected) return;
  const std::string msg = path.string() + " was produced by config " + ck.config_hash +
                          " but the current config is " + expected;
  if (!allow_mismatch) throw std::runtime_error(msg + " (pass --allow-config-mismatch to override)");
  spdlog::warn("{}", msg);
}

Checkpoint read_kind(const fs::path& path, const std::string& kind) {
  Checkpoint ck = Checkpoint::read(path);
  if (ck.kind != kind) {
    throw std::runtime_error(path.string() + ": expected a '" + kind + "' checkpoint, found '" +
                             ck.kind + "'");
  }
  return ck;
}

}  // namespace

void save_extractor(const fs::path& path, const ExtractorModel& model, const Vocabulary& vocab,
                    const std::string& config_hash, const std::string& stage) {
  Checkpoint::capture(kKindExtractor, config_hash, model_meta(model.dims().to_json(), vocab, stage),
                      model.params())
      .write(path);
}

void save_ff_extractor(const fs::path& path, const FFExtractorModel& model, const Vocabulary& vocab,
                       const std::string& config_hash) {
  Checkpoint::capture(kKindFFExtractor, config_hash,
                      model_meta(model.dims().to_json(), vocab, "ml-ext"), model.params())
      .write(path);
}

void save_abstractor(const fs::path& path, const AbstractorModel& model, const Vocabulary& vocab,
                     const std::string& config_hash) {
  Checkpoint::capture(kKindAbstractor, config_hash,
                      model_meta(model.dims().to_json(), vocab, "ml-abs"), model.params())
      .write(path);
}

Loaded<ExtractorModel> load_extractor(const fs::path& path, const std::string& expected_hash,
                                      bool allow_mismatch) {
  const Checkpoint ck = read_kind(path, kKindExtractor);
  check_hash(ck, path, expected_hash, allow_mismatch);
  Loaded<ExtractorModel> out{ExtractorModel(ExtractorDims::from_json(ck.meta.at("dims"))),
                             Vocabulary::from_words(ck.meta.at("vocab").get<std::vector<std::string>>()),
                             ck.config_hash, ck.meta};
  ck.restore(out.model.params());
  return out;
}

Loaded<FFExtractorModel> load_ff_extractor(const fs::path& path, const std::string& expected_hash,
                                           bool allow_mismatch) {
  const Checkpoint ck = read_kind(path, kKindFFExtractor);
  check_hash(ck, path, expected_hash, allow_mismatch);
  Loaded<FFExtractorModel> out{FFExtractorModel(ExtractorDims::from_json(ck.meta.at("dims"))),
                               Vocabulary::from_words(ck.meta.at("vocab").get<std::vector<std::string>>()),
                               ck.config_hash, ck.meta};
  ck.restore(out.model.params());
  return out;
}

Loaded<AbstractorModel> load_abstractor(const fs::path& path, const std::string& expected_hash,
                                        bool allow_mismatch) {
  const Checkpoint ck = read_kind(path, kKindAbstractor);
  check_hash(ck, path, expected_hash, allow_mismatch);
  Loaded<AbstractorModel> out{AbstractorModel(AbstractorDims::from_json(ck.meta.at("dims"))),
                              Vocabulary::from_words(ck.meta.at("vocab").get<std::vector<std::string>>()),
                              ck.config_hash, ck.meta};
  ck.restore(out.model.params());
  return out;
}

// ---------------------------------------------------------------------------
// Orchestration

Stage parse_stage(const std::string& name) {
  if (name == "ml-abs") return Stage::kMlAbs;
  if (name == "ml-ext") return Stage::kMlExt;
  if (name == "rl") return Stage::kRl;
  if (name == "eval") return Stage::kEval;
  throw std::invalid_argument("unknown stage '" + name + "' (ml-abs|ml-ext|rl|eval)");
}

std::string stage_name(Stage stage) {
  switch (stage) {
    case Stage::kMlAbs: return "ml-abs";
    case Stage::kMlExt: return "ml-ext";
    case Stage::kRl: return "rl";
    case Stage::kEval: return "eval";
  }
  return "eval";
}

fs::path RunPaths::outputs(const std::string& model) const {
  std::string file;
  for (char c : model) file += (c == '+') ? '_' : c;
  return root / ("outputs_" + file + ".jsonl");
}

std::vector<std::string> eval_model_names(const RunConfig& config) {
  if (config.rl.identity_abstractor) return {"ff-ext", "rnn-ext", "rnn-ext+RL"};
  return {"ff-ext", "rnn-ext", "rnn-ext+abs", "rnn-ext+abs+RL", "rnn-ext+abs+RL+rerank"};
}

namespace {

void require_stage(const fs::path& path, Stage missing) {
  if (!fs::exists(path)) {
    throw std::runtime_error("prerequisite stage '" + stage_name(missing) + "' has not been run (missing " +
                             path.string() + ")");
  }
}

class StageLogger {
 public:
  StageLogger(const fs::path& file) : previous_(spdlog::default_logger()) {
    auto console = std::make_shared<spdlog::sinks::stderr_color_sink_mt>();
    auto sink = std::make_shared<spdlog::sinks::basic_file_sink_mt>(file.string(), false);
    auto logger = std::make_shared<spdlog::logger>("summ", spdlog::sinks_init_list{console, sink});
    logger->set_level(previous_->level());
    spdlog::set_default_logger(logger);
  }
  ~StageLogger() { spdlog::set_default_logger(previous_); }

 private:
  std::shared_ptr<spdlog::logger> previous_;
};

struct SystemRun {
  std::vector<SummaryRecord> records;
  double seconds = 0.0;
};

template <class F>
SystemRun run_system(const std::vector<SummaryPair>& pairs, int workers, F&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  SystemRun run;
  run.records = parallel_map<SummaryRecord>(pairs.size(), workers, [&](std::size_t i) {
    SummaryRecord r = fn(pairs[i]);
    r.id = pairs[i].document.id;
    return r;
  });
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

SummaryRecord record_of(SummaryOutput out) {
  SummaryRecord r;
  r.indices = std::move(out.indices);
  r.sentences = std::move(out.sentences);
  r.stopped_by_eoe = out.stopped_by_eoe;
  return r;
}

void stage_ml_abs(const RunConfig& config, const RunPaths& paths, const Dataset& data) {
  AbstractorModel model(abstractor_dims(config, data.vocab), derive_seed(config.seed, fnv1a64("abs-init"), 0));
  const MlResult r = train_abstractor_ml(model, data, MlOptions::from(config, "ml-abs"));
  spdlog::info("ml-abs: {} updates, best validation {:.4f}", r.updates, r.best_validation);
  save_abstractor(paths.abstractor(), model, data.vocab, config.hash());
}

void stage_ml_ext(const RunConfig& config, const RunPaths& paths, const Dataset& data) {
  const ExtractorDims dims = extractor_dims(config, data.vocab);
  ExtractorModel rnn(dims, derive_seed(config.seed, fnv1a64("ext-init"), 0));
  const MlResult r = train_extractor_ml(rnn, data, MlOptions::from(config, "ml-ext"));
  spdlog::info("ml-ext: {} updates, best validation {:.4f}", r.updates, r.best_validation);
  save_extractor(paths.extractor_ml(), rnn, data.vocab, config.hash(), "ml-ext");

  FFExtractorModel ff(dims, derive_seed(config.seed, fnv1a64("ff-init"), 0));
  const MlResult rf = train_ff_extractor(ff, data, MlOptions::from(config, "ml-ff"));
  spdlog::info("ml-ff: {} updates, best validation {:.4f}", rf.updates, rf.best_validation);
  save_ff_extractor(paths.ff_extractor(), ff, data.vocab, config.hash());
}

void stage_rl(const RunConfig& config, const RunPaths& paths, const Dataset& data,
              const ExperimentOptions& options) {
  require_stage(paths.extractor_ml(), Stage::kMlExt);
  if (!config.rl.identity_abstractor) require_stage(paths.abstractor(), Stage::kMlAbs);
  const std::string hash = config.hash();
  auto ext = load_extractor(paths.extractor_ml(), hash, options.allow_config_mismatch);
  std::optional<Loaded<AbstractorModel>> abs;
  if (!config.rl.identity_abstractor) {
    abs.emplace(load_abstractor(paths.abstractor(), hash, options.allow_config_mismatch));
  }
  const AbstractorModel* g = abs ? &abs->model : nullptr;
  const auto train = make_rl_examples(data.train, data.vocab, g, config.decode.max_len, config.workers);
  const auto val = make_rl_examples(data.validation, data.vocab, g, config.decode.max_len, config.workers);
  const RlResult r = train_rl(ext.model, train, val, rl_config(config));
  spdlog::info("rl: best validation reward {:.4f} at update {}", r.best_validation_reward, r.best_step);
  write_curve_csv(paths.rl_curve().string(), r.curve);
  save_extractor(paths.extractor_rl(), ext.model, data.vocab, hash, "rl");
}

void stage_eval(const RunConfig& config, const RunPaths& paths, const Dataset& data,
                const ExperimentOptions& options) {
  require_stage(paths.extractor_ml(), Stage::kMlExt);
  require_stage(paths.ff_extractor(), Stage::kMlExt);
  if (!config.rl.identity_abstractor) require_stage(paths.abstractor(), Stage::kMlAbs);
  require_stage(paths.extractor_rl(), Stage::kRl);
  if (data.test.empty()) throw std::runtime_error("eval: the test split is empty");
  const std::string hash = config.hash();
  const bool allow = options.allow_config_mismatch;
  const auto ml = load_extractor(paths.extractor_ml(), hash, allow);
  const auto rl = load_extractor(paths.extractor_rl(), hash, allow);
  const auto ff = load_ff_extractor(paths.ff_extractor(), hash, allow);
  std::optional<Loaded<AbstractorModel>> abs;
  if (!config.rl.identity_abstractor) abs.emplace(load_abstractor(paths.abstractor(), hash, allow));
  const AbstractorModel* g = abs ? &abs->model : nullptr;
  const Vocabulary& vocab = data.vocab;

  SummarizeOptions fixed;
  fixed.use_eoe = false;
  fixed.fixed_k = config.decode.fixed_k;
  fixed.diversity = config.decode.diversity;
  fixed.ngram = config.decode.ngram;
  fixed.max_len = config.decode.max_len;
  SummarizeOptions eoe = fixed;
  eoe.use_eoe = true;
  eoe.max_steps_cap = config.rl.max_steps_cap;

  EvalReport report;
  report.config_hash = hash;
  nlohmann::json timing = nlohmann::json::object();
  for (const std::string& name : eval_model_names(config)) {
    SystemRun run;
    bool fixed_length = true;
    if (name == "ff-ext") {
      run = run_system(data.test, config.workers, [&](const SummaryPair& p) {
        SummaryRecord r;
        if (p.document.sentences.empty()) return r;
        const auto probs = ff_ext_forward(ff.model, encode_sentences(vocab, p.document.sentences));
        r.indices = ff_ext_select(probs, config.decode.fixed_k);
        for (int j : r.indices) r.sentences.push_back(p.document.sentences[static_cast<std::size_t>(j)]);
        return r;
      });
    } else {
      const bool use_rl = name.find("RL") != std::string::npos;
      SummarizeOptions o = use_rl ? eoe : fixed;
      o.mode = name == "rnn-ext" || name == "rnn-ext+RL"   ? SummaryMode::kExtractOnly
               : name.find("rerank") != std::string::npos ? SummaryMode::kRerank
                                                          : SummaryMode::kGreedy;
      fixed_length = !use_rl;
      const ExtractorModel& ext = use_rl ? rl.model : ml.model;
      run = run_system(data.test, config.workers, [&](const SummaryPair& p) {
        return record_of(summarize(p.document, ext, g, vocab, o));
      });
    }
    write_summaries_jsonl(paths.outputs(name), run.records);
    report.models.push_back(score_summaries(name, data.test, run.records, fixed_length));
    timing[name] = {{"seconds", run.seconds}, {"documents", data.test.size()}};
    spdlog::info("eval: {} done in {:.2f}s", name, run.seconds);
  }
  {
    std::ofstream out(paths.report(), std::ios::binary);
    out << report.serialize();
  }
  {
    std::ofstream out(paths.comparison(), std::ios::binary);
    out << compare_models(report.models);
  }
  std::ofstream(paths.timing(), std::ios::binary) << timing.dump(2) << '\n';
}

}  // namespace

void run_experiment(const RunConfig& config, Stage stage, const ExperimentOptions& options) {
  config.validate();
  const RunPaths paths{config.out_dir};
  fs::create_directories(paths.root);
  StageLogger logger(paths.root / (stage_name(stage) + ".log"));
  {
    std::ofstream out(paths.root / "config.toml", std::ios::binary);
    out << config.to_toml();
  }
  spdlog::info("stage {} (config {})", stage_name(stage), config.hash());
  // Checks run before the (possibly slow) data preparation.
  if (stage == Stage::kRl) {
    require_stage(paths.extractor_ml(), Stage::kMlExt);
    if (!config.rl.identity_abstractor) require_stage(paths.abstractor(), Stage::kMlAbs);
  } else if (stage == Stage::kEval) {
    require_stage(paths.extractor_ml(), Stage::kMlExt);
    if (!config.rl.identity_abstractor) require_stage(paths.abstractor(), Stage::kMlAbs);
    require_stage(paths.extractor_rl(), Stage::kRl);
  }
  const Dataset data = prepare_data(config);
  switch (stage) {
    case Stage::kMlAbs: stage_ml_abs(config, paths, data); break;
    case Stage::kMlExt: stage_ml_ext(config, paths, data); break;
    case Stage::kRl: stage_rl(config, paths, data, options); break;
    case Stage::kEval: stage_eval(config, paths, data, options); break;
  }
}

void run_all(const RunConfig& config, const ExperimentOptions& options) {
  if (!config.rl.identity_abstractor) run_experiment(config, Stage::kMlAbs, options);
  run_experiment(config, Stage::kMlExt, options);
  run_experiment(config, Stage::kRl, options);
  run_experiment(config, Stage::kEval, options);
}

}  // namespace summ
