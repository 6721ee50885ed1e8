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

// summ: command-line front end for every stage of the summarizer.

#include <spdlog/spdlog.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "plot.hpp"
#include "summ/checkpoint.hpp"
#include "summ/metrics.hpp"
#include "summ/parallel.hpp"
#include "summ/pipeline.hpp"

namespace fs = std::filesystem;
using namespace summ;

namespace {

RunConfig config_or_default(const std::string& path) {
  RunConfig c;
  if (!path.empty()) c = load_config(path);
  else apply_env_overrides(c);
  return c;
}

std::vector<ProxyLabels> aligned_labels(const std::vector<SummaryPair>& pairs,
                                        const std::string& labels_path) {
  std::vector<ProxyLabels> out;
  if (labels_path.empty()) {
    for (const auto& p : pairs) {
      out.push_back(p.document.sentences.empty() || p.summary.empty() ? ProxyLabels{p.document.id, {}}
                                                                      : match_proxy_labels(p));
    }
    return out;
  }
  std::map<std::string, ProxyLabels> by_id;
  for (auto& l : read_labels_jsonl(labels_path)) by_id[l.pair_id] = l;
  for (const auto& p : pairs) {
    auto it = by_id.find(p.document.id);
    if (it == by_id.end()) throw std::runtime_error("no labels for record '" + p.document.id + "'");
    out.push_back(it->second);
  }
  return out;
}

// Training data from a JSONL file: seeded validation split, vocabulary over
// the training part, labels from file (or computed).
Dataset dataset_from_files(const std::string& data_path, const std::string& labels_path,
                           const RunConfig& config) {
  auto pairs = read_jsonl(data_path);
  for (auto& p : pairs) {
    p = truncate_pair(p, config.data.max_sentence_tokens, config.data.max_sentence_tokens);
  }
  const auto labels = aligned_labels(pairs, labels_path);
  std::map<std::string, ProxyLabels> by_id;
  for (const auto& l : labels) by_id[l.pair_id] = l;
  const Split split = split_validation(pairs, config.data.validation_fraction,
                                       derive_seed(config.seed, 0x7a11d, 0));
  Dataset d;
  d.train = split.train;
  d.validation = split.validation;
  for (const auto& p : d.train) d.train_labels.push_back(by_id.at(p.document.id));
  for (const auto& p : d.validation) d.validation_labels.push_back(by_id.at(p.document.id));
  d.vocab = Vocabulary::build(d.train, config.model.vocab_cap);
  return d;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size() || v < 1) throw std::invalid_argument("expected positive integers, got '" + s + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty list '" + s + "'");
  return out;
}

std::string kind_of(const std::string& path) { return Checkpoint::read(path).kind; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"summ: extract-then-rewrite summarization"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

  // synth-data
  SyntheticSpec synth;
  std::string synth_out;
  auto* c_synth = app.add_subcommand("synth-data", "Generate the synthetic corpus as JSONL");
  c_synth->add_option("--n-docs", synth.n_docs)->capture_default_str();
  c_synth->add_option("--vocab-size", synth.vocab_size)->capture_default_str();
  c_synth->add_option("--sents", synth.sents_per_doc)->capture_default_str();
  c_synth->add_option("--salient", synth.salient_per_doc)->capture_default_str();
  c_synth->add_option("--noise", synth.noise_rate)->capture_default_str();
  c_synth->add_option("--seed", synth.seed)->capture_default_str();
  c_synth->add_option("--out", synth_out)->required();

  // evaluate
  std::string eval_hyp, eval_ref, eval_novel = "1,2,3,4";
  bool eval_stem = false;
  auto* c_eval = app.add_subcommand("evaluate", "Score summaries against references");
  c_eval->add_option("--hyp", eval_hyp, "summaries JSONL (id, summary)")->required();
  c_eval->add_option("--ref", eval_ref, "corpus JSONL (id, article, abstract)")->required();
  c_eval->add_flag("--stem", eval_stem, "suffix-strip tokens before ROUGE");
  c_eval->add_option("--novel-ngrams", eval_novel)->capture_default_str();

  // make-labels
  std::string labels_data, labels_out;
  auto* c_labels = app.add_subcommand("make-labels", "Proxy extraction labels");
  c_labels->add_option("--data", labels_data)->required();
  c_labels->add_option("--out", labels_out)->required();

  // train-extractor
  std::string te_data, te_labels, te_arch = "rnn", te_out, te_config;
  auto* c_te = app.add_subcommand("train-extractor", "ML training of rnn-ext or ff-ext");
  c_te->add_option("--data", te_data)->required();
  c_te->add_option("--labels", te_labels);
  c_te->add_option("--arch", te_arch)->check(CLI::IsMember({"rnn", "ff"}))->capture_default_str();
  c_te->add_option("--out-ckpt", te_out)->required();
  c_te->add_option("--config", te_config);

  // extract
  std::string ex_ckpt, ex_data, ex_out;
  int ex_k = 0;
  bool ex_eoe = false;
  auto* c_ex = app.add_subcommand("extract", "Run an extractor");
  c_ex->add_option("--ckpt", ex_ckpt)->required();
  c_ex->add_option("--data", ex_data)->required();
  auto* ex_k_opt = c_ex->add_option("--k", ex_k, "extract exactly k sentences");
  auto* ex_eoe_opt = c_ex->add_flag("--eoe", ex_eoe, "stop at EOE (rnn-ext only)");
  ex_k_opt->excludes(ex_eoe_opt);
  c_ex->add_option("--out", ex_out);

  // train-abstractor
  std::string ta_data, ta_labels, ta_out, ta_config;
  auto* c_ta = app.add_subcommand("train-abstractor", "ML training of the abstractor");
  c_ta->add_option("--data", ta_data)->required();
  c_ta->add_option("--labels", ta_labels);
  c_ta->add_option("--out-ckpt", ta_out)->required();
  c_ta->add_option("--config", ta_config);

  // rewrite
  std::string rw_ckpt, rw_sentence;
  int rw_beam = 0;
  auto* c_rw = app.add_subcommand("rewrite", "Rewrite one sentence");
  c_rw->add_option("--ckpt", rw_ckpt)->required();
  c_rw->add_option("--sentence", rw_sentence)->required();
  c_rw->add_option("--beam", rw_beam, "beam width; 0 = greedy");

  // train-rl
  std::string rl_actor, rl_abs, rl_data, rl_out, rl_log, rl_config_path;
  std::optional<double> rl_gamma, rl_lr;
  std::optional<int> rl_updates;
  auto* c_rl = app.add_subcommand("train-rl", "A2C training of the extractor");
  c_rl->add_option("--actor-ckpt", rl_actor)->required();
  c_rl->add_option("--abs-ckpt", rl_abs, "omit to use the identity rewriter");
  c_rl->add_option("--data", rl_data)->required();
  c_rl->add_option("--gamma", rl_gamma);
  c_rl->add_option("--lr", rl_lr);
  c_rl->add_option("--updates", rl_updates);
  c_rl->add_option("--out-ckpt", rl_out)->required();
  c_rl->add_option("--log", rl_log)->required();
  c_rl->add_option("--config", rl_config_path);

  // plot-curve
  std::string pc_log, pc_out;
  auto* c_pc = app.add_subcommand("plot-curve", "Render a reward-curve CSV");
  c_pc->add_option("--log", pc_log)->required();
  c_pc->add_option("--out", pc_out, "output prefix (default: the log path)");

  // summarize
  std::string sm_ext, sm_abs, sm_data, sm_mode = "greedy", sm_out;
  int sm_workers = 1, sm_fixed_k = 0;
  auto* c_sm = app.add_subcommand("summarize", "Extract and rewrite");
  c_sm->add_option("--ext-ckpt", sm_ext)->required();
  c_sm->add_option("--abs-ckpt", sm_abs);
  c_sm->add_option("--data", sm_data)->required();
  c_sm->add_option("--mode", sm_mode)->check(CLI::IsMember({"greedy", "rerank", "extract-only"}))->capture_default_str();
  c_sm->add_option("--workers", sm_workers)->check(CLI::PositiveNumber);
  c_sm->add_option("--fixed-k", sm_fixed_k, "extract k sentences instead of stopping at EOE");
  c_sm->add_option("--out", sm_out)->required();

  // benchmark
  std::string bm_abs, bm_data, bm_workers = "1,2,4,8";
  int bm_sentences = 256, bm_repeats = 3;
  auto* c_bm = app.add_subcommand("benchmark", "Parallel rewriting throughput");
  c_bm->add_option("--abs-ckpt", bm_abs, "omit for a randomly initialized small model");
  c_bm->add_option("--data", bm_data, "omit for synthetic sentences");
  c_bm->add_option("--workers", bm_workers)->capture_default_str();
  c_bm->add_option("--sentences", bm_sentences)->capture_default_str();
  c_bm->add_option("--repeats", bm_repeats)->capture_default_str();

  // run
  std::string run_config, run_stage = "all";
  bool run_allow = false;
  auto* c_run = app.add_subcommand("run", "Run pipeline stages from a config file");
  c_run->add_option("--config", run_config)->required();
  c_run->add_option("--stage", run_stage)
      ->check(CLI::IsMember({"ml-abs", "ml-ext", "rl", "eval", "all"}))
      ->capture_default_str();
  c_run->add_flag("--allow-config-mismatch", run_allow);

  // compare
  std::vector<std::string> cmp_reports;
  std::string cmp_sort;
  auto* c_cmp = app.add_subcommand("compare", "Compare evaluation reports");
  c_cmp->add_option("--report", cmp_reports, "report.json files")->required();
  c_cmp->add_option("--sort-by", cmp_sort);

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*c_synth) {
      write_jsonl(synth_out, generate_synthetic_corpus(synth));
      spdlog::info("wrote {} documents to {}", synth.n_docs, synth_out);
    } else if (*c_eval) {
      const auto refs = read_jsonl(eval_ref);
      const auto hyps = read_summaries_jsonl(eval_hyp);
      std::map<std::string, const SummaryRecord*> by_id;
      for (const auto& h : hyps) by_id[h.id] = &h;
      std::vector<SummaryPair> pairs;
      std::vector<SummaryRecord> recs;
      for (const auto& p : refs) {
        auto it = by_id.find(p.document.id);
        if (it == by_id.end()) continue;
        pairs.push_back(p);
        recs.push_back(*it->second);
      }
      if (pairs.empty()) throw std::runtime_error("no summary ids match the reference file");
      if (pairs.size() != hyps.size()) spdlog::warn("{} summaries had no reference", hyps.size() - pairs.size());
      const ModelReport m = score_summaries(eval_hyp, pairs, recs, false, eval_stem);
      std::printf("documents  %zu\n", pairs.size());
      std::printf("ROUGE-1 F1 %.4f\nROUGE-2 F1 %.4f\nROUGE-L F1 %.4f\n", m.metrics.at("rouge1"),
                  m.metrics.at("rouge2"), m.metrics.at("rougeL"));
      for (int n : parse_int_list(eval_novel)) {
        double total = 0.0;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          total += novel_ngram_ratio(recs[i].sentences, pairs[i].document, static_cast<std::size_t>(n));
        }
        std::printf("novel %d-gram %.4f\n", n, total / static_cast<double>(pairs.size()));
      }
    } else if (*c_labels) {
      const auto pairs = read_jsonl(labels_data);
      write_labels_jsonl(labels_out, aligned_labels(pairs, ""));
    } else if (*c_te) {
      const RunConfig config = config_or_default(te_config);
      const Dataset data = dataset_from_files(te_data, te_labels, config);
      const ExtractorDims dims = extractor_dims(config, data.vocab);
      if (te_arch == "rnn") {
        ExtractorModel m(dims, derive_seed(config.seed, fnv1a64("ext-init"), 0));
        train_extractor_ml(m, data, MlOptions::from(config, "ml-ext"));
        save_extractor(te_out, m, data.vocab, config.hash(), "ml-ext");
      } else {
        FFExtractorModel m(dims, derive_seed(config.seed, fnv1a64("ff-init"), 0));
        train_ff_extractor(m, data, MlOptions::from(config, "ml-ff"));
        save_ff_extractor(te_out, m, data.vocab, config.hash());
      }
    } else if (*c_ex) {
      const auto pairs = read_jsonl(ex_data);
      const std::string kind = kind_of(ex_ckpt);
      if (!ex_eoe && ex_k < 1) throw std::invalid_argument("extract needs --k N or --eoe");
      std::optional<Loaded<ExtractorModel>> rnn;
      std::optional<Loaded<FFExtractorModel>> ff;
      if (kind == kKindFFExtractor) {
        if (ex_eoe) throw std::invalid_argument("ff-ext has no EOE action; use --k");
        ff.emplace(load_ff_extractor(ex_ckpt));
      } else {
        rnn.emplace(load_extractor(ex_ckpt));
      }
      const Vocabulary& vocab = rnn ? rnn->vocab : ff->vocab;
      std::ostringstream out;
      for (const auto& p : pairs) {
        const SentenceIds ids = encode_sentences(vocab, p.document.sentences);
        std::vector<int> idx;
        if (!ids.empty()) {
          if (ff) {
            idx = ff_ext_select(ff_ext_forward(ff->model, ids), ex_k);
          } else {
            const int steps = ex_eoe ? std::min<int>(static_cast<int>(ids.size()), 8)
                                     : std::min<int>(static_cast<int>(ids.size()), ex_k);
            idx = run_extractor(rnn->model, ids, DecodeMode::kGreedy, steps, ex_eoe).indices;
          }
        }
        out << nlohmann::json{{"id", p.document.id}, {"extract_indices", idx}}.dump() << '\n';
      }
      if (ex_out.empty()) std::cout << out.str();
      else std::ofstream(ex_out, std::ios::binary) << out.str();
    } else if (*c_ta) {
      const RunConfig config = config_or_default(ta_config);
      const Dataset data = dataset_from_files(ta_data, ta_labels, config);
      AbstractorModel m(abstractor_dims(config, data.vocab), derive_seed(config.seed, fnv1a64("abs-init"), 0));
      train_abstractor_ml(m, data, MlOptions::from(config, "ml-abs"));
      save_abstractor(ta_out, m, data.vocab, config.hash());
    } else if (*c_rw) {
      const auto abs = load_abstractor(rw_ckpt);
      const Tokens src = tokenize(rw_sentence);
      Tokens out;
      if (rw_beam > 0) {
        const auto hyps = abstractor_beam_search(abs.model, abs.vocab, src, rw_beam, 1.0, kDefaultMaxDecodeLength);
        if (!hyps.empty()) out = hyps.front().words;
      } else {
        out = greedy_decode(abs.model, abs.vocab, src, kDefaultMaxDecodeLength, true);
      }
      std::cout << join_tokens(out) << '\n';
    } else if (*c_rl) {
      RunConfig config = config_or_default(rl_config_path);
      if (rl_gamma) config.rl.gamma = *rl_gamma;
      if (rl_lr) config.rl.lr = *rl_lr;
      if (rl_updates) config.rl.updates = *rl_updates;
      config.validate();
      auto actor = load_extractor(rl_actor);
      std::optional<Loaded<AbstractorModel>> abs;
      if (!rl_abs.empty()) abs.emplace(load_abstractor(rl_abs));
      auto pairs = read_jsonl(rl_data);
      const Split split = split_validation(pairs, config.data.validation_fraction,
                                           derive_seed(config.seed, 0x7a11d, 0));
      const AbstractorModel* g = abs ? &abs->model : nullptr;
      const auto train = make_rl_examples(split.train, actor.vocab, g, config.decode.max_len, config.workers);
      const auto val = make_rl_examples(split.validation, actor.vocab, g, config.decode.max_len, config.workers);
      const RlResult r = train_rl(actor.model, train, val, rl_config(config));
      write_curve_csv(rl_log, r.curve);
      save_extractor(rl_out, actor.model, actor.vocab, actor.config_hash, "rl");
    } else if (*c_pc) {
      const auto curve = read_curve_csv(pc_log);
      const std::string prefix = pc_out.empty() ? pc_log : pc_out;
      std::ofstream(prefix + ".svg", std::ios::binary) << tools::curve_svg(curve);
      const std::string report = tools::curve_report(curve);
      std::ofstream(prefix + ".txt", std::ios::binary) << report;
      std::cout << report;
    } else if (*c_sm) {
      const auto ext = load_extractor(sm_ext);
      std::optional<Loaded<AbstractorModel>> abs;
      SummarizeOptions o;
      o.mode = parse_summary_mode(sm_mode);
      o.workers = sm_workers;
      if (sm_fixed_k > 0) {
        o.use_eoe = false;
        o.fixed_k = sm_fixed_k;
      }
      if (o.mode != SummaryMode::kExtractOnly) {
        if (sm_abs.empty()) throw std::invalid_argument("--abs-ckpt is required for mode " + sm_mode);
        abs.emplace(load_abstractor(sm_abs));
      }
      std::vector<SummaryRecord> records;
      for (const auto& p : read_jsonl(sm_data)) {
        const SummaryOutput s = summarize(p.document, ext.model, abs ? &abs->model : nullptr, ext.vocab, o);
        records.push_back({p.document.id, s.sentences, s.indices, s.stopped_by_eoe});
      }
      write_summaries_jsonl(sm_out, records);
    } else if (*c_bm) {
      std::optional<Loaded<AbstractorModel>> abs;
      std::unique_ptr<AbstractorModel> fresh;
      Vocabulary vocab;
      std::vector<Tokens> sentences;
      std::vector<SummaryPair> pairs;
      if (!bm_data.empty()) {
        pairs = read_jsonl(bm_data);
      } else {
        SyntheticSpec spec;
        spec.n_docs = static_cast<std::size_t>(bm_sentences / 10 + 1);
        pairs = generate_synthetic_corpus(spec);
      }
      if (!bm_abs.empty()) {
        abs.emplace(load_abstractor(bm_abs));
        vocab = abs->vocab;
      } else {
        vocab = Vocabulary::build(pairs, 30000);
        AbstractorDims d;
        d.vocab = static_cast<int>(vocab.size());
        d.embedding = 32;
        d.hidden = 32;
        fresh = std::make_unique<AbstractorModel>(d, 1);
      }
      for (const auto& p : pairs)
        for (const auto& s : p.document.sentences)
          if (static_cast<int>(sentences.size()) < bm_sentences && !s.empty()) sentences.push_back(s);
      const AbstractorModel& model = abs ? abs->model : *fresh;
      const auto samples = measure_throughput(sentences, model, vocab, parse_int_list(bm_workers), bm_repeats);
      std::printf("sentences %zu  (hardware threads available: %d)\n", sentences.size(), default_workers());
      std::printf("%-8s %-10s %-14s %-12s %-8s %s\n", "workers", "seconds", "sentences/sec", "words/sec",
                  "speedup", "identical");
      for (const auto& s : samples) {
        std::printf("%-8d %-10.4f %-14.1f %-12.1f %-8.2f %s\n", s.workers, s.seconds, s.sentences_per_sec,
                    s.words_per_sec, samples.front().seconds / s.seconds, s.identical_to_serial ? "yes" : "NO");
      }
    } else if (*c_run) {
      const RunConfig config = load_config(run_config);
      ExperimentOptions opts;
      opts.allow_config_mismatch = run_allow;
      if (run_stage == "all") run_all(config, opts);
      else run_experiment(config, parse_stage(run_stage), opts);
    } else if (*c_cmp) {
      std::vector<ModelReport> models;
      for (const auto& path : cmp_reports) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot read " + path);
        const EvalReport r = EvalReport::from_json(nlohmann::json::parse(in));
        for (auto m : r.models) {
          if (cmp_reports.size() > 1) m.name = fs::path(path).parent_path().filename().string() + "/" + m.name;
          models.push_back(m);
        }
      }
      std::cout << compare_models(models, cmp_sort);
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
