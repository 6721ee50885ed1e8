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

#include "summ/decoding.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "summ/metrics.hpp"
#include "summ/parallel.hpp"

namespace summ {

namespace {

struct Live {
  std::vector<int> ids;
  std::vector<int> attention;
  double log_prob = 0.0;
  int state = 0;
};

struct Expansion {
  std::size_t parent;
  int id;
  double log_prob;  // unpenalized
  double rank;      // penalized
};

}  // namespace

std::vector<BeamHypothesis> beam_search(BeamModel& model, int k, double diversity, int max_len) {
  if (k < 1) throw std::invalid_argument("beam width must be >= 1");
  if (max_len < 1) throw std::invalid_argument("max_len must be >= 1");
  const int end = model.end_id();
  std::vector<Live> beams{Live{{}, {}, 0.0, model.root()}};
  std::vector<BeamHypothesis> finished;

  for (int t = 0; t <= max_len && !beams.empty() && static_cast<int>(finished.size()) < k; ++t) {
    const bool force_end = t == max_len;
    std::vector<Expansion> candidates;
    std::vector<BeamStep> steps;
    steps.reserve(beams.size());
    for (std::size_t b = 0; b < beams.size(); ++b) {
      steps.push_back(model.scores(beams[b].state));
      const auto& lp = steps.back().log_probs;
      std::vector<std::pair<double, int>> children;
      for (int id = 0; id < static_cast<int>(lp.size()); ++id) {
        if (force_end && id != end) continue;
        if (model.is_forbidden(id)) continue;
        if (!std::isfinite(lp[id])) continue;
        if (id != end && creates_repeated_trigram<int>(beams[b].ids, id)) continue;
        children.emplace_back(lp[id], id);
      }
      std::stable_sort(children.begin(), children.end(),
                       [](const auto& a, const auto& c) { return a.first > c.first; });
      const std::size_t keep = std::min<std::size_t>(children.size(), static_cast<std::size_t>(k));
      for (std::size_t r = 0; r < keep; ++r) {
        const double total = beams[b].log_prob + children[r].first;
        candidates.push_back({b, children[r].second, total, total - diversity * static_cast<double>(r)});
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Expansion& a, const Expansion& c) { return a.rank > c.rank; });

    std::vector<Live> next;
    const std::size_t slots = static_cast<std::size_t>(k) - finished.size();
    for (std::size_t i = 0; i < candidates.size() && i < slots; ++i) {
      const Expansion& c = candidates[i];
      const Live& parent = beams[c.parent];
      if (c.id == end) {
        BeamHypothesis h;
        h.ids = parent.ids;
        h.attention = parent.attention;
        h.log_prob = c.log_prob;
        h.normalized = c.log_prob / static_cast<double>(parent.ids.size() + 1);
        h.finished = true;
        finished.push_back(std::move(h));
        continue;
      }
      Live child = parent;
      child.ids.push_back(c.id);
      child.attention.push_back(steps[c.parent].attention_argmax);
      child.log_prob = c.log_prob;
      child.state = model.advance(parent.state, c.id);
      next.push_back(std::move(child));
    }
    beams = std::move(next);
  }
  std::stable_sort(finished.begin(), finished.end(),
                   [](const BeamHypothesis& a, const BeamHypothesis& b) {
                     return a.normalized > b.normalized;
                   });
  return finished;
}

namespace {

class AbstractorBeamModel final : public BeamModel {
 public:
  AbstractorBeamModel(const AbstractorModel& model, const SourceSentence& src)
      : model_(model), src_(src), graph_(&model.params()) {
    enc_ = model.encode(graph_, src_);
    nodes_.push_back(Node{model.initial_state(graph_, enc_), Vocabulary::kStart, std::nullopt});
  }

  int end_id() const override { return Vocabulary::kEnd; }
  bool is_forbidden(int id) const override {
    return id == Vocabulary::kPad || id == Vocabulary::kStart;
  }
  int root() override { return 0; }

  BeamStep scores(int state) override {
    const AbstractorStep& step = ensure(state);
    const Vector dist = extended_distribution(graph_, step, src_);
    BeamStep out;
    out.log_probs.resize(static_cast<std::size_t>(dist.size()));
    for (Eigen::Index i = 0; i < dist.size(); ++i) out.log_probs[static_cast<std::size_t>(i)] = std::log(dist(i));
    Eigen::Index pos = 0;
    graph_.value(step.attention).col(0).maxCoeff(&pos);
    out.attention_argmax = static_cast<int>(pos);
    return out;
  }

  int advance(int state, int id) override {
    const DecoderState next = ensure(state).next;
    const int prev = id < src_.vocab_size ? id : Vocabulary::kUnk;
    nodes_.push_back(Node{next, prev, std::nullopt});
    return static_cast<int>(nodes_.size()) - 1;
  }

 private:
  struct Node {
    DecoderState state;
    int prev;
    std::optional<AbstractorStep> step;
  };

  const AbstractorStep& ensure(int state) {
    Node& n = nodes_.at(static_cast<std::size_t>(state));
    if (!n.step) n.step = model_.decode_step(graph_, enc_, n.state, n.prev);
    return *n.step;
  }

  const AbstractorModel& model_;
  const SourceSentence& src_;
  Graph graph_;
  EncodedSource enc_;
  std::vector<Node> nodes_;
};

}  // namespace

std::vector<BeamHypothesis> abstractor_beam_search(const AbstractorModel& model,
                                                   const Vocabulary& vocab, const Tokens& source,
                                                   int k, double diversity, int max_len) {
  if (source.empty()) {
    BeamHypothesis empty;
    empty.finished = true;
    return {empty};
  }
  const SourceSentence src = SourceSentence::build(vocab, source);
  AbstractorBeamModel beam_model(model, src);
  auto hyps = beam_search(beam_model, k, diversity, max_len);
  for (auto& h : hyps) {
    h.words.clear();
    for (std::size_t i = 0; i < h.ids.size(); ++i) {
      if (h.ids[i] == Vocabulary::kUnk) {
        h.words.push_back(src.tokens.at(static_cast<std::size_t>(h.attention[i])));
      } else {
        h.words.push_back(src.word(vocab, h.ids[i]));
      }
    }
  }
  return hyps;
}

int beam_width_for(int num_sentences) {
  if (num_sentences < 1) throw std::invalid_argument("beam_width_for needs at least one sentence");
  if (num_sentences <= 5) return 5;
  if (num_sentences == 6) return 4;
  if (num_sentences <= 8) return 3;
  return 2;
}

SummaryCandidate rerank(const std::vector<std::vector<BeamHypothesis>>& beams, std::size_t n,
                        std::size_t cap) {
  SummaryCandidate best;
  if (beams.empty()) return best;
  std::size_t product = 1;
  bool overflow = false;
  for (const auto& b : beams) {
    if (b.empty()) throw std::invalid_argument("rerank: a sentence has no hypotheses");
    if (!overflow && product > cap / b.size()) overflow = true;
    if (!overflow) product *= b.size();
  }
  auto assemble = [&](const std::vector<int>& choice, SummaryCandidate& c) {
    c.choice = choice;
    c.sentences.clear();
    c.score = 0.0;
    for (std::size_t s = 0; s < beams.size(); ++s) {
      const BeamHypothesis& h = beams[s][static_cast<std::size_t>(choice[s])];
      c.sentences.push_back(h.words);
      c.score += h.normalized;
    }
    const Tokens all = concatenate(c.sentences);
    c.repeated = repeated_ngram_count<std::string>(all, n);
  };

  std::vector<int> choice(beams.size(), 0);
  if (overflow) {
    spdlog::warn("rerank: {} combinations exceed the cap of {}; using the best hypothesis per sentence",
                 overflow ? std::string("too many") : std::to_string(product), cap);
    assemble(choice, best);
    best.fell_back = true;
    return best;
  }
  assemble(choice, best);
  best.enumerated = 1;
  SummaryCandidate cur;
  while (true) {
    std::size_t pos = beams.size();
    while (pos-- > 0) {
      if (++choice[pos] < static_cast<int>(beams[pos].size())) break;
      choice[pos] = 0;
    }
    if (pos == static_cast<std::size_t>(-1)) break;
    assemble(choice, cur);
    ++best.enumerated;
    if (cur.repeated < best.repeated || (cur.repeated == best.repeated && cur.score > best.score)) {
      const std::size_t count = best.enumerated;
      best = cur;
      best.enumerated = count;
    }
  }
  return best;
}

std::vector<Tokens> parallel_abstract(const std::vector<Tokens>& sentences,
                                      const AbstractorModel& model, const Vocabulary& vocab,
                                      int workers, int max_len) {
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  std::vector<Tokens> out(sentences.size());
  parallel_for(sentences.size(), workers, [&](std::size_t i) {
    out[i] = greedy_decode(model, vocab, sentences[i], max_len, true);
  });
  return out;
}

std::vector<Tokens> sequential_abstract(const std::vector<Tokens>& sentences,
                                        const AbstractorModel& model, const Vocabulary& vocab,
                                        int max_len) {
  std::vector<Tokens> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(greedy_decode(model, vocab, s, max_len, true));
  return out;
}

std::vector<std::vector<BeamHypothesis>> parallel_beams(const std::vector<Tokens>& sentences,
                                                        const AbstractorModel& model,
                                                        const Vocabulary& vocab, int workers,
                                                        const AbstractOptions& options) {
  std::vector<std::vector<BeamHypothesis>> out(sentences.size());
  parallel_for(sentences.size(), workers, [&](std::size_t i) {
    out[i] = abstractor_beam_search(model, vocab, sentences[i], options.beam_width,
                                    options.diversity, options.max_len);
  });
  return out;
}

SummaryMode parse_summary_mode(const std::string& name) {
  if (name == "greedy") return SummaryMode::kGreedy;
  if (name == "rerank") return SummaryMode::kRerank;
  if (name == "extract-only") return SummaryMode::kExtractOnly;
  throw std::invalid_argument("unknown summary mode '" + name + "' (greedy|rerank|extract-only)");
}

std::string summary_mode_name(SummaryMode mode) {
  switch (mode) {
    case SummaryMode::kGreedy: return "greedy";
    case SummaryMode::kRerank: return "rerank";
    case SummaryMode::kExtractOnly: return "extract-only";
  }
  return "greedy";
}

SummaryOutput summarize(const Document& doc, const ExtractorModel& extractor,
                        const AbstractorModel* abstractor, const Vocabulary& vocab,
                        const SummarizeOptions& options) {
  SummaryOutput out;
  if (doc.sentences.empty()) return out;
  const SentenceIds ids = encode_sentences(vocab, doc.sentences);
  const int n = static_cast<int>(ids.size());
  const int steps = options.use_eoe ? std::min(n, options.max_steps_cap) : std::min(n, options.fixed_k);
  const ExtractionResult ext =
      run_extractor(extractor, ids, DecodeMode::kGreedy, steps, options.use_eoe);
  out.indices = ext.indices;
  out.stopped_by_eoe = ext.stopped_by_eoe;
  std::vector<Tokens> extracted;
  for (int j : ext.indices) extracted.push_back(doc.sentences[static_cast<std::size_t>(j)]);

  if (options.mode == SummaryMode::kExtractOnly) {
    out.sentences = std::move(extracted);
    return out;
  }
  if (abstractor == nullptr) throw std::invalid_argument("summarize: abstractor required for this mode");
  if (extracted.empty()) return out;
  if (options.mode == SummaryMode::kGreedy) {
    out.sentences = parallel_abstract(extracted, *abstractor, vocab, options.workers, options.max_len);
    return out;
  }
  AbstractOptions ao;
  ao.beam = true;
  ao.beam_width = beam_width_for(static_cast<int>(extracted.size()));
  ao.diversity = options.diversity;
  ao.max_len = options.max_len;
  const auto beams = parallel_beams(extracted, *abstractor, vocab, options.workers, ao);
  out.sentences = rerank(beams, static_cast<std::size_t>(options.ngram)).sentences;
  return out;
}

std::vector<ThroughputSample> measure_throughput(const std::vector<Tokens>& sentences,
                                                 const AbstractorModel& model,
                                                 const Vocabulary& vocab,
                                                 const std::vector<int>& workers, int repeats) {
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  const std::vector<Tokens> reference = sequential_abstract(sentences, model, vocab);
  std::size_t words = 0;
  for (const auto& s : reference) words += s.size();
  std::vector<ThroughputSample> out;
  for (int w : workers) {
    ThroughputSample s;
    s.workers = w;
    s.seconds = std::numeric_limits<double>::infinity();
    for (int r = 0; r < repeats; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto got = parallel_abstract(sentences, model, vocab, w);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      s.seconds = std::min(s.seconds, secs);
      if (got != reference) s.identical_to_serial = false;
    }
    s.sentences_per_sec = static_cast<double>(sentences.size()) / std::max(s.seconds, 1e-12);
    s.words_per_sec = static_cast<double>(words) / std::max(s.seconds, 1e-12);
    out.push_back(s);
  }
  return out;
}

}  // namespace summ
