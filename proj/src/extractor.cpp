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

#include "summ/extractor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace summ {

nlohmann::json ExtractorDims::to_json() const {
  return {{"vocab", vocab}, {"embedding", embedding}, {"filters", filters}, {"hidden", hidden}};
}

ExtractorDims ExtractorDims::from_json(const nlohmann::json& j) {
  ExtractorDims d;
  d.vocab = j.at("vocab").get<int>();
  d.embedding = j.at("embedding").get<int>();
  d.filters = j.at("filters").get<int>();
  d.hidden = j.at("hidden").get<int>();
  return d;
}

// ---------------------------------------------------------------------------

HierarchicalEncoder HierarchicalEncoder::create(ParamSet& params, const ExtractorDims& dims) {
  HierarchicalEncoder e;
  e.embedding_ = params.add("encoder.embedding", dims.vocab, dims.embedding, Init::kNormal);
  for (std::size_t k = 0; k < kConvWidths.size(); ++k) {
    const std::string w = std::to_string(kConvWidths[k]);
    e.conv_w_[k] = params.add("encoder.conv" + w + ".weight", dims.filters, kConvWidths[k] * dims.embedding);
    e.conv_b_[k] = params.add("encoder.conv" + w + ".bias", dims.filters, 1);
  }
  e.forward_ = Lstm::create(params, "encoder.ctx_fwd", dims.sentence_dim(), dims.hidden);
  e.backward_ = Lstm::create(params, "encoder.ctx_bwd", dims.sentence_dim(), dims.hidden);
  e.forward_init_ = InitialState::create(params, "encoder.ctx_fwd", dims.hidden);
  e.backward_init_ = InitialState::create(params, "encoder.ctx_bwd", dims.hidden);
  return e;
}

Var HierarchicalEncoder::encode_sentence(Graph& g, std::span<const int> ids) const {
  if (ids.empty()) throw std::invalid_argument("cannot encode an empty sentence");
  TokenIds padded(ids.begin(), ids.end());
  while (padded.size() < static_cast<std::size_t>(kMinSentenceLength)) padded.push_back(Vocabulary::kPad);
  const Var x = g.embed(embedding_, padded);
  std::array<Var, 3> pooled;
  for (std::size_t k = 0; k < kConvWidths.size(); ++k) {
    pooled[k] = g.conv_relu_maxpool(x, g.param(conv_w_[k]), g.param(conv_b_[k]), kConvWidths[k]);
  }
  return g.concat_rows(pooled);
}

Var HierarchicalEncoder::encode_context(Graph& g, const std::vector<Var>& r) const {
  if (r.empty()) throw std::invalid_argument("cannot encode an empty document");
  return run_bidirectional(g, forward_, backward_, r, forward_init_.on(g), backward_init_.on(g)).states;
}

Var HierarchicalEncoder::encode(Graph& g, const SentenceIds& sentences) const {
  std::vector<Var> r;
  r.reserve(sentences.size());
  for (const auto& s : sentences) r.push_back(encode_sentence(g, s));
  return encode_context(g, r);
}

// ---------------------------------------------------------------------------

PointerDecoder PointerDecoder::create(ParamSet& params, const ExtractorDims& dims) {
  const int h = dims.hidden;
  const int ctx = dims.context_dim();
  PointerDecoder p;
  p.lstm_ = Lstm::create(params, "pointer.lstm", ctx, h);
  p.init_ = InitialState::create(params, "pointer.lstm", h);
  p.start_ = params.add("pointer.start", ctx, 1);
  p.glimpse_v_ = params.add("pointer.glimpse_v", 1, h);
  p.glimpse_w1_ = params.add("pointer.glimpse_w1", h, ctx);
  p.glimpse_w2_ = params.add("pointer.glimpse_w2", h, h);
  p.pointer_v_ = params.add("pointer.pointer_v", 1, h);
  p.pointer_w1_ = params.add("pointer.pointer_w1", h, ctx);
  p.pointer_w2_ = params.add("pointer.pointer_w2", h, h);
  p.eoe_ = params.add("pointer.eoe", ctx, 1);
  return p;
}

PointerContext PointerDecoder::prepare(Graph& g, Var sentence_states, bool with_eoe) const {
  PointerContext ctx;
  ctx.num_sentences = static_cast<int>(g.value(sentence_states).cols());
  ctx.with_eoe = with_eoe;
  if (with_eoe) {
    const Var parts[] = {sentence_states, g.param(eoe_)};
    ctx.candidates = g.concat_cols(parts);
  } else {
    ctx.candidates = sentence_states;
  }
  ctx.glimpse_keys = g.matmul(g.param(glimpse_w1_), ctx.candidates);
  ctx.pointer_keys = g.matmul(g.param(pointer_w1_), ctx.candidates);
  return ctx;
}

PointerStepOutput PointerDecoder::step(Graph& g, const PointerContext& ctx, Var z,
                                       std::span<const int> selected, bool apply_mask) const {
  PointerStepOutput out;
  const Var query = g.matmul(g.param(glimpse_w2_), z);
  const Var scores = g.matmul(g.param(glimpse_v_), g.tanh(g.add_colwise(ctx.glimpse_keys, query)));
  out.glimpse_weights = g.softmax(scores);
  out.glimpse = g.matmul(ctx.glimpse_keys, g.transpose(out.glimpse_weights));
  const Var pq = g.matmul(g.param(pointer_w2_), out.glimpse);
  out.logits = g.matmul(g.param(pointer_v_), g.tanh(g.add_colwise(ctx.pointer_keys, pq)));
  out.mask.assign(static_cast<std::size_t>(ctx.num_candidates()), true);
  if (apply_mask) {
    for (int j : selected) {
      if (j < 0 || j >= ctx.num_sentences) throw std::out_of_range("selected index out of range");
      out.mask[static_cast<std::size_t>(j)] = false;
    }
    out.log_probs = g.masked_log_softmax(out.logits, out.mask);
  } else {
    out.log_probs = g.log_softmax(out.logits);
  }
  return out;
}

// ---------------------------------------------------------------------------

Critic Critic::create(ParamSet& params, const ExtractorDims& dims) {
  const int h = dims.hidden;
  const int ctx = dims.context_dim();
  Critic c;
  c.lstm_ = Lstm::create(params, "critic.lstm", ctx, h);
  c.init_ = InitialState::create(params, "critic.lstm", h);
  c.start_ = params.add("critic.start", ctx, 1);
  c.glimpse_v_ = params.add("critic.glimpse_v", 1, h);
  c.glimpse_w1_ = params.add("critic.glimpse_w1", h, ctx);
  c.glimpse_w2_ = params.add("critic.glimpse_w2", h, h);
  c.head_w_ = params.add("critic.head_w", 1, h);
  c.head_b_ = params.add("critic.head_b", 1, 1, Init::kZero);
  return c;
}

std::vector<Var> Critic::values(Graph& g, Var sentence_states,
                                std::span<const int> actions) const {
  const int n = static_cast<int>(g.value(sentence_states).cols());
  const Var keys = g.matmul(g.param(glimpse_w1_), sentence_states);
  LstmState state = init_.on(g);
  Var input = g.param(start_);
  std::vector<Var> out;
  out.reserve(actions.size());
  for (int a : actions) {
    state = lstm_.step(g, input, state);
    const Var query = g.matmul(g.param(glimpse_w2_), state.h);
    const Var scores = g.matmul(g.param(glimpse_v_), g.tanh(g.add_colwise(keys, query)));
    const Var e = g.matmul(keys, g.transpose(g.softmax(scores)));
    out.push_back(g.affine(g.param(head_w_), e, g.param(head_b_)));
    if (a >= 0 && a < n) input = g.col(sentence_states, a);
  }
  return out;
}

// ---------------------------------------------------------------------------

ExtractorModel::ExtractorModel(const ExtractorDims& dims, std::uint64_t seed)
    : dims_(dims),
      encoder_(HierarchicalEncoder::create(params_, dims)),
      pointer_(PointerDecoder::create(params_, dims)),
      critic_(Critic::create(params_, dims)) {
  params_.initialize(seed);
}

namespace {

// Shared decoder recurrence; `choose` returns the action for step t given the
// masked log-probabilities, or -1 to stop.
PolicyTrace policy_loop(Graph& g, const ExtractorModel& model, Var sentence_states,
                        int num_sentences, int max_steps, bool use_eoe,
                        const std::function<int(std::size_t, const PointerStepOutput&, const Matrix&)>& choose) {
  const PointerDecoder& ptr = model.pointer();
  const PointerContext ctx = ptr.prepare(g, sentence_states, use_eoe);
  const int limit = std::min(max_steps, num_sentences);

  PolicyTrace trace;
  trace.num_sentences = num_sentences;
  LstmState state = ptr.initial_state(g);
  Var input = ptr.start_input(g);
  std::vector<int> selected;
  while (static_cast<int>(selected.size()) < limit) {
    state = ptr.advance(g, input, state);
    PointerStepOutput step = ptr.step(g, ctx, state.h, selected, true);
    const int action = choose(trace.actions.size(), step, g.value(step.log_probs));
    if (action < 0) break;
    trace.actions.push_back(action);
    trace.log_probs.push_back(g.pick(step.log_probs, action));
    trace.steps.push_back(std::move(step));
    if (use_eoe && action == ctx.eoe_index()) {
      trace.stopped_by_eoe = true;
      break;
    }
    selected.push_back(action);
    input = g.col(ctx.candidates, action);
  }
  return trace;
}

}  // namespace

PolicyTrace run_policy(Graph& g, const ExtractorModel& model, Var sentence_states,
                       int num_sentences, DecodeMode mode, int max_steps, bool use_eoe,
                       Rng* rng) {
  if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
  if (mode == DecodeMode::kSample && rng == nullptr) {
    throw std::invalid_argument("sampling needs a random generator");
  }
  return policy_loop(g, model, sentence_states, num_sentences, max_steps, use_eoe,
                     [&](std::size_t, const PointerStepOutput& step, const Matrix& logp) {
                       const int m = static_cast<int>(step.mask.size());
                       int action = 0;
                       if (mode == DecodeMode::kGreedy) {
                         double best = -std::numeric_limits<double>::infinity();
                         for (int j = 0; j < m; ++j) {
                           if (step.mask[static_cast<std::size_t>(j)] && logp(0, j) > best) {
                             best = logp(0, j);
                             action = j;
                           }
                         }
                         return action;
                       }
                       std::vector<double> probs(static_cast<std::size_t>(m));
                       for (int j = 0; j < m; ++j) {
                         probs[static_cast<std::size_t>(j)] =
                             step.mask[static_cast<std::size_t>(j)] ? std::exp(logp(0, j)) : 0.0;
                       }
                       return static_cast<int>(sample_categorical(*rng, probs));
                     });
}

PolicyTrace replay_policy(Graph& g, const ExtractorModel& model, Var sentence_states,
                          int num_sentences, std::span<const int> actions, bool use_eoe) {
  if (actions.empty()) throw std::invalid_argument("replay needs at least one action");
  std::vector<bool> seen(static_cast<std::size_t>(num_sentences), false);
  for (std::size_t t = 0; t < actions.size(); ++t) {
    const int a = actions[t];
    const bool eoe = use_eoe && a == num_sentences;
    if (eoe && t + 1 != actions.size()) throw std::invalid_argument("EOE must be the last action");
    if (!eoe && (a < 0 || a >= num_sentences || seen[static_cast<std::size_t>(a)])) {
      throw std::invalid_argument("invalid or repeated action " + std::to_string(a));
    }
    if (!eoe) seen[static_cast<std::size_t>(a)] = true;
  }
  return policy_loop(g, model, sentence_states, num_sentences, static_cast<int>(actions.size()), use_eoe,
                     [&](std::size_t t, const PointerStepOutput&, const Matrix&) {
                       return t < actions.size() ? actions[t] : -1;
                     });
}

ExtractionResult run_extractor(const ExtractorModel& model, const SentenceIds& doc,
                               DecodeMode mode, int max_steps, bool use_eoe, Rng* rng) {
  ExtractionResult result;
  if (doc.empty()) return result;
  Graph g(&model.params());
  const Var h = model.encoder().encode(g, doc);
  const PolicyTrace trace = run_policy(g, model, h, static_cast<int>(doc.size()), mode,
                                       max_steps, use_eoe, rng);
  for (std::size_t t = 0; t < trace.actions.size(); ++t) {
    result.log_probs.push_back(g.scalar(trace.log_probs[t]));
    if (trace.actions[t] < trace.num_sentences) result.indices.push_back(trace.actions[t]);
  }
  result.stopped_by_eoe = trace.stopped_by_eoe;
  return result;
}

Var extractor_ml_loss(Graph& g, const ExtractorModel& model, const SentenceIds& doc,
                      std::span<const int> labels) {
  if (labels.empty()) throw std::invalid_argument("extractor loss needs at least one label");
  const int n = static_cast<int>(doc.size());
  for (int j : labels) {
    if (j < 0 || j >= n) {
      throw std::out_of_range("label index " + std::to_string(j) + " outside a " +
                              std::to_string(n) + "-sentence document");
    }
  }
  const PointerDecoder& ptr = model.pointer();
  const Var h = model.encoder().encode(g, doc);
  const PointerContext ctx = ptr.prepare(g, h, false);
  LstmState state = ptr.initial_state(g);
  Var input = ptr.start_input(g);
  std::vector<Var> terms;
  terms.reserve(labels.size());
  for (int j : labels) {
    state = ptr.advance(g, input, state);
    const PointerStepOutput step = ptr.step(g, ctx, state.h, {}, false);
    terms.push_back(g.pick(step.log_probs, j));
    input = g.col(h, j);
  }
  return g.scale(g.sum(g.concat_rows(terms)), -1.0);
}

SentenceIds encode_sentences(const Vocabulary& vocab, const std::vector<Tokens>& sentences) {
  SentenceIds out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(vocab.encode(s));
  return out;
}

}  // namespace summ
