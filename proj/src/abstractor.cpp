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

#include "summ/abstractor.hpp"

#include <spdlog/spdlog.h>

#include <limits>
#include <stdexcept>

#include "summ/metrics.hpp"

namespace summ {

nlohmann::json AbstractorDims::to_json() const {
  return {{"vocab", vocab}, {"embedding", embedding}, {"hidden", hidden}};
}

AbstractorDims AbstractorDims::from_json(const nlohmann::json& j) {
  AbstractorDims d;
  d.vocab = j.at("vocab").get<int>();
  d.embedding = j.at("embedding").get<int>();
  d.hidden = j.at("hidden").get<int>();
  return d;
}

// ---------------------------------------------------------------------------

SourceSentence SourceSentence::build(const Vocabulary& vocab, const Tokens& tokens) {
  if (tokens.empty()) throw std::invalid_argument("abstractor source sentence is empty");
  SourceSentence s;
  s.tokens = tokens;
  s.vocab_size = static_cast<int>(vocab.size());
  for (const auto& t : tokens) {
    const int id = vocab.encode(t);
    s.input_ids.push_back(id);
    if (id != Vocabulary::kUnk || t == vocab.decode(Vocabulary::kUnk)) {
      s.extended_ids.push_back(id);
      continue;
    }
    auto it = std::find(s.oov_words.begin(), s.oov_words.end(), t);
    int k;
    if (it == s.oov_words.end()) {
      k = static_cast<int>(s.oov_words.size());
      s.oov_words.push_back(t);
    } else {
      k = static_cast<int>(it - s.oov_words.begin());
    }
    s.extended_ids.push_back(s.vocab_size + k);
  }
  return s;
}

int SourceSentence::target_id(const Vocabulary& vocab, const std::string& word) const {
  if (vocab.contains(word)) return vocab.encode(word);
  auto it = std::find(oov_words.begin(), oov_words.end(), word);
  if (it != oov_words.end()) return vocab_size + static_cast<int>(it - oov_words.begin());
  return Vocabulary::kUnk;
}

std::string SourceSentence::word(const Vocabulary& vocab, int extended_id) const {
  if (extended_id < vocab_size) return vocab.decode(extended_id);
  return oov_words.at(static_cast<std::size_t>(extended_id - vocab_size));
}

// ---------------------------------------------------------------------------

AbstractorModel::AbstractorModel(const AbstractorDims& dims, std::uint64_t seed) : dims_(dims) {
  const int h = dims.hidden;
  const int e = dims.embedding;
  embedding_ = params_.add("abs.embedding", dims.vocab, e, Init::kNormal);
  enc_fwd_ = Lstm::create(params_, "abs.enc_fwd", e, h);
  enc_bwd_ = Lstm::create(params_, "abs.enc_bwd", e, h);
  decoder_ = Lstm::create(params_, "abs.decoder", e + 2 * h, h);
  init_h_w_ = params_.add("abs.init_h.weight", h, 2 * h);
  init_h_b_ = params_.add("abs.init_h.bias", h, 1);
  init_c_w_ = params_.add("abs.init_c.weight", h, 2 * h);
  init_c_b_ = params_.add("abs.init_c.bias", h, 1);
  attn_ = params_.add("abs.attn", 2 * h, h);
  out_w_ = params_.add("abs.out.weight", e, 3 * h);
  out_b_ = params_.add("abs.out.bias", e, 1);
  copy_ctx_ = params_.add("abs.copy.context", 1, 2 * h);
  copy_state_ = params_.add("abs.copy.state", 1, h);
  copy_input_ = params_.add("abs.copy.input", 1, e);
  copy_bias_ = params_.add("abs.copy.bias", 1, 1);
  params_.initialize(seed);
}

EncodedSource AbstractorModel::encode(Graph& g, const SourceSentence& src) const {
  const Var x = g.embed(embedding_, src.input_ids);
  std::vector<Var> cols;
  cols.reserve(src.input_ids.size());
  for (int j = 0; j < static_cast<int>(src.input_ids.size()); ++j) cols.push_back(g.col(x, j));
  const int h = dims_.hidden;
  const LstmState zero{g.input(Matrix::Zero(h, 1)), g.input(Matrix::Zero(h, 1))};
  const BiLstmOutput out = run_bidirectional(g, enc_fwd_, enc_bwd_, cols, zero, zero);
  EncodedSource enc;
  enc.states = out.states;
  enc.states_t = g.transpose(out.states);
  const Var finals_h[] = {out.forward_final.h, out.backward_final.h};
  const Var finals_c[] = {out.forward_final.c, out.backward_final.c};
  enc.decoder_init.h = g.affine(g.param(init_h_w_), g.concat_rows(finals_h), g.param(init_h_b_));
  enc.decoder_init.c = g.affine(g.param(init_c_w_), g.concat_rows(finals_c), g.param(init_c_b_));
  return enc;
}

DecoderState AbstractorModel::initial_state(Graph& g, const EncodedSource& enc) const {
  return {enc.decoder_init, g.input(Matrix::Zero(2 * dims_.hidden, 1))};
}

Var AbstractorModel::attention(Graph& g, const EncodedSource& enc, Var z) const {
  const Var q = g.matmul(g.param(attn_), z);
  return g.softmax(g.matmul(enc.states_t, q));
}

AbstractorStep AbstractorModel::decode_step(Graph& g, const EncodedSource& enc,
                                            const DecoderState& state, int prev_input) const {
  const int ids[] = {prev_input};
  const Var w = g.embed(embedding_, ids);
  const Var x_parts[] = {w, state.context};
  const LstmState s = decoder_.step(g, g.concat_rows(x_parts), state.lstm);

  AbstractorStep step;
  step.attention = attention(g, enc, s.h);
  step.context = g.matmul(enc.states, step.attention);
  const Var zc[] = {s.h, step.context};
  const Var o = g.tanh(g.affine(g.param(out_w_), g.concat_rows(zc), g.param(out_b_)));
  step.generation = g.softmax(g.matmul(g.param(embedding_), o));
  const Var gate = g.add(g.affine(g.param(copy_ctx_), step.context, g.param(copy_bias_)),
                         g.add(g.matmul(g.param(copy_state_), s.h), g.matmul(g.param(copy_input_), w)));
  step.p_copy = g.sigmoid(gate);
  step.next = {s, step.context};
  return step;
}

// ---------------------------------------------------------------------------

Vector extended_distribution(const Graph& g, const AbstractorStep& step,
                             const SourceSentence& src) {
  const double pc = g.scalar(step.p_copy);
  const Matrix& gen = g.value(step.generation);
  const Matrix& attn = g.value(step.attention);
  Vector dist = Vector::Zero(src.extended_size());
  dist.head(gen.rows()) = (1.0 - pc) * gen.col(0);
  for (std::size_t i = 0; i < src.extended_ids.size(); ++i) {
    dist(src.extended_ids[i]) += pc * attn(static_cast<Eigen::Index>(i), 0);
  }
  return dist;
}

Var abstractor_nll(Graph& g, const AbstractorModel& model, const Vocabulary& vocab,
                   const SentencePair& pair, int& count) {
  if (pair.target.empty()) throw std::invalid_argument("abstractor target is empty");
  const SourceSentence src = SourceSentence::build(vocab, pair.source);
  TokenIds targets;
  for (const auto& w : pair.target) {
    const int id = src.target_id(vocab, w);
    if (id == Vocabulary::kUnk && w != vocab.decode(Vocabulary::kUnk)) {
      spdlog::warn("target word '{}' is neither in the vocabulary nor in the source; scored as UNK", w);
    }
    targets.push_back(id);
  }
  targets.push_back(Vocabulary::kEnd);

  const EncodedSource enc = model.encode(g, src);
  DecoderState state = model.initial_state(g, enc);
  const Var one = g.scalar_input(1.0);
  int prev = Vocabulary::kStart;
  std::vector<Var> logs;
  logs.reserve(targets.size());
  for (int t : targets) {
    const AbstractorStep step = model.decode_step(g, enc, state, prev);
    std::vector<Var> terms;
    if (t < src.vocab_size) {
      terms.push_back(g.mul(g.sub(one, step.p_copy), g.pick(step.generation, t)));
    }
    Matrix indicator = Matrix::Zero(static_cast<Eigen::Index>(src.extended_ids.size()), 1);
    bool copyable = false;
    for (std::size_t i = 0; i < src.extended_ids.size(); ++i) {
      if (src.extended_ids[i] == t) {
        indicator(static_cast<Eigen::Index>(i), 0) = 1.0;
        copyable = true;
      }
    }
    if (copyable) terms.push_back(g.mul(step.p_copy, g.dot(step.attention, g.input(std::move(indicator)))));
    const Var p = terms.size() == 1 ? terms[0] : g.add(terms[0], terms[1]);
    logs.push_back(g.log(p));
    state = step.next;
    prev = t < src.vocab_size ? t : Vocabulary::kUnk;
  }
  count = static_cast<int>(targets.size());
  return g.scale(g.sum(g.concat_rows(logs)), -1.0);
}

Var abstractor_ml_loss(Graph& g, const AbstractorModel& model, const Vocabulary& vocab,
                       std::span<const SentencePair> pairs) {
  if (pairs.empty()) throw std::invalid_argument("abstractor loss needs at least one pair");
  std::vector<Var> sums;
  int total = 0;
  for (const auto& p : pairs) {
    int count = 0;
    sums.push_back(abstractor_nll(g, model, vocab, p, count));
    total += count;
  }
  return g.scale(g.sum(g.concat_rows(sums)), 1.0 / total);
}

Tokens greedy_decode(const AbstractorModel& model, const Vocabulary& vocab,
                     const Tokens& source, int max_len, bool block_trigrams) {
  if (max_len < 1) throw std::invalid_argument("max_len must be >= 1");
  if (source.empty()) return {};
  const SourceSentence src = SourceSentence::build(vocab, source);
  Graph g(&model.params());
  const EncodedSource enc = model.encode(g, src);
  DecoderState state = model.initial_state(g, enc);
  int prev = Vocabulary::kStart;
  TokenIds history;
  Tokens out;
  for (int step_no = 0; step_no < max_len; ++step_no) {
    const AbstractorStep step = model.decode_step(g, enc, state, prev);
    const Vector dist = extended_distribution(g, step, src);
    int best = -1;
    double best_p = -1.0;
    for (int id = 0; id < dist.size(); ++id) {
      if (id == Vocabulary::kPad || id == Vocabulary::kStart) continue;
      if (block_trigrams && creates_repeated_trigram<int>(history, id)) continue;
      if (dist(id) > best_p) {
        best_p = dist(id);
        best = id;
      }
    }
    if (best < 0 || best == Vocabulary::kEnd) break;
    if (best == Vocabulary::kUnk) {
      Eigen::Index pos;
      g.value(step.attention).col(0).maxCoeff(&pos);
      out.push_back(src.tokens[static_cast<std::size_t>(pos)]);
    } else {
      out.push_back(src.word(vocab, best));
    }
    history.push_back(best);
    state = step.next;
    prev = best < src.vocab_size ? best : Vocabulary::kUnk;
  }
  return out;
}

}  // namespace summ
