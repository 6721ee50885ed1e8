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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "summ/corpus.hpp"
#include "summ/layers.hpp"
#include "summ/random.hpp"

namespace summ {

using SentenceIds = std::vector<TokenIds>;

struct ExtractorDims {
  int vocab = 30000;
  int embedding = 128;
  int filters = 100;  // per window size
  int hidden = 256;   // per direction for the context encoder; decoder width

  int sentence_dim() const { return 3 * filters; }
  int context_dim() const { return 2 * hidden; }

  nlohmann::json to_json() const;
  static ExtractorDims from_json(const nlohmann::json& j);
};

inline constexpr std::array<int, 3> kConvWidths = {3, 4, 5};
inline constexpr int kMinSentenceLength = 5;

// Shared sentence and document encoder (word embedding, convolutional
// sentence encoder, bidirectional LSTM over sentences).
class HierarchicalEncoder {
 public:
  static HierarchicalEncoder create(ParamSet& params, const ExtractorDims& dims);

  // Convolutional representation of one sentence; shorter sentences are
  // padded with PAD to the widest window.
  Var encode_sentence(Graph& g, std::span<const int> ids) const;
  // Context-aware sentence vectors, one column per sentence: (2H x n).
  Var encode_context(Graph& g, const std::vector<Var>& sentence_vectors) const;
  Var encode(Graph& g, const SentenceIds& sentences) const;

  ParamId embedding() const { return embedding_; }

 private:
  ParamId embedding_;
  std::array<ParamId, 3> conv_w_{};
  std::array<ParamId, 3> conv_b_{};
  Lstm forward_;
  Lstm backward_;
  InitialState forward_init_;
  InitialState backward_init_;
};

// Per-document values shared by every decoding step.
struct PointerContext {
  Var candidates;     // (2H x m): sentence vectors, plus v_EOE when enabled
  Var glimpse_keys;   // W_g1 * candidates
  Var pointer_keys;   // W_p1 * candidates
  int num_sentences = 0;
  bool with_eoe = false;
  int eoe_index() const { return num_sentences; }
  int num_candidates() const { return num_sentences + (with_eoe ? 1 : 0); }
};

struct PointerStepOutput {
  Var glimpse_weights;  // (1 x m)
  Var glimpse;          // e_t
  Var logits;           // u_t before masking
  Var log_probs;        // (1 x m)
  std::vector<bool> mask;
};

// The pointer-network decoder with 2-hop attention (glimpse, then pointer).
class PointerDecoder {
 public:
  static PointerDecoder create(ParamSet& params, const ExtractorDims& dims);

  PointerContext prepare(Graph& g, Var sentence_states, bool with_eoe) const;
  LstmState initial_state(Graph& g) const { return init_.on(g); }
  Var start_input(Graph& g) const { return g.param(start_); }
  LstmState advance(Graph& g, Var input, const LstmState& state) const {
    return lstm_.step(g, input, state);
  }
  // `selected` lists already-extracted sentences; with `apply_mask` they are
  // forced to probability zero. The EOE slot is never masked.
  PointerStepOutput step(Graph& g, const PointerContext& ctx, Var decoder_out,
                         std::span<const int> selected, bool apply_mask) const;

  ParamId eoe() const { return eoe_; }

 private:
  Lstm lstm_;
  InitialState init_;
  ParamId start_;
  ParamId glimpse_v_, glimpse_w1_, glimpse_w2_;
  ParamId pointer_v_, pointer_w1_, pointer_w2_;
  ParamId eoe_;
};

// State-value head with the decoder's structure (own LSTM, start vector and
// glimpse) ending in a scalar regression layer.
class Critic {
 public:
  static Critic create(ParamSet& params, const ExtractorDims& dims);

  // b(c_t) for every step of a trajectory. Step t sees the sentence chosen at
  // t-1 as input; the first step sees the learned start vector. An action
  // equal to `num_sentences` (EOE) is never fed back.
  std::vector<Var> values(Graph& g, Var sentence_states,
                          std::span<const int> actions) const;

 private:
  Lstm lstm_;
  InitialState init_;
  ParamId start_;
  ParamId glimpse_v_, glimpse_w1_, glimpse_w2_;
  ParamId head_w_, head_b_;
};

// rnn-ext: encoder (shared weights omega), pointer decoder (actor) and critic
// in one parameter set.
class ExtractorModel {
 public:
  explicit ExtractorModel(const ExtractorDims& dims, std::uint64_t seed = 1);

  const ExtractorDims& dims() const { return dims_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }
  const HierarchicalEncoder& encoder() const { return encoder_; }
  const PointerDecoder& pointer() const { return pointer_; }
  const Critic& critic() const { return critic_; }

 private:
  ExtractorDims dims_;
  ParamSet params_;
  HierarchicalEncoder encoder_;
  PointerDecoder pointer_;
  Critic critic_;
};

enum class DecodeMode { kGreedy, kSample };

// A trajectory recorded on a graph. Actions index document sentences; the
// value `num_sentences` denotes EOE.
struct PolicyTrace {
  int num_sentences = 0;
  std::vector<int> actions;
  std::vector<Var> log_probs;  // log pi(a_t | c_t)
  std::vector<PointerStepOutput> steps;
  bool stopped_by_eoe = false;
};

// Runs the decoder recurrence: after choosing sentence j, its context vector
// is the next decoder input. Stops at EOE (when enabled) or after
// `max_steps` sentences. Already-chosen sentences are always masked.
PolicyTrace run_policy(Graph& g, const ExtractorModel& model, Var sentence_states,
                       int num_sentences, DecodeMode mode, int max_steps,
                       bool use_eoe, Rng* rng);

// Scores a given action sequence under the same masked recurrence.
PolicyTrace replay_policy(Graph& g, const ExtractorModel& model, Var sentence_states,
                          int num_sentences, std::span<const int> actions, bool use_eoe);

struct ExtractionResult {
  std::vector<int> indices;  // real sentence indices in extraction order
  bool stopped_by_eoe = false;
  std::vector<double> log_probs;  // one per step, including the EOE step
};

ExtractionResult run_extractor(const ExtractorModel& model, const SentenceIds& doc,
                               DecodeMode mode, int max_steps, bool use_eoe,
                               Rng* rng = nullptr);

// Teacher-forced cross entropy sum_t -log P(j_t | j_<t) without the repeat
// mask and without EOE.
Var extractor_ml_loss(Graph& g, const ExtractorModel& model, const SentenceIds& doc,
                      std::span<const int> labels);

// Maps tokenized sentences to ids.
SentenceIds encode_sentences(const Vocabulary& vocab, const std::vector<Tokens>& sentences);

}  // namespace summ
