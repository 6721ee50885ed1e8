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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "summ/corpus.hpp"
#include "summ/layers.hpp"
#include "summ/proxy.hpp"

namespace summ {

struct AbstractorDims {
  int vocab = 30000;
  int embedding = 128;
  int hidden = 256;

  nlohmann::json to_json() const;
  static AbstractorDims from_json(const nlohmann::json& j);
};

// A source sentence mapped onto the extended vocabulary: in-vocabulary
// words keep their id, each distinct OOV word gets id vocab_size + k.
struct SourceSentence {
  Tokens tokens;
  TokenIds input_ids;     // OOV -> UNK, fed to the encoder
  TokenIds extended_ids;  // per position
  std::vector<std::string> oov_words;
  int vocab_size = 0;

  static SourceSentence build(const Vocabulary& vocab, const Tokens& tokens);
  int extended_size() const { return vocab_size + static_cast<int>(oov_words.size()); }
  // Extended id of a target word, or UNK when it is neither in the vocabulary
  // nor in the source.
  int target_id(const Vocabulary& vocab, const std::string& word) const;
  std::string word(const Vocabulary& vocab, int extended_id) const;
};

struct EncodedSource {
  Var states;       // (2H x L)
  Var states_t;     // (L x 2H)
  LstmState decoder_init;
};

struct DecoderState {
  LstmState lstm;
  Var context;  // previous attention context, fed back as input
};

struct AbstractorStep {
  Var generation;  // softmax over the fixed vocabulary (V x 1)
  Var attention;   // (L x 1)
  Var context;     // attention-weighted encoder state
  Var p_copy;      // (1 x 1)
  DecoderState next;
};

class AbstractorModel {
 public:
  explicit AbstractorModel(const AbstractorDims& dims, std::uint64_t seed = 1);

  const AbstractorDims& dims() const { return dims_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }

  EncodedSource encode(Graph& g, const SourceSentence& src) const;
  DecoderState initial_state(Graph& g, const EncodedSource& enc) const;

  // Bilinear attention: score_i = h_i^T W_attn z.
  Var attention(Graph& g, const EncodedSource& enc, Var z) const;

  // `prev_input` is a fixed-vocabulary id (OOV words enter as UNK).
  AbstractorStep decode_step(Graph& g, const EncodedSource& enc, const DecoderState& state,
                             int prev_input) const;

  ParamId embedding() const { return embedding_; }
  ParamId copy_bias() const { return copy_bias_; }

 private:
  AbstractorDims dims_;
  ParamSet params_;
  ParamId embedding_;
  Lstm enc_fwd_, enc_bwd_, decoder_;
  ParamId init_h_w_, init_h_b_, init_c_w_, init_c_b_;
  ParamId attn_;
  ParamId out_w_, out_b_;
  ParamId copy_ctx_, copy_state_, copy_input_, copy_bias_;
};

// p_copy * (attention scattered onto source words) + (1 - p_copy) *
// generation softmax, over the extended vocabulary.
Vector extended_distribution(const Graph& g, const AbstractorStep& step,
                             const SourceSentence& src);

// Sum of -log P(target token) over the target plus END under teacher forcing,
// using the full mixture probability. Writes the token count to `count`.
Var abstractor_nll(Graph& g, const AbstractorModel& model, const Vocabulary& vocab,
                   const SentencePair& pair, int& count);

// Mean negative log-likelihood per target token over all pairs.
Var abstractor_ml_loss(Graph& g, const AbstractorModel& model, const Vocabulary& vocab,
                       std::span<const SentencePair> pairs);

inline constexpr int kDefaultMaxDecodeLength = 30;

// Argmax decoding until END or max_len. An emitted UNK becomes the source
// word with the highest attention weight at that step. With
// `block_trigrams`, an expansion repeating a trigram of the hypothesis is
// never chosen.
Tokens greedy_decode(const AbstractorModel& model, const Vocabulary& vocab,
                     const Tokens& source, int max_len = kDefaultMaxDecodeLength,
                     bool block_trigrams = false);

}  // namespace summ
