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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace summ {

using Tokens = std::vector<std::string>;
using TokenIds = std::vector<int>;

struct Document {
  std::string id;
  std::vector<Tokens> sentences;
};

// A document with its reference summary. `salient` holds the ground-truth
// salient sentence indices when the pair was produced by the synthetic
// generator and is empty otherwise.
struct SummaryPair {
  Document document;
  std::vector<Tokens> summary;
  std::vector<int> salient;
};

// Lowercases ASCII, splits on whitespace, and emits every ASCII punctuation
// character as its own token.
Tokens tokenize(std::string_view text);

std::string join_tokens(const Tokens& tokens);

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kStart = 2;
  static constexpr int kEnd = 3;
  static constexpr int kNumReserved = 4;

  Vocabulary();

  // Keeps the (cap - kNumReserved) most frequent tokens over all document and
  // summary sentences. Frequency ties are broken lexicographically.
  static Vocabulary build(const std::vector<SummaryPair>& pairs, std::size_t cap);

  // Rebuilds from the id-ordered word list (reserved entries excluded), as
  // stored in checkpoints.
  static Vocabulary from_words(const std::vector<std::string>& words);

  int encode(const std::string& token) const;
  TokenIds encode(const Tokens& tokens) const;
  const std::string& decode(int id) const;
  bool contains(const std::string& token) const;

  std::size_t size() const { return id_to_token_.size(); }
  // Non-reserved words in id order.
  std::vector<std::string> words() const;

 private:
  std::unordered_map<std::string, int> token_to_id_;
  std::vector<std::string> id_to_token_;
};

// Cuts every document sentence to `max_src` tokens and every summary sentence
// to `max_tgt` tokens.
SummaryPair truncate_pair(const SummaryPair& pair, std::size_t max_src,
                          std::size_t max_tgt);

struct SyntheticSpec {
  std::size_t n_docs = 2000;
  std::size_t vocab_size = 200;
  std::size_t sents_per_doc = 10;
  std::size_t salient_per_doc = 3;
  double noise_rate = 0.2;
  std::uint64_t seed = 1;
};

// Synthetic corpus with learnable salience. Words "w0".."w{V-1}" are split
// into key, filler and content classes; salient sentences are rich in key
// words. Each reference sentence is the matching salient sentence with its
// filler words removed, then every token is replaced by a random word with
// probability `noise_rate`. Documents are resampled until, before noise,
// proxy labeling recovers the salient indices exactly.
std::vector<SummaryPair> generate_synthetic_corpus(const SyntheticSpec& spec);

// Word classes used by the generator; exposed for tests.
enum class WordClass { kKey, kFiller, kContent };
WordClass synthetic_word_class(int word_index, std::size_t vocab_size);

// JSON lines: {"id", "article": [..], "abstract": [..]} with an optional
// "salient" array. Sentences are tokenized at load and empty sentences are
// dropped with a warning.
std::vector<SummaryPair> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path,
                 const std::vector<SummaryPair>& pairs);

// Seeded shuffle split; the first element holds the training records.
struct Split {
  std::vector<SummaryPair> train;
  std::vector<SummaryPair> validation;
};
Split split_validation(const std::vector<SummaryPair>& pairs, double fraction,
                       std::uint64_t seed);

}  // namespace summ
