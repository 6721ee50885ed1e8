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

#include "summ/corpus.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "summ/metrics.hpp"
#include "summ/proxy.hpp"
#include "summ/random.hpp"

namespace summ {

Tokens tokenize(std::string_view text) {
  Tokens tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  };
  for (const char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      flush();
    } else if (c < 0x80 && std::ispunct(c)) {
      flush();
      tokens.emplace_back(1, static_cast<char>(c));
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  flush();
  return tokens;
}

std::string join_tokens(const Tokens& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Vocabulary

namespace {
const std::vector<std::string> kReservedWords = {"<pad>", "<unk>", "<start>",
                                                 "<end>"};
}  // namespace

Vocabulary::Vocabulary() : id_to_token_(kReservedWords) {
  for (int i = 0; i < kNumReserved; ++i) token_to_id_[id_to_token_[i]] = i;
}

Vocabulary Vocabulary::build(const std::vector<SummaryPair>& pairs,
                             std::size_t cap) {
  if (cap < static_cast<std::size_t>(kNumReserved)) {
    throw std::invalid_argument("vocabulary cap must leave room for the " +
                                std::to_string(kNumReserved) +
                                " reserved tokens");
  }
  if (pairs.empty()) throw std::invalid_argument("cannot build a vocabulary from an empty corpus");

  std::unordered_map<std::string, long> freq;
  for (const auto& pair : pairs) {
    for (const auto& s : pair.document.sentences)
      for (const auto& t : s) ++freq[t];
    for (const auto& s : pair.summary)
      for (const auto& t : s) ++freq[t];
  }
  std::vector<std::pair<std::string, long>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary vocab;
  const std::size_t room = cap - kNumReserved;
  for (const auto& [word, count] : ranked) {
    if (vocab.id_to_token_.size() - kNumReserved >= room) break;
    if (vocab.token_to_id_.count(word)) continue;
    vocab.token_to_id_[word] = static_cast<int>(vocab.id_to_token_.size());
    vocab.id_to_token_.push_back(word);
  }
  return vocab;
}

Vocabulary Vocabulary::from_words(const std::vector<std::string>& words) {
  Vocabulary vocab;
  for (const auto& w : words) {
    if (vocab.token_to_id_.count(w)) {
      throw std::invalid_argument("duplicate vocabulary word: " + w);
    }
    vocab.token_to_id_[w] = static_cast<int>(vocab.id_to_token_.size());
    vocab.id_to_token_.push_back(w);
  }
  return vocab;
}

int Vocabulary::encode(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnk : it->second;
}

TokenIds Vocabulary::encode(const Tokens& tokens) const {
  TokenIds ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(encode(t));
  return ids;
}

const std::string& Vocabulary::decode(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    throw std::out_of_range("token id out of range: " + std::to_string(id));
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

bool Vocabulary::contains(const std::string& token) const {
  return token_to_id_.count(token) > 0;
}

std::vector<std::string> Vocabulary::words() const {
  return {id_to_token_.begin() + kNumReserved, id_to_token_.end()};
}

// ---------------------------------------------------------------------------

SummaryPair truncate_pair(const SummaryPair& pair, std::size_t max_src,
                          std::size_t max_tgt) {
  if (max_src == 0 || max_tgt == 0) {
    throw std::invalid_argument("truncation limits must be >= 1");
  }
  SummaryPair out = pair;
  for (auto& s : out.document.sentences)
    if (s.size() > max_src) s.resize(max_src);
  for (auto& s : out.summary)
    if (s.size() > max_tgt) s.resize(max_tgt);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic corpus

WordClass synthetic_word_class(int word_index, std::size_t vocab_size) {
  const auto v = static_cast<double>(vocab_size);
  const auto w = static_cast<double>(word_index);
  if (w < 0.15 * v) return WordClass::kKey;
  if (w < 0.30 * v) return WordClass::kFiller;
  return WordClass::kContent;
}

namespace {

struct ClassRanges {
  std::vector<int> key, filler, content;
};

ClassRanges class_ranges(std::size_t vocab_size) {
  ClassRanges r;
  for (int i = 0; i < static_cast<int>(vocab_size); ++i) {
    switch (synthetic_word_class(i, vocab_size)) {
      case WordClass::kKey: r.key.push_back(i); break;
      case WordClass::kFiller: r.filler.push_back(i); break;
      case WordClass::kContent: r.content.push_back(i); break;
    }
  }
  return r;
}

std::string word(int i) { return "w" + std::to_string(i); }

// Salient sentences draw a key word with probability 0.45, distractors with
// 0.05; fillers appear at the same rate in both.
constexpr double kSalientKeyRate = 0.45;
constexpr double kDistractorKeyRate = 0.05;
constexpr double kFillerRate = 0.25;
constexpr std::size_t kMinLen = 8;
constexpr std::size_t kMaxLen = 14;

Tokens make_sentence(Rng& rng, const ClassRanges& classes, bool salient) {
  const std::size_t len = kMinLen + uniform_index(rng, kMaxLen - kMinLen + 1);
  const double key_rate = salient ? kSalientKeyRate : kDistractorKeyRate;
  Tokens s;
  s.reserve(len);
  bool has_non_filler = false;
  for (std::size_t i = 0; i < len; ++i) {
    const double u = uniform01(rng);
    const std::vector<int>* pool;
    if (u < key_rate) {
      pool = &classes.key;
    } else if (u < key_rate + kFillerRate) {
      pool = &classes.filler;
    } else {
      pool = &classes.content;
    }
    if (pool->empty()) pool = &classes.content;
    s.push_back(word((*pool)[uniform_index(rng, pool->size())]));
    has_non_filler |= pool != &classes.filler;
  }
  if (!has_non_filler) s.back() = word(classes.content[uniform_index(rng, classes.content.size())]);
  return s;
}

Tokens compress(const Tokens& sentence, std::size_t vocab_size) {
  Tokens out;
  for (const auto& t : sentence) {
    const int idx = std::stoi(t.substr(1));
    if (synthetic_word_class(idx, vocab_size) != WordClass::kFiller) out.push_back(t);
  }
  return out;
}

}  // namespace

std::vector<SummaryPair> generate_synthetic_corpus(const SyntheticSpec& spec) {
  if (spec.n_docs == 0 || spec.sents_per_doc == 0 || spec.salient_per_doc == 0) {
    throw std::invalid_argument("synthetic corpus counts must be positive");
  }
  if (spec.salient_per_doc > spec.sents_per_doc) {
    throw std::invalid_argument("salient_per_doc must not exceed sents_per_doc");
  }
  if (spec.vocab_size < 10) throw std::invalid_argument("synthetic vocab_size must be >= 10");
  if (spec.noise_rate < 0.0 || spec.noise_rate > 1.0) {
    throw std::invalid_argument("noise_rate must be in [0, 1]");
  }

  const ClassRanges classes = class_ranges(spec.vocab_size);
  Rng rng(spec.seed);
  std::vector<SummaryPair> corpus;
  corpus.reserve(spec.n_docs);

  std::vector<std::size_t> order(spec.sents_per_doc);
  for (std::size_t d = 0; d < spec.n_docs; ++d) {
    SummaryPair pair;
    pair.document.id = "syn-" + std::to_string(d);
    for (;;) {
      std::iota(order.begin(), order.end(), 0);
      // Partial Fisher-Yates: the first salient_per_doc slots are salient.
      for (std::size_t i = 0; i < spec.salient_per_doc; ++i) {
        const std::size_t j = i + uniform_index(rng, order.size() - i);
        std::swap(order[i], order[j]);
      }
      std::vector<int> salient(order.begin(), order.begin() + static_cast<long>(spec.salient_per_doc));
      std::sort(salient.begin(), salient.end());

      pair.document.sentences.clear();
      pair.summary.clear();
      std::size_t next = 0;
      for (std::size_t i = 0; i < spec.sents_per_doc; ++i) {
        const bool is_salient = next < salient.size() && salient[next] == static_cast<int>(i);
        pair.document.sentences.push_back(make_sentence(rng, classes, is_salient));
        if (is_salient) ++next;
      }
      for (int idx : salient) {
        pair.summary.push_back(compress(pair.document.sentences[static_cast<std::size_t>(idx)], spec.vocab_size));
      }
      pair.salient = salient;
      if (match_proxy_labels(pair).indices == salient) break;
    }
    for (auto& s : pair.summary) {
      for (auto& t : s) {
        if (uniform01(rng) < spec.noise_rate) t = word(static_cast<int>(uniform_index(rng, spec.vocab_size)));
      }
    }
    corpus.push_back(std::move(pair));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// JSON lines

namespace {

std::vector<Tokens> tokenize_sentences(const nlohmann::json& array,
                                       const std::string& id,
                                       const char* field) {
  std::vector<Tokens> out;
  if (array.is_null()) return out;
  if (!array.is_array()) {
    throw std::runtime_error("record " + id + ": field '" + field + "' must be an array");
  }
  for (const auto& s : array) {
    Tokens t = tokenize(s.get<std::string>());
    if (t.empty()) {
      spdlog::warn("record {}: dropping empty sentence in '{}'", id, field);
      continue;
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

std::vector<SummaryPair> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<SummaryPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    SummaryPair pair;
    pair.document.id = rec.value("id", std::to_string(line_no - 1));
    pair.document.sentences = tokenize_sentences(rec.value("article", nlohmann::json()), pair.document.id, "article");
    pair.summary = tokenize_sentences(rec.value("abstract", nlohmann::json()), pair.document.id, "abstract");
    if (rec.contains("salient")) pair.salient = rec["salient"].get<std::vector<int>>();
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

void write_jsonl(const std::filesystem::path& path,
                 const std::vector<SummaryPair>& pairs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& pair : pairs) {
    nlohmann::ordered_json rec;
    rec["id"] = pair.document.id;
    auto& article = rec["article"] = nlohmann::ordered_json::array();
    for (const auto& s : pair.document.sentences) article.push_back(join_tokens(s));
    auto& abstract = rec["abstract"] = nlohmann::ordered_json::array();
    for (const auto& s : pair.summary) abstract.push_back(join_tokens(s));
    if (!pair.salient.empty()) rec["salient"] = pair.salient;
    out << rec.dump() << '\n';
  }
}

Split split_validation(const std::vector<SummaryPair>& pairs, double fraction,
                       std::uint64_t seed) {
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, 0x5eed5));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[uniform_index(rng, i)]);
  }
  const auto n_val = static_cast<std::size_t>(fraction * static_cast<double>(pairs.size()) + 0.5);
  Split split;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_val ? split.validation : split.train).push_back(pairs[order[i]]);
  }
  return split;
}

}  // namespace summ
