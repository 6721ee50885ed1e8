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
#include <string>
#include <vector>

#include "summ/abstractor.hpp"
#include "summ/extractor.hpp"

namespace summ {

// Per-step output distribution of a left-to-right decoder.
struct BeamStep {
  std::vector<double> log_probs;  // over the model's output ids
  int attention_argmax = -1;      // source position, for UNK replacement
};

// Decoder seen by beam search. States are integer handles owned by the model.
class BeamModel {
 public:
  virtual ~BeamModel() = default;
  virtual int end_id() const = 0;
  // Ids that may never be emitted (padding, start symbol).
  virtual bool is_forbidden(int id) const = 0;
  virtual int root() = 0;
  virtual BeamStep scores(int state) = 0;
  virtual int advance(int state, int id) = 0;
};

struct BeamHypothesis {
  std::vector<int> ids;            // emitted ids, END excluded
  std::vector<int> attention;      // attention argmax per emitted id
  Tokens words;                    // filled by the abstractor wrapper
  double log_prob = 0.0;           // includes the END step
  double normalized = 0.0;         // log_prob / (ids.size() + 1)
  bool finished = false;
};

// Beam search with within-hypothesis trigram blocking and a sibling-rank
// diversity penalty (the r-th best child of a parent, r = 0, 1, ..., is
// ranked with diversity * r subtracted). At most max_len ids are emitted;
// END is then forced. Results are sorted by normalized score, best first.
std::vector<BeamHypothesis> beam_search(BeamModel& model, int k, double diversity, int max_len);

// Beam search over the abstractor for one source sentence; emitted UNKs are
// replaced by the source word under the argmax attention.
std::vector<BeamHypothesis> abstractor_beam_search(const AbstractorModel& model,
                                                   const Vocabulary& vocab, const Tokens& source,
                                                   int k, double diversity, int max_len);

int beam_width_for(int num_sentences);

struct SummaryCandidate {
  std::vector<int> choice;  // hypothesis index per sentence
  std::vector<Tokens> sentences;
  std::size_t repeated = 0;
  double score = 0.0;       // sum of normalized log-probabilities
  std::size_t enumerated = 0;
  bool fell_back = false;
};

inline constexpr std::size_t kRerankCap = 1000000;

// Picks the combination of one hypothesis per sentence with the fewest
// repeated N-grams over the concatenated summary; ties go to the higher
// score, then to the lexicographically smallest choice vector.
SummaryCandidate rerank(const std::vector<std::vector<BeamHypothesis>>& beams, std::size_t n,
                        std::size_t cap = kRerankCap);

struct AbstractOptions {
  bool beam = false;
  int beam_width = 5;
  double diversity = 1.0;
  int max_len = kDefaultMaxDecodeLength;
};

// Greedy rewriting of every sentence on up to `workers` threads; output
// order and content do not depend on the worker count.
std::vector<Tokens> parallel_abstract(const std::vector<Tokens>& sentences,
                                      const AbstractorModel& model, const Vocabulary& vocab,
                                      int workers, int max_len = kDefaultMaxDecodeLength);
// Single-threaded reference.
std::vector<Tokens> sequential_abstract(const std::vector<Tokens>& sentences,
                                        const AbstractorModel& model, const Vocabulary& vocab,
                                        int max_len = kDefaultMaxDecodeLength);
std::vector<std::vector<BeamHypothesis>> parallel_beams(const std::vector<Tokens>& sentences,
                                                        const AbstractorModel& model,
                                                        const Vocabulary& vocab, int workers,
                                                        const AbstractOptions& options);

enum class SummaryMode { kGreedy, kRerank, kExtractOnly };

SummaryMode parse_summary_mode(const std::string& name);
std::string summary_mode_name(SummaryMode mode);

struct SummarizeOptions {
  SummaryMode mode = SummaryMode::kGreedy;
  bool use_eoe = true;
  int fixed_k = 3;           // extraction count when use_eoe is off
  int max_steps_cap = 8;
  double diversity = 1.0;
  int ngram = 2;
  int max_len = kDefaultMaxDecodeLength;
  int workers = 1;
};

struct SummaryOutput {
  std::vector<int> indices;
  std::vector<Tokens> sentences;
  bool stopped_by_eoe = false;
};

// Extract, then rewrite every extracted sentence. An empty document yields
// an empty summary. `abstractor` may be null in extract-only mode.
SummaryOutput summarize(const Document& doc, const ExtractorModel& extractor,
                        const AbstractorModel* abstractor, const Vocabulary& vocab,
                        const SummarizeOptions& options);

struct ThroughputSample {
  int workers = 1;
  double seconds = 0.0;
  double sentences_per_sec = 0.0;
  double words_per_sec = 0.0;
  bool identical_to_serial = true;
};

// Times greedy rewriting of `sentences` for each worker count (best of
// `repeats`) and checks every output against the workers = 1 output.
std::vector<ThroughputSample> measure_throughput(const std::vector<Tokens>& sentences,
                                                 const AbstractorModel& model,
                                                 const Vocabulary& vocab,
                                                 const std::vector<int>& workers, int repeats);

}  // namespace summ
