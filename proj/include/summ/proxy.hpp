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

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "summ/corpus.hpp"

namespace summ {

struct ProxyLabels {
  std::string pair_id;
  // One document-sentence index per summary sentence, in summary order.
  std::vector<int> indices;
};

// For each summary sentence, the document sentence with maximal ROUGE-L
// recall against it. Ties go to the lowest index; a summary sentence with no
// overlap at all maps to 0 and logs a warning.
ProxyLabels match_proxy_labels(const SummaryPair& pair);

struct SentencePair {
  Tokens source;
  Tokens target;
};

// One (d_{j_t}, s_t) pair per summary sentence.
std::vector<SentencePair> build_abstractor_pairs(const SummaryPair& pair,
                                                 const ProxyLabels& labels);

// {"id", "extract_indices"} per line.
void write_labels_jsonl(const std::filesystem::path& path,
                        const std::vector<ProxyLabels>& labels);
std::vector<ProxyLabels> read_labels_jsonl(const std::filesystem::path& path);

}  // namespace summ
