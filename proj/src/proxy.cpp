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

#include "summ/proxy.hpp"

#include <spdlog/spdlog.h>

#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "summ/metrics.hpp"

namespace summ {

ProxyLabels match_proxy_labels(const SummaryPair& pair) {
  const auto& sents = pair.document.sentences;
  if (sents.empty() || pair.summary.empty()) {
    throw std::invalid_argument("proxy labeling needs a nonempty document and summary (" +
                                pair.document.id + ")");
  }
  ProxyLabels labels;
  labels.pair_id = pair.document.id;
  labels.indices.reserve(pair.summary.size());
  for (const auto& target : pair.summary) {
    int best = 0;
    double best_recall = -1.0;
    for (std::size_t i = 0; i < sents.size(); ++i) {
      const double r = rouge_l(sents[i], target).recall;
      if (r > best_recall) {
        best_recall = r;
        best = static_cast<int>(i);
      }
    }
    if (best_recall <= 0.0) {
      spdlog::warn("record {}: summary sentence has no overlap with any document sentence; "
                   "labeling it 0",
                   pair.document.id);
    }
    labels.indices.push_back(best);
  }
  return labels;
}

std::vector<SentencePair> build_abstractor_pairs(const SummaryPair& pair,
                                                 const ProxyLabels& labels) {
  if (labels.indices.size() != pair.summary.size()) {
    throw std::invalid_argument("labels for " + pair.document.id +
                                " do not match the summary length");
  }
  std::vector<SentencePair> out;
  out.reserve(pair.summary.size());
  for (std::size_t t = 0; t < pair.summary.size(); ++t) {
    const int j = labels.indices[t];
    if (j < 0 || static_cast<std::size_t>(j) >= pair.document.sentences.size()) {
      throw std::out_of_range("label index out of range in " + pair.document.id);
    }
    out.push_back({pair.document.sentences[static_cast<std::size_t>(j)], pair.summary[t]});
  }
  return out;
}

void write_labels_jsonl(const std::filesystem::path& path,
                        const std::vector<ProxyLabels>& labels) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& l : labels) {
    nlohmann::ordered_json rec;
    rec["id"] = l.pair_id;
    rec["extract_indices"] = l.indices;
    out << rec.dump() << '\n';
  }
}

std::vector<ProxyLabels> read_labels_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<ProxyLabels> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto rec = nlohmann::json::parse(line);
    out.push_back({rec.at("id").get<std::string>(), rec.at("extract_indices").get<std::vector<int>>()});
  }
  return out;
}

}  // namespace summ
