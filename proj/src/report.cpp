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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "summ/metrics.hpp"
#include "summ/pipeline.hpp"

namespace summ {

namespace {

Tokens split_ws(const std::string& s) {
  Tokens out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

double set_f1(const std::vector<int>& got, const std::vector<int>& want) {
  const std::set<int> a(got.begin(), got.end());
  const std::set<int> b(want.begin(), want.end());
  if (a.empty() || b.empty()) return 0.0;
  double hit = 0.0;
  for (int x : a) hit += b.count(x) ? 1.0 : 0.0;
  return make_rouge(hit, static_cast<double>(a.size()), static_cast<double>(b.size())).f1;
}

}  // namespace

void write_summaries_jsonl(const std::filesystem::path& path,
                           const std::vector<SummaryRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& r : records) {
    std::vector<std::string> sents;
    for (const auto& s : r.sentences) sents.push_back(join_tokens(s));
    nlohmann::json j = {{"id", r.id},
                        {"summary", sents},
                        {"extract_indices", r.indices},
                        {"stopped_by_eoe", r.stopped_by_eoe}};
    out << j.dump() << '\n';
  }
}

std::vector<SummaryRecord> read_summaries_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<SummaryRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      SummaryRecord r;
      r.id = j.at("id").get<std::string>();
      for (const auto& s : j.at("summary")) r.sentences.push_back(split_ws(s.get<std::string>()));
      r.indices = j.at("extract_indices").get<std::vector<int>>();
      r.stopped_by_eoe = j.value("stopped_by_eoe", false);
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

ModelReport score_summaries(const std::string& name, const std::vector<SummaryPair>& pairs,
                            const std::vector<SummaryRecord>& records, bool fixed_length,
                            bool stem) {
  if (pairs.size() != records.size()) {
    throw std::invalid_argument("score_summaries: " + std::to_string(records.size()) +
                                " outputs for " + std::to_string(pairs.size()) + " documents");
  }
  if (pairs.empty()) throw std::invalid_argument("score_summaries: no documents");
  const bool synthetic = std::all_of(pairs.begin(), pairs.end(),
                                     [](const SummaryPair& p) { return !p.salient.empty(); });
  double r1 = 0, r2 = 0, rl = 0, len = 0, nsent = 0, reward = 0, repeated = 0, ext_f1 = 0, within = 0;
  double novel[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const SummaryPair& p = pairs[i];
    const SummaryRecord& r = records[i];
    if (r.id != p.document.id) {
      throw std::invalid_argument("score_summaries: output '" + r.id + "' does not match document '" +
                                  p.document.id + "'");
    }
    std::vector<Tokens> hyp, ref;
    for (const auto& s : r.sentences) hyp.push_back(stem ? stem_tokens(s) : s);
    for (const auto& s : p.summary) ref.push_back(stem ? stem_tokens(s) : s);
    r1 += rouge_summary(hyp, ref, RougeKind::kRouge1).f1;
    r2 += rouge_summary(hyp, ref, RougeKind::kRouge2).f1;
    rl += rouge_summary(hyp, ref, RougeKind::kRougeL).f1;
    for (std::size_t n = 1; n <= 4; ++n) novel[n - 1] += novel_ngram_ratio(r.sentences, p.document, n);
    const Tokens all = concatenate(r.sentences);
    len += static_cast<double>(all.size());
    nsent += static_cast<double>(r.sentences.size());
    reward += summary_reward(r.sentences, fixed_length || r.stopped_by_eoe, p.summary);
    repeated += static_cast<double>(repeated_ngram_count<std::string>(all, 2));
    if (synthetic) {
      ext_f1 += set_f1(r.indices, p.salient);
      const long diff = static_cast<long>(r.sentences.size()) - static_cast<long>(p.summary.size());
      within += std::labs(diff) <= 1 ? 1.0 : 0.0;
    }
  }
  const double n = static_cast<double>(pairs.size());
  ModelReport m;
  m.name = name;
  m.metrics["rouge1"] = r1 / n;
  m.metrics["rouge2"] = r2 / n;
  m.metrics["rougeL"] = rl / n;
  for (int k = 0; k < 4; ++k) m.metrics["novel" + std::to_string(k + 1)] = novel[k] / n;
  m.metrics["mean_length"] = len / n;
  m.metrics["mean_sentences"] = nsent / n;
  m.metrics["mean_reward"] = reward / n;
  m.metrics["repeated_bigrams"] = repeated;
  if (synthetic) {
    m.metrics["extraction_f1"] = ext_f1 / n;
    m.metrics["eoe_within_one"] = within / n;
  }
  return m;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json models_json = nlohmann::json::array();
  for (const auto& m : models) models_json.push_back({{"name", m.name}, {"metrics", m.metrics}});
  return {{"config_hash", config_hash}, {"models", models_json}};
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
  EvalReport r;
  r.config_hash = j.at("config_hash").get<std::string>();
  for (const auto& m : j.at("models")) {
    r.models.push_back({m.at("name").get<std::string>(),
                        m.at("metrics").get<std::map<std::string, double>>()});
  }
  return r;
}

std::string EvalReport::serialize() const { return to_json().dump(2) + "\n"; }

std::string compare_models(const std::vector<ModelReport>& reports, const std::string& sort_by) {
  if (reports.size() < 2) throw std::invalid_argument("compare_models needs at least two reports");
  std::vector<std::string> metrics;
  for (const auto& [k, v] : reports.front().metrics) metrics.push_back(k);
  for (const auto& r : reports) {
    std::vector<std::string> keys;
    for (const auto& [k, v] : r.metrics) keys.push_back(k);
    if (keys != metrics) {
      throw std::invalid_argument("compare_models: report '" + r.name + "' has different metrics than '" +
                                  reports.front().name + "'");
    }
  }
  std::vector<const ModelReport*> rows;
  for (const auto& r : reports) rows.push_back(&r);
  if (!sort_by.empty()) {
    if (std::find(metrics.begin(), metrics.end(), sort_by) == metrics.end()) {
      throw std::invalid_argument("compare_models: unknown metric '" + sort_by + "'");
    }
    std::stable_sort(rows.begin(), rows.end(), [&](const ModelReport* a, const ModelReport* b) {
      return a->metrics.at(sort_by) > b->metrics.at(sort_by);
    });
  }
  std::map<std::string, double> best;
  for (const auto& k : metrics) {
    const bool lower = k == "repeated_bigrams";
    double b = rows.front()->metrics.at(k);
    for (const auto* r : rows) b = lower ? std::min(b, r->metrics.at(k)) : std::max(b, r->metrics.at(k));
    best[k] = b;
  }

  std::size_t name_width = 5;
  for (const auto* r : rows) name_width = std::max(name_width, r->name.size());
  std::ostringstream out;
  auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); };
  out << pad("model", name_width);
  std::vector<std::size_t> widths;
  for (const auto& k : metrics) {
    widths.push_back(std::max<std::size_t>(k.size(), 11));
    out << "  " << pad(k, widths.back());
  }
  out << '\n';
  for (const auto* r : rows) {
    out << pad(r->name, name_width);
    for (std::size_t c = 0; c < metrics.size(); ++c) {
      const double v = r->metrics.at(metrics[c]);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.4f%s", v, v == best[metrics[c]] ? "*" : "");
      out << "  " << pad(buf, widths[c]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace summ
