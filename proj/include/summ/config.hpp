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
#include <filesystem>
#include <string>

#include "summ/corpus.hpp"

namespace summ {

// Every setting of an experiment. Defaults are the full-size settings; the
// synthetic experiments override the model sizes in their config files.
struct RunConfig {
  struct Data {
    std::string train;  // JSONL; empty means generate the synthetic corpus
    std::string test;   // JSONL; empty means use the synthetic held-out split
    double validation_fraction = 0.1;
    double test_fraction = 0.1;  // synthetic corpus only
    std::size_t max_sentence_tokens = 100;
    std::size_t max_document_sentences = 60;
  } data;
  SyntheticSpec synthetic;
  struct Model {
    std::size_t vocab_cap = 30000;
    int embedding = 128;
    int hidden = 256;
    int filters = 100;
  } model;
  struct Ml {
    double lr = 1e-3;
    double clip_norm = 2.0;
    int batch_size = 32;
    int max_epochs = 20;
    int max_halvings = 3;
    int eval_every = 0;  // batches between validations; 0 = once per epoch
  } ml;
  struct Rl {
    double lr = 1e-4;
    double gamma = 0.95;
    double clip_norm = 2.0;
    int batch_size = 32;
    int updates = 1000;
    int max_steps_cap = 8;
    int log_interval = 20;
    int eval_interval = 100;
    bool identity_abstractor = false;
  } rl;
  struct Decode {
    int ngram = 2;
    int beam_width = 5;
    double diversity = 1.0;
    int max_len = 30;
    int fixed_k = 3;
  } decode;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out_dir = "runs/default";

  // Throws std::invalid_argument naming the offending key.
  void validate() const;
  // Canonical TOML text; parsing it yields an equal config.
  std::string to_toml() const;
  // 16 hex digits of FNV-1a over to_toml() with out_dir and workers
  // excluded, so a run can be moved or re-run with more threads.
  std::string hash() const;
};

// Parses TOML text. Unknown sections or keys and wrongly typed values are
// errors. `source` is used in messages.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
// Reads a file, then applies the SUMM_SEED environment override.
RunConfig load_config(const std::filesystem::path& path);
void apply_env_overrides(RunConfig& config);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace summ
