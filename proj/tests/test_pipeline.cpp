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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "summ/config.hpp"
#include "summ/pipeline.hpp"

namespace summ {
namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("summ_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

RunConfig tiny_config(const fs::path& out) {
  RunConfig c = parse_config(R"(
seed = 5
[synthetic]
n_docs = 60
vocab_size = 60
sents_per_doc = 5
salient_per_doc = 2
[model]
embedding = 6
hidden = 6
filters = 3
[ml]
max_epochs = 1
batch_size = 16
[rl]
updates = 4
batch_size = 4
log_interval = 2
eval_interval = 2
[decode]
beam_width = 2
fixed_k = 2
max_len = 10
)");
  c.out_dir = out.string();
  return c;
}

TEST(Config, RejectsUnknownKeysAndSections) {
  EXPECT_THROW(parse_config("bogus = 1"), std::invalid_argument);
  EXPECT_THROW(parse_config("[nope]\nx = 1"), std::invalid_argument);
  EXPECT_THROW(parse_config("[ml]\nlearning_rate = 1"), std::invalid_argument);
  EXPECT_THROW(parse_config("[ml]\nlr = \"fast\""), std::invalid_argument);
  try {
    parse_config("[rl]\ngama = 0.9");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("rl.gama"), std::string::npos);
  }
}

TEST(Config, RoundTripsThroughToml) {
  RunConfig c = parse_config("seed = 9\n[rl]\nlr = 3e-4\n[decode]\nbeam_width = 4\n");
  const RunConfig back = parse_config(c.to_toml());
  EXPECT_EQ(back.to_toml(), c.to_toml());
  EXPECT_EQ(back.seed, 9u);
  EXPECT_DOUBLE_EQ(back.rl.lr, 3e-4);
  EXPECT_EQ(back.decode.beam_width, 4);
}

TEST(Config, HashIgnoresOutputDirAndWorkers) {
  RunConfig a;
  RunConfig b = a;
  b.out_dir = "elsewhere";
  b.workers = 8;
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  b.rl.lr = 5e-4;
  EXPECT_NE(a.hash(), b.hash());
  // FNV-1a reference values.
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Config, SeedOverrideFromEnvironment) {
  RunConfig c;
  ::setenv("SUMM_SEED", "42", 1);
  apply_env_overrides(c);
  EXPECT_EQ(c.seed, 42u);
  ::setenv("SUMM_SEED", "x1", 1);
  EXPECT_THROW(apply_env_overrides(c), std::invalid_argument);
  ::unsetenv("SUMM_SEED");
}

TEST(Config, ValidationNamesKey) {
  RunConfig c;
  c.rl.gamma = 1.5;
  try {
    c.validate();
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("gamma"), std::string::npos);
  }
}

TEST(Checkpoints, RoundTripAndHashCheck) {
  const auto dir = scratch("ckpt");
  const auto vocab = Vocabulary::from_words({"a", "b", "c"});
  ExtractorDims d;
  d.vocab = static_cast<int>(vocab.size());
  d.embedding = 4;
  d.filters = 2;
  d.hidden = 4;
  ExtractorModel m(d, 3);
  save_extractor(dir / "e.ckpt", m, vocab, "h1", "ml-ext");
  const auto loaded = load_extractor(dir / "e.ckpt", "h1");
  EXPECT_EQ(loaded.config_hash, "h1");
  EXPECT_EQ(loaded.vocab.words(), vocab.words());
  ASSERT_EQ(loaded.model.params().size(), m.params().size());
  for (std::size_t i = 0; i < m.params().size(); ++i) {
    EXPECT_EQ(loaded.model.params().all()[i].name, m.params().all()[i].name);
    EXPECT_EQ(loaded.model.params().all()[i].value, m.params().all()[i].value);
  }
  EXPECT_THROW(load_extractor(dir / "e.ckpt", "h2"), std::runtime_error);
  EXPECT_NO_THROW(load_extractor(dir / "e.ckpt", "h2", true));
  EXPECT_THROW(load_abstractor(dir / "e.ckpt"), std::runtime_error);
  fs::remove_all(dir);
}

TEST(Pipeline, RlBeforeMlExtNamesPrerequisite) {
  const auto dir = scratch("prereq");
  try {
    run_experiment(tiny_config(dir), Stage::kRl);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("'ml-ext'"), std::string::npos);
  }
  EXPECT_THROW(parse_stage("train"), std::invalid_argument);
  EXPECT_EQ(stage_name(parse_stage("ml-abs")), "ml-abs");
  fs::remove_all(dir);
}

TEST(Pipeline, EndToEndIsDeterministicAndLeavesAbstractorFixed) {
  const auto a = scratch("e2e_a");
  const auto b = scratch("e2e_b");
  run_all(tiny_config(a));
  const std::string abs_after_ml = read_file(RunPaths{a}.abstractor());
  RunConfig cb = tiny_config(b);
  cb.workers = 2;
  run_all(cb);
  const RunPaths pa{a}, pb{b};
  for (const auto& f : {pa.abstractor(), pa.extractor_ml(), pa.extractor_rl(), pa.ff_extractor(), pa.report()}) {
    ASSERT_TRUE(fs::exists(f)) << f;
    EXPECT_EQ(read_file(f), read_file(pb.root / f.filename())) << f;
  }
  EXPECT_EQ(read_file(pa.abstractor()), abs_after_ml);
  const auto report = EvalReport::from_json(nlohmann::json::parse(read_file(pa.report())));
  ASSERT_EQ(report.models.size(), eval_model_names(tiny_config(a)).size());
  EXPECT_EQ(report.serialize(), read_file(pa.report()));
  const auto outputs = read_summaries_jsonl(pa.outputs("rnn-ext+abs+RL"));
  EXPECT_FALSE(outputs.empty());
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Reports, SummariesJsonlRoundTrip) {
  const auto dir = scratch("jsonl");
  std::vector<SummaryRecord> recs{{"d1", {{"a", "b"}, {"c"}}, {0, 2}, true}, {"d2", {}, {}, false}};
  write_summaries_jsonl(dir / "s.jsonl", recs);
  const auto back = read_summaries_jsonl(dir / "s.jsonl");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].id, "d1");
  EXPECT_EQ(back[0].sentences, recs[0].sentences);
  EXPECT_EQ(back[0].indices, recs[0].indices);
  EXPECT_TRUE(back[0].stopped_by_eoe);
  EXPECT_TRUE(back[1].sentences.empty());
  fs::remove_all(dir);
}

TEST(Reports, SerializeIsStable) {
  EvalReport r;
  r.config_hash = "abc";
  r.models = {{"x", {{"rouge_l", 0.5}, {"rouge_1", 0.25}}}};
  const std::string s = r.serialize();
  EXPECT_EQ(s.back(), '\n');
  EXPECT_EQ(EvalReport::from_json(nlohmann::json::parse(s)).serialize(), s);
  EXPECT_LT(s.find("rouge_1"), s.find("rouge_l"));
}

TEST(Reports, CompareMarksBestAndSorts) {
  std::vector<ModelReport> rs{{"low", {{"rouge_1", 0.1}, {"repeated_bigrams", 0.0}}},
                              {"high", {{"rouge_1", 0.9}, {"repeated_bigrams", 2.0}}}};
  const auto table = compare_models(rs, "rouge_1");
  EXPECT_LT(table.find("high"), table.find("low"));
  EXPECT_NE(table.find("0.9000*"), std::string::npos);
  EXPECT_NE(table.find("0.0000*"), std::string::npos);
  EXPECT_EQ(table.find("2.0000*"), std::string::npos);
  EXPECT_THROW(compare_models(rs, "bleu"), std::invalid_argument);
  rs[1].metrics.erase("repeated_bigrams");
  EXPECT_THROW(compare_models(rs), std::invalid_argument);
  EXPECT_THROW(compare_models({rs[0]}), std::invalid_argument);
}

}  // namespace
}  // namespace summ
