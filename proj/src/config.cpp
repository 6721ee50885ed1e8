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

#include "summ/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <variant>
#include <vector>

#include "tomlplusplus/toml.hpp"

namespace summ {

namespace {

static_assert(std::is_same_v<std::size_t, std::uint64_t>, "seed fields are stored as std::size_t");
using FieldPtr = std::variant<int*, std::size_t*, double*, bool*, std::string*>;

struct Field {
  const char* section;  // "" for top-level keys
  const char* key;
  FieldPtr ptr;
};

std::vector<Field> fields(RunConfig& c) {
  return {
      {"", "seed", &c.seed},
      {"", "workers", &c.workers},
      {"", "out_dir", &c.out_dir},
      {"data", "train", &c.data.train},
      {"data", "test", &c.data.test},
      {"data", "validation_fraction", &c.data.validation_fraction},
      {"data", "test_fraction", &c.data.test_fraction},
      {"data", "max_sentence_tokens", &c.data.max_sentence_tokens},
      {"data", "max_document_sentences", &c.data.max_document_sentences},
      {"synthetic", "n_docs", &c.synthetic.n_docs},
      {"synthetic", "vocab_size", &c.synthetic.vocab_size},
      {"synthetic", "sents_per_doc", &c.synthetic.sents_per_doc},
      {"synthetic", "salient_per_doc", &c.synthetic.salient_per_doc},
      {"synthetic", "noise_rate", &c.synthetic.noise_rate},
      {"synthetic", "seed", &c.synthetic.seed},
      {"model", "vocab_cap", &c.model.vocab_cap},
      {"model", "embedding", &c.model.embedding},
      {"model", "hidden", &c.model.hidden},
      {"model", "filters", &c.model.filters},
      {"ml", "lr", &c.ml.lr},
      {"ml", "clip_norm", &c.ml.clip_norm},
      {"ml", "batch_size", &c.ml.batch_size},
      {"ml", "max_epochs", &c.ml.max_epochs},
      {"ml", "max_halvings", &c.ml.max_halvings},
      {"ml", "eval_every", &c.ml.eval_every},
      {"rl", "lr", &c.rl.lr},
      {"rl", "gamma", &c.rl.gamma},
      {"rl", "clip_norm", &c.rl.clip_norm},
      {"rl", "batch_size", &c.rl.batch_size},
      {"rl", "updates", &c.rl.updates},
      {"rl", "max_steps_cap", &c.rl.max_steps_cap},
      {"rl", "log_interval", &c.rl.log_interval},
      {"rl", "eval_interval", &c.rl.eval_interval},
      {"rl", "identity_abstractor", &c.rl.identity_abstractor},
      {"decode", "ngram", &c.decode.ngram},
      {"decode", "beam_width", &c.decode.beam_width},
      {"decode", "diversity", &c.decode.diversity},
      {"decode", "max_len", &c.decode.max_len},
      {"decode", "fixed_k", &c.decode.fixed_k},
  };
}

std::string qualified(const Field& f) {
  return std::string(f.section).empty() ? f.key : std::string(f.section) + "." + f.key;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

void assign(const Field& f, const toml::node& node, const std::string& source) {
  const std::string name = qualified(f);
  auto fail = [&](const char* expected) {
    throw std::invalid_argument(source + ": key '" + name + "' must be " + expected);
  };
  std::visit(
      [&](auto* p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, bool>) {
          if (!node.is_boolean()) fail("a boolean");
          *p = *node.value<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
          if (!node.is_string()) fail("a string");
          *p = *node.value<std::string>();
        } else if constexpr (std::is_same_v<T, double>) {
          if (!node.is_number()) fail("a number");
          *p = *node.value<double>();
        } else {
          if (!node.is_integer()) fail("an integer");
          const std::int64_t v = *node.value<std::int64_t>();
          if constexpr (std::is_unsigned_v<T>) {
            if (v < 0) fail("non-negative");
          }
          *p = static_cast<T>(v);
        }
      },
      f.ptr);
}

}  // namespace

void RunConfig::validate() const {
  auto require = [](bool ok, const char* key, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("config key '") + key + "' " + what);
  };
  require(workers >= 1, "workers", "must be >= 1");
  require(!out_dir.empty(), "out_dir", "must not be empty");
  require(data.validation_fraction > 0.0 && data.validation_fraction < 1.0,
          "data.validation_fraction", "must be in (0, 1)");
  require(data.test_fraction >= 0.0 && data.test_fraction < 1.0, "data.test_fraction",
          "must be in [0, 1)");
  require(data.validation_fraction + data.test_fraction < 1.0, "data.test_fraction",
          "plus validation_fraction must be < 1");
  require(data.max_sentence_tokens >= 1, "data.max_sentence_tokens", "must be >= 1");
  require(data.max_document_sentences >= 1, "data.max_document_sentences", "must be >= 1");
  require(synthetic.n_docs >= 10, "synthetic.n_docs", "must be >= 10");
  require(synthetic.vocab_size >= 20, "synthetic.vocab_size", "must be >= 20");
  require(synthetic.sents_per_doc >= 1, "synthetic.sents_per_doc", "must be >= 1");
  require(synthetic.salient_per_doc >= 1 && synthetic.salient_per_doc <= synthetic.sents_per_doc,
          "synthetic.salient_per_doc", "must be in [1, sents_per_doc]");
  require(synthetic.noise_rate >= 0.0 && synthetic.noise_rate < 1.0, "synthetic.noise_rate",
          "must be in [0, 1)");
  require(model.vocab_cap >= 5, "model.vocab_cap", "must be >= 5");
  require(model.embedding >= 1, "model.embedding", "must be >= 1");
  require(model.hidden >= 1, "model.hidden", "must be >= 1");
  require(model.filters >= 1, "model.filters", "must be >= 1");
  require(ml.lr > 0.0, "ml.lr", "must be > 0");
  require(ml.clip_norm > 0.0, "ml.clip_norm", "must be > 0");
  require(ml.batch_size >= 1, "ml.batch_size", "must be >= 1");
  require(ml.max_epochs >= 1, "ml.max_epochs", "must be >= 1");
  require(ml.max_halvings >= 0, "ml.max_halvings", "must be >= 0");
  require(ml.eval_every >= 0, "ml.eval_every", "must be >= 0");
  require(rl.lr > 0.0, "rl.lr", "must be > 0");
  require(rl.gamma >= 0.0 && rl.gamma <= 1.0, "rl.gamma", "must be in [0, 1]");
  require(rl.clip_norm > 0.0, "rl.clip_norm", "must be > 0");
  require(rl.batch_size >= 1, "rl.batch_size", "must be >= 1");
  require(rl.updates >= 0, "rl.updates", "must be >= 0");
  require(rl.max_steps_cap >= 1, "rl.max_steps_cap", "must be >= 1");
  require(rl.log_interval >= 1, "rl.log_interval", "must be >= 1");
  require(rl.eval_interval >= 1, "rl.eval_interval", "must be >= 1");
  require(decode.ngram >= 1, "decode.ngram", "must be >= 1");
  require(decode.beam_width >= 1, "decode.beam_width", "must be >= 1");
  require(decode.diversity >= 0.0, "decode.diversity", "must be >= 0");
  require(decode.max_len >= 1, "decode.max_len", "must be >= 1");
  require(decode.fixed_k >= 1, "decode.fixed_k", "must be >= 1");
}

std::string RunConfig::to_toml() const {
  RunConfig copy = *this;
  std::ostringstream out;
  std::string section = "";
  for (const Field& f : fields(copy)) {
    if (section != f.section) {
      section = f.section;
      out << "\n[" << section << "]\n";
    }
    out << f.key << " = ";
    std::visit(
        [&](auto* p) {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<T, bool>) out << (*p ? "true" : "false");
          else if constexpr (std::is_same_v<T, std::string>) out << quote(*p);
          else if constexpr (std::is_same_v<T, double>) out << format_double(*p);
          else out << *p;
        },
        f.ptr);
    out << '\n';
  }
  return out.str();
}

std::string RunConfig::hash() const {
  RunConfig copy = *this;
  copy.out_dir = "-";
  copy.workers = 1;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(copy.to_toml())));
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ":" << e.source().begin.line << ": " << e.description();
    throw std::invalid_argument(msg.str());
  }
  RunConfig config;
  const auto table = fields(config);
  auto find = [&](const std::string& section, const std::string& key) -> const Field* {
    for (const Field& f : table)
      if (section == f.section && key == f.key) return &f;
    return nullptr;
  };
  auto is_section = [&](const std::string& name) {
    for (const Field& f : table)
      if (name == f.section) return true;
    return false;
  };
  for (const auto& [k, node] : root) {
    const std::string key(k.str());
    if (node.is_table()) {
      if (!is_section(key)) throw std::invalid_argument(source + ": unknown section [" + key + "]");
      for (const auto& [k2, inner] : *node.as_table()) {
        const std::string key2(k2.str());
        const Field* f = find(key, key2);
        if (f == nullptr) throw std::invalid_argument(source + ": unknown key '" + key + "." + key2 + "'");
        assign(*f, inner, source);
      }
      continue;
    }
    const Field* f = find("", key);
    if (f == nullptr) throw std::invalid_argument(source + ": unknown key '" + key + "'");
    assign(*f, node, source);
  }
  config.validate();
  return config;
}

void apply_env_overrides(RunConfig& config) {
  if (const char* s = std::getenv("SUMM_SEED"); s != nullptr && *s != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0') {
      throw std::invalid_argument(std::string("SUMM_SEED must be an unsigned integer, got '") + s + "'");
    }
    config.seed = v;
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  RunConfig config = parse_config(buf.str(), path.string());
  apply_env_overrides(config);
  return config;
}

}  // namespace summ
