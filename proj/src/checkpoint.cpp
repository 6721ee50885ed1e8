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

#include "summ/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

namespace summ {

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'S', 'U', 'M', 'M', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint truncated");
  return v;
}

void put_matrix(std::ostream& out, const Matrix& m) {
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
}

void get_matrix(std::istream& in, Matrix& m) {
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!in) throw std::runtime_error("checkpoint payload truncated");
}

}  // namespace

Checkpoint Checkpoint::capture(std::string kind, std::string config_hash,
                               nlohmann::json meta, const ParamSet& params,
                               const OptimState* optimizer) {
  Checkpoint c;
  c.kind = std::move(kind);
  c.config_hash = std::move(config_hash);
  c.meta = std::move(meta);
  c.params = params.all();
  if (optimizer) c.optimizer = *optimizer;
  return c;
}

void Checkpoint::write(const std::filesystem::path& path) const {
  nlohmann::json header;
  header["kind"] = kind;
  header["config_hash"] = config_hash;
  header["meta"] = meta;
  auto& plist = header["params"] = nlohmann::json::array();
  for (const auto& p : params) {
    plist.push_back({{"name", p.name}, {"rows", p.value.rows()}, {"cols", p.value.cols()},
                     {"trainable", p.trainable}});
  }
  if (optimizer) {
    header["optimizer"] = {{"step", optimizer->step},
                           {"lr", optimizer->lr},
                           {"beta1", optimizer->hyper.beta1},
                           {"beta2", optimizer->hyper.beta2},
                           {"epsilon", optimizer->hyper.epsilon}};
  } else {
    header["optimizer"] = nullptr;
  }
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& p : params) put_matrix(out, p.value);
  if (optimizer) {
    if (optimizer->first_moment.size() != params.size()) {
      throw std::runtime_error("optimizer state does not match checkpoint parameters");
    }
    for (const auto& m : optimizer->first_moment) put_matrix(out, m);
    for (const auto& v : optimizer->second_moment) put_matrix(out, v);
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Checkpoint Checkpoint::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error(path.string() + " is not a checkpoint file");
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  const auto len = get<std::uint64_t>(in);
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw std::runtime_error("checkpoint header truncated");
  const auto header = nlohmann::json::parse(text);

  Checkpoint c;
  c.kind = header.at("kind").get<std::string>();
  c.config_hash = header.at("config_hash").get<std::string>();
  c.meta = header.at("meta");
  for (const auto& p : header.at("params")) {
    Parameter param;
    param.name = p.at("name").get<std::string>();
    param.value.resize(p.at("rows").get<Eigen::Index>(), p.at("cols").get<Eigen::Index>());
    param.trainable = p.at("trainable").get<bool>();
    get_matrix(in, param.value);
    c.params.push_back(std::move(param));
  }
  if (!header.at("optimizer").is_null()) {
    const auto& o = header["optimizer"];
    OptimState s;
    s.step = o.at("step").get<std::int64_t>();
    s.lr = o.at("lr").get<double>();
    s.hyper.beta1 = o.at("beta1").get<double>();
    s.hyper.beta2 = o.at("beta2").get<double>();
    s.hyper.epsilon = o.at("epsilon").get<double>();
    for (auto* moments : {&s.first_moment, &s.second_moment}) {
      for (const auto& p : c.params) {
        Matrix m(p.value.rows(), p.value.cols());
        get_matrix(in, m);
        moments->push_back(std::move(m));
      }
    }
    c.optimizer = std::move(s);
  }
  return c;
}

void Checkpoint::restore(ParamSet& target) const {
  std::unordered_map<std::string, const Parameter*> by_name;
  for (const auto& p : params) by_name[p.name] = &p;
  for (std::size_t i = 0; i < target.size(); ++i) {
    Parameter& t = target[ParamId{i}];
    auto it = by_name.find(t.name);
    if (it == by_name.end()) throw std::runtime_error("checkpoint lacks parameter " + t.name);
    const Matrix& v = it->second->value;
    if (v.rows() != t.value.rows() || v.cols() != t.value.cols()) {
      throw std::runtime_error("checkpoint shape mismatch for " + t.name);
    }
    t.value = v;
  }
}

}  // namespace summ
