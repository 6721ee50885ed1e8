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

#include "summ/rl.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "summ/metrics.hpp"
#include "summ/parallel.hpp"

namespace summ {

double Episode::total_reward() const {
  return std::accumulate(rewards.begin(), rewards.end(), 0.0);
}

std::vector<double> assign_rewards(std::span<const int> actions, int num_sentences,
                                   const std::vector<Tokens>& rewrites,
                                   const std::vector<Tokens>& references) {
  std::vector<double> rewards;
  rewards.reserve(actions.size());
  std::vector<Tokens> chosen;
  for (std::size_t t = 0; t < actions.size(); ++t) {
    const int a = actions[t];
    if (a == num_sentences) {
      rewards.push_back(rouge_summary(chosen, references, RougeKind::kRouge1).f1);
      if (t + 1 != actions.size()) throw std::invalid_argument("EOE must be the last action");
      break;
    }
    if (a < 0 || a > num_sentences) throw std::out_of_range("action out of range");
    const Tokens& rw = rewrites.at(static_cast<std::size_t>(a));
    chosen.push_back(rw);
    rewards.push_back(t < references.size() ? rouge_l(rw, references[t]).f1 : 0.0);
  }
  return rewards;
}

double score_extraction(std::span<const int> indices, bool terminal,
                        const std::vector<Tokens>& rewrites,
                        const std::vector<Tokens>& references) {
  const int n = static_cast<int>(rewrites.size());
  std::vector<int> actions(indices.begin(), indices.end());
  if (terminal) actions.push_back(n);
  const auto r = assign_rewards(actions, n, rewrites, references);
  return std::accumulate(r.begin(), r.end(), 0.0);
}

double summary_reward(const std::vector<Tokens>& sentences, bool terminal,
                      const std::vector<Tokens>& references) {
  std::vector<int> actions(sentences.size());
  std::iota(actions.begin(), actions.end(), 0);
  return score_extraction(actions, terminal, sentences, references);
}

std::vector<double> compute_returns(std::span<const double> rewards, double gamma) {
  std::vector<double> out(rewards.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    acc = rewards[i] + gamma * acc;
    out[i] = acc;
  }
  return out;
}

void standardize_returns(std::vector<Episode>& batch) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& e : batch) {
    for (double r : e.raw_returns) sum += r;
    count += e.raw_returns.size();
  }
  if (count == 0) return;
  const double mean = sum / static_cast<double>(count);
  double sq = 0.0;
  for (const auto& e : batch)
    for (double r : e.raw_returns) sq += (r - mean) * (r - mean);
  const double std = std::sqrt(sq / static_cast<double>(count));
  for (auto& e : batch) {
    e.returns.resize(e.raw_returns.size());
    for (std::size_t i = 0; i < e.raw_returns.size(); ++i) {
      const double centered = e.raw_returns[i] - mean;
      e.returns[i] = count == 1 ? centered : centered / (std + 1e-8);
    }
  }
}

A2CLoss a2c_loss(Graph& g, std::span<const Var> log_probs, std::span<const Var> baselines,
                 std::span<const double> returns, double normalizer) {
  if (log_probs.size() != baselines.size() || log_probs.size() != returns.size()) {
    throw std::invalid_argument("a2c_loss: mismatched trajectory lengths");
  }
  if (log_probs.empty()) throw std::invalid_argument("a2c_loss: empty trajectory");
  if (!(normalizer > 0.0)) throw std::invalid_argument("a2c_loss: normalizer must be > 0");
  std::vector<Var> actor_terms, critic_terms;
  for (std::size_t t = 0; t < log_probs.size(); ++t) {
    const double advantage = returns[t] - g.scalar(baselines[t]);
    actor_terms.push_back(g.scale(log_probs[t], -advantage / normalizer));
    const Var diff = g.sub(baselines[t], g.scalar_input(returns[t]));
    critic_terms.push_back(g.scale(g.mul(diff, diff), 1.0 / normalizer));
  }
  A2CLoss out;
  out.actor = g.sum(g.concat_rows(actor_terms));
  out.critic = g.sum(g.concat_rows(critic_terms));
  out.total = g.add(out.actor, out.critic);
  return out;
}

TracedEpisode rollout(const ExtractorModel& model, const RlExample& example,
                      int max_steps, DecodeMode mode, Rng* rng) {
  const int n = static_cast<int>(example.sentences.size());
  if (n == 0) throw std::invalid_argument("rollout on empty document '" + example.id + "'");
  if (example.rewrites.size() != example.sentences.size()) {
    throw std::invalid_argument("rollout: rewrites do not match sentences for '" + example.id + "'");
  }
  TracedEpisode te{Graph(&model.params()), {}, {}, {}};
  const Var states = model.encoder().encode(te.graph, example.sentences);
  te.trace = run_policy(te.graph, model, states, n, mode, max_steps, true, rng);
  te.baselines = model.critic().values(te.graph, states, te.trace.actions);

  Episode& e = te.episode;
  e.doc_id = example.id;
  e.num_sentences = n;
  e.actions = te.trace.actions;
  e.stopped_by_eoe = te.trace.stopped_by_eoe;
  for (Var lp : te.trace.log_probs) e.log_probs.push_back(te.graph.scalar(lp));
  for (Var b : te.baselines) e.baselines.push_back(te.graph.scalar(b));
  e.rewards = assign_rewards(e.actions, n, example.rewrites, example.references);
  return te;
}

A2CStats a2c_update(ExtractorModel& model, std::vector<TracedEpisode>& batch,
                    OptimState& optim, double gamma, double clip_norm, int workers) {
  if (batch.empty()) throw std::invalid_argument("a2c_update: empty batch");
  std::vector<Episode> episodes;
  episodes.reserve(batch.size());
  double normalizer = 0.0;
  for (auto& te : batch) {
    te.episode.raw_returns = compute_returns(te.episode.rewards, gamma);
    episodes.push_back(te.episode);
    normalizer += static_cast<double>(te.episode.actions.size());
  }
  standardize_returns(episodes);
  for (std::size_t i = 0; i < batch.size(); ++i) batch[i].episode.returns = episodes[i].returns;

  const ParamSet& params = model.params();
  std::vector<GradSet> grads(batch.size(), GradSet(params));
  std::vector<double> actor(batch.size()), critic(batch.size());
  parallel_for(batch.size(), workers, [&](std::size_t i) {
    TracedEpisode& te = batch[i];
    const A2CLoss loss = a2c_loss(te.graph, te.trace.log_probs, te.baselines,
                                  te.episode.returns, normalizer);
    actor[i] = te.graph.scalar(loss.actor);
    critic[i] = te.graph.scalar(loss.critic);
    if (!std::isfinite(actor[i]) || !std::isfinite(critic[i])) {
      std::ostringstream msg;
      msg << "non-finite A2C loss on '" << te.episode.doc_id << "': actor=" << actor[i]
          << " critic=" << critic[i] << " actions=" << te.episode.actions.size();
      throw std::runtime_error(msg.str());
    }
    te.graph.backward(loss.total, grads[i]);
  });

  A2CStats stats;
  GradSet total(params);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    total.add(grads[i]);
    stats.actor_loss += actor[i];
    stats.critic_loss += critic[i];
    stats.mean_reward += batch[i].episode.total_reward();
    stats.eoe_rate += batch[i].episode.stopped_by_eoe ? 1.0 : 0.0;
  }
  stats.mean_reward /= static_cast<double>(batch.size());
  stats.eoe_rate /= static_cast<double>(batch.size());
  stats.grad_norm = clip_gradients(total, clip_norm);
  adam_step(model.params(), total, optim);
  return stats;
}

namespace {

int step_limit(const RlExample& ex, int cap) {
  return std::min(static_cast<int>(ex.sentences.size()), cap);
}

std::vector<const RlExample*> usable(const std::vector<RlExample>& examples) {
  std::vector<const RlExample*> out;
  for (const auto& ex : examples)
    if (!ex.sentences.empty()) out.push_back(&ex);
  return out;
}

}  // namespace

double evaluate_policy(const ExtractorModel& model, const std::vector<RlExample>& examples,
                       int max_steps_cap, int workers) {
  const auto items = usable(examples);
  if (items.empty()) return 0.0;
  const auto totals = parallel_map<double>(items.size(), workers, [&](std::size_t i) {
    const RlExample& ex = *items[i];
    const ExtractionResult r =
        run_extractor(model, ex.sentences, DecodeMode::kGreedy, step_limit(ex, max_steps_cap), true);
    return score_extraction(r.indices, r.stopped_by_eoe, ex.rewrites, ex.references);
  });
  return std::accumulate(totals.begin(), totals.end(), 0.0) / static_cast<double>(totals.size());
}

RlResult train_rl(ExtractorModel& model, const std::vector<RlExample>& train,
                  const std::vector<RlExample>& validation, const RlConfig& config) {
  if (config.batch_size < 1 || config.updates < 0 || config.log_interval < 1 ||
      config.eval_interval < 1) {
    throw std::invalid_argument("invalid RL configuration");
  }
  const auto items = usable(train);
  if (items.empty()) throw std::invalid_argument("RL training set has no non-empty documents");

  OptimState optim = OptimState::for_params(model.params(), config.lr);
  RlResult result;
  result.best_validation_reward = evaluate_policy(model, validation, config.max_steps_cap, config.workers);
  std::vector<Matrix> best;
  for (const auto& p : model.params().all()) best.push_back(p.value);
  spdlog::info("rl: initial validation reward {:.4f}", result.best_validation_reward);

  Rng order_rng(derive_seed(config.seed, 0x5e1ec7, 0));
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();

  double window_reward = 0.0, window_eoe = 0.0;
  int window_count = 0;
  for (int update = 1; update <= config.updates; ++update) {
    std::vector<const RlExample*> picked;
    for (int b = 0; b < config.batch_size; ++b) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), order_rng);
        cursor = 0;
      }
      picked.push_back(items[order[cursor++]]);
    }
    std::vector<TracedEpisode> batch;
    batch.reserve(picked.size());
    {
      std::vector<std::optional<TracedEpisode>> slots(picked.size());
      parallel_for(picked.size(), config.workers, [&](std::size_t i) {
        Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(update), i));
        slots[i].emplace(rollout(model, *picked[i], step_limit(*picked[i], config.max_steps_cap),
                                 DecodeMode::kSample, &rng));
      });
      for (auto& s : slots) batch.push_back(std::move(*s));
    }
    const A2CStats stats = a2c_update(model, batch, optim, config.gamma, config.clip_norm, config.workers);
    window_reward += stats.mean_reward;
    window_eoe += stats.eoe_rate;
    ++window_count;

    if (update % config.log_interval == 0 || update == config.updates) {
      CurvePoint p{update, window_reward / window_count, window_eoe / window_count};
      result.curve.push_back(p);
      spdlog::info("rl step {}: reward {:.4f} eoe {:.3f} actor {:.4f} critic {:.4f} |g| {:.3f}",
                   update, p.mean_reward, p.eoe_rate, stats.actor_loss, stats.critic_loss,
                   stats.grad_norm);
      window_reward = window_eoe = 0.0;
      window_count = 0;
    }
    if (!validation.empty() && (update % config.eval_interval == 0 || update == config.updates)) {
      const double v = evaluate_policy(model, validation, config.max_steps_cap, config.workers);
      spdlog::info("rl step {}: validation reward {:.4f}", update, v);
      if (v > result.best_validation_reward) {
        result.best_validation_reward = v;
        result.best_step = update;
        for (std::size_t i = 0; i < best.size(); ++i) best[i] = model.params().all()[i].value;
      }
    }
  }
  if (!validation.empty()) {
    for (std::size_t i = 0; i < best.size(); ++i) {
      model.params()[ParamId{i}].value = best[i];
    }
  }
  return result;
}

void write_curve_csv(const std::string& path, const std::vector<CurvePoint>& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "step,mean_reward,eoe_rate\n";
  out.precision(17);
  for (const auto& p : curve) out << p.step << ',' << p.mean_reward << ',' << p.eoe_rate << '\n';
}

std::vector<CurvePoint> read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(in, line);
  if (line != "step,mean_reward,eoe_rate") {
    throw std::runtime_error(path + ": expected header 'step,mean_reward,eoe_rate'");
  }
  std::vector<CurvePoint> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    CurvePoint p;
    char c1 = 0, c2 = 0;
    std::istringstream ss(line);
    if (!(ss >> p.step >> c1 >> p.mean_reward >> c2 >> p.eoe_rate) || c1 != ',' || c2 != ',') {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed curve row");
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace summ
