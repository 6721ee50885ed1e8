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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "summ/extractor.hpp"
#include "summ/optim.hpp"

namespace summ {

// One document prepared for reinforcement learning. `rewrites[j]` is the
// frozen abstractor's output for document sentence j (or the sentence
// itself when the abstractor is bypassed).
struct RlExample {
  std::string id;
  SentenceIds sentences;
  std::vector<Tokens> rewrites;
  std::vector<Tokens> references;
};

struct Episode {
  std::string doc_id;
  int num_sentences = 0;
  std::vector<int> actions;  // sentence indices; num_sentences marks EOE
  bool stopped_by_eoe = false;
  std::vector<double> log_probs;
  std::vector<double> rewards;  // r(t+1) for each action
  std::vector<double> raw_returns;
  std::vector<double> returns;  // standardized when part of a batch
  std::vector<double> baselines;

  double total_reward() const;
};

// Reward of each action: ROUGE-L F1 between the rewrite of the chosen
// sentence and the reference sentence at the same step, 0 for steps past the
// last reference, and for EOE the ROUGE-1 F1 of all rewrites so far against
// all references (it replaces the per-sentence reward at that step).
std::vector<double> assign_rewards(std::span<const int> actions, int num_sentences,
                                   const std::vector<Tokens>& rewrites,
                                   const std::vector<Tokens>& references);

// Total reward of an extraction that stops after `indices`; when
// `terminal` is set the stop is scored like an EOE action.
double score_extraction(std::span<const int> indices, bool terminal,
                        const std::vector<Tokens>& rewrites,
                        const std::vector<Tokens>& references);

// Total reward of an already rewritten summary, scored like an episode:
// sentence t against reference t, plus the terminal ROUGE-1 F1 when
// `terminal` is set.
double summary_reward(const std::vector<Tokens>& sentences, bool terminal,
                      const std::vector<Tokens>& references);

// R_t = sum_{k >= t} gamma^(k - t) r_k.
std::vector<double> compute_returns(std::span<const double> rewards, double gamma);

// Standardizes `returns` over every step of every episode:
// (R - mean) / (std + 1e-8); a single value is only centered.
void standardize_returns(std::vector<Episode>& batch);

struct A2CLoss {
  Var actor;   // -(1/N) sum_t log pi(a_t) * (R_t - b_t), advantage held constant
  Var critic;  // (1/N) sum_t (b_t - R_t)^2
  Var total;
};

A2CLoss a2c_loss(Graph& g, std::span<const Var> log_probs, std::span<const Var> baselines,
                 std::span<const double> returns, double normalizer);

// A sampled (or greedy) episode together with the graph that produced it.
struct TracedEpisode {
  Graph graph;
  PolicyTrace trace;
  std::vector<Var> baselines;
  Episode episode;
};

TracedEpisode rollout(const ExtractorModel& model, const RlExample& example,
                      int max_steps, DecodeMode mode, Rng* rng);

struct A2CStats {
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double grad_norm = 0.0;
  double mean_reward = 0.0;
  double eoe_rate = 0.0;
};

// Returns, standardization, losses, backward on every traced episode
// (gradients summed in batch order), clipping and one Adam step. Throws with
// diagnostics on a non-finite loss.
A2CStats a2c_update(ExtractorModel& model, std::vector<TracedEpisode>& batch,
                    OptimState& optim, double gamma, double clip_norm, int workers);

struct RlConfig {
  double gamma = 0.95;
  double lr = 1e-4;
  double clip_norm = 2.0;
  int batch_size = 32;
  int max_steps_cap = 8;
  int updates = 1000;
  int log_interval = 20;
  int eval_interval = 100;
  std::uint64_t seed = 1;
  int workers = 1;
};

struct CurvePoint {
  int step = 0;
  double mean_reward = 0.0;
  double eoe_rate = 0.0;
};

struct RlResult {
  std::vector<CurvePoint> curve;
  double best_validation_reward = 0.0;
  int best_step = 0;
};

// Mean total reward of greedy EOE-terminated episodes.
double evaluate_policy(const ExtractorModel& model, const std::vector<RlExample>& examples,
                       int max_steps_cap, int workers);

// Synchronous A2C: sample a batch of episodes on the current parameters,
// update, repeat. Keeps the parameters with the best validation reward.
RlResult train_rl(ExtractorModel& model, const std::vector<RlExample>& train,
                  const std::vector<RlExample>& validation, const RlConfig& config);

void write_curve_csv(const std::string& path, const std::vector<CurvePoint>& curve);
std::vector<CurvePoint> read_curve_csv(const std::string& path);

}  // namespace summ
