#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lta/errors.hpp"
#include "lta/grid.hpp"
#include "lta/rewards.hpp"
#include "lta/rng.hpp"
#include "lta/structured.hpp"
#include "lta/toy_policy.hpp"
#include "lta/vocab.hpp"

namespace lta {

struct GrpoConfig {
  int group_size = 5;
  double clip_epsilon = 0.2;
  double kl_coeff = 0.08;
  double std_floor = 1e-8;
  double temperature = 0.9;
  int steps = 500;
  // Sized for the tabular toy policy; at the 500-step budget anything much
  // lower cannot move the logits out of the uniform basin.
  double learning_rate = 1.0;
  std::uint64_t seed = 0;
  int batch_size = 4;
  // 0 keeps the step-0 reference snapshot for the whole run.
  int ref_refresh_interval = 0;

  void validate() const {
    if (group_size < 2) throw InputError("grpo config: group_size must be >= 2");
    if (!(clip_epsilon > 0.0)) throw InputError("grpo config: clip_epsilon must be positive");
    if (kl_coeff < 0.0) throw InputError("grpo config: kl_coeff must be non-negative");
    if (!(std_floor > 0.0)) throw InputError("grpo config: std_floor must be positive");
    if (!(temperature > 0.0)) throw InputError("grpo config: temperature must be positive");
    if (steps < 0) throw InputError("grpo config: steps must be non-negative");
    if (!(learning_rate > 0.0)) throw InputError("grpo config: learning_rate must be positive");
    if (batch_size < 1) throw InputError("grpo config: batch_size must be >= 1");
    if (ref_refresh_interval < 0) {
      throw InputError("grpo config: ref_refresh_interval must be non-negative");
    }
  }
};

inline void from_json(const nlohmann::json& j, GrpoConfig& cfg) {
  cfg.group_size = j.value("group_size", cfg.group_size);
  cfg.clip_epsilon = j.value("clip_epsilon", cfg.clip_epsilon);
  cfg.kl_coeff = j.value("kl_coeff", cfg.kl_coeff);
  cfg.std_floor = j.value("std_floor", cfg.std_floor);
  cfg.temperature = j.value("temperature", cfg.temperature);
  cfg.steps = j.value("steps", cfg.steps);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.ref_refresh_interval = j.value("ref_refresh_interval", cfg.ref_refresh_interval);
  cfg.validate();
}

inline void to_json(nlohmann::json& j, const GrpoConfig& cfg) {
  j = {{"group_size", cfg.group_size},
       {"clip_epsilon", cfg.clip_epsilon},
       {"kl_coeff", cfg.kl_coeff},
       {"std_floor", cfg.std_floor},
       {"temperature", cfg.temperature},
       {"steps", cfg.steps},
       {"learning_rate", cfg.learning_rate},
       {"seed", cfg.seed},
       {"batch_size", cfg.batch_size},
       {"ref_refresh_interval", cfg.ref_refresh_interval}};
}

inline GrpoConfig load_grpo_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open GRPO config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("GRPO config '" + path + "': " + e.what());
  }
  return j.get<GrpoConfig>();
}

// One sampled group: G outputs for the same context with their rewards,
// advantages and sequence log-probabilities under the new, old and reference
// policies.
struct RolloutGroup {
  std::string context;
  ActionSequence observed;
  std::vector<std::string> outputs_raw;
  std::vector<StructuredOutput> outputs_parsed;
  std::vector<double> rewards;
  std::vector<double> advantages;
  std::vector<double> logp_new;
  std::vector<double> logp_old;
  std::vector<double> logp_ref;

  std::size_t size() const { return rewards.size(); }

  void validate() const {
    const std::size_t g = rewards.size();
    if (g < 2) throw InputError("rollout group: need at least 2 samples");
    if (outputs_raw.size() != g || outputs_parsed.size() != g || advantages.size() != g ||
        logp_new.size() != g || logp_old.size() != g || logp_ref.size() != g) {
      throw InputError("rollout group: per-sample lists disagree on length");
    }
  }
};

// Group-standardized advantages with the unbiased (G-1) standard deviation.
// Degenerate groups (std below the floor) get all-zero advantages instead of
// dividing by ~0.
inline std::vector<double> compute_advantages(std::span<const double> rewards,
                                              double std_floor) {
  const std::size_t g = rewards.size();
  if (g < 2) throw InputError("compute_advantages: need at least 2 rewards");
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(g);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(g - 1);
  const double std_dev = std::sqrt(var);

  std::vector<double> advantages(g, 0.0);
  if (std_dev < std_floor) return advantages;
  for (std::size_t i = 0; i < g; ++i) advantages[i] = (rewards[i] - mean) / std_dev;
  return advantages;
}

// exp(logp_new - logp_old) with the exponent clamped to +-30 so a wild
// log-prob gap cannot overflow.
inline double likelihood_ratio(double logp_new, double logp_old) {
  return std::exp(std::clamp(logp_new - logp_old, -30.0, 30.0));
}

inline double clipped_surrogate(std::span<const double> ratios,
                                std::span<const double> advantages, double clip_epsilon) {
  if (ratios.size() != advantages.size()) {
    throw InputError("clipped_surrogate: ratios and advantages differ in length");
  }
  if (ratios.empty()) throw InputError("clipped_surrogate: empty group");
  double total = 0.0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double clipped =
        std::clamp(ratios[i], 1.0 - clip_epsilon, 1.0 + clip_epsilon) * advantages[i];
    total += std::min(ratios[i] * advantages[i], clipped);
  }
  return total / static_cast<double>(ratios.size());
}

// Per-sample reverse-KL estimator r - ln r - 1 with r = pi_ref / pi_theta,
// averaged over the group. Non-negative, zero iff every ratio is 1.
inline double kl_estimate(std::span<const double> logp_ref, std::span<const double> logp_new) {
  if (logp_ref.size() != logp_new.size()) {
    throw InputError("kl_estimate: log-prob lists differ in length");
  }
  if (logp_ref.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < logp_ref.size(); ++i) {
    const double d = std::clamp(logp_ref[i] - logp_new[i], -30.0, 30.0);
    total += std::exp(d) - d - 1.0;
  }
  return total / static_cast<double>(logp_ref.size());
}

struct GrpoStep {
  double objective = 0.0;
  double surrogate = 0.0;
  double kl = 0.0;
  Grid<double> gradient;
};

// Objective C - beta_kl * D_KL and its analytic gradient through the
// policy's log-probs. Clipped samples contribute nothing from the surrogate
// (subgradient 0 inside the clipped branch); every sample contributes
// -beta_kl * (1 - exp(logp_ref - logp_new)) * grad logp from the KL term.
inline GrpoStep grpo_objective(const RolloutGroup& group, const GrpoConfig& cfg,
                               std::span<const Grid<double>> logp_new_gradients) {
  group.validate();
  cfg.validate();
  const std::size_t g = group.size();
  if (logp_new_gradients.size() != g) {
    throw InputError("grpo_objective: need one log-prob gradient per sample");
  }
  for (const auto& grad : logp_new_gradients) {
    if (!grad.same_shape(logp_new_gradients.front())) {
      throw InputError("grpo_objective: gradient shapes disagree");
    }
  }

  std::vector<double> ratios(g);
  for (std::size_t i = 0; i < g; ++i) {
    ratios[i] = likelihood_ratio(group.logp_new[i], group.logp_old[i]);
  }
  GrpoStep step;
  step.surrogate = clipped_surrogate(ratios, group.advantages, cfg.clip_epsilon);
  step.kl = kl_estimate(group.logp_ref, group.logp_new);
  step.objective = step.surrogate - cfg.kl_coeff * step.kl;

  step.gradient = Grid<double>(logp_new_gradients.front().rows(),
                               logp_new_gradients.front().cols(), 0.0);
  const double inv_g = 1.0 / static_cast<double>(g);
  for (std::size_t i = 0; i < g; ++i) {
    const double unclipped = ratios[i] * group.advantages[i];
    const double clipped =
        std::clamp(ratios[i], 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon) *
        group.advantages[i];
    double coeff = 0.0;
    if (unclipped <= clipped) coeff += unclipped;
    const double d = std::clamp(group.logp_ref[i] - group.logp_new[i], -30.0, 30.0);
    coeff -= cfg.kl_coeff * (1.0 - std::exp(d));
    if (coeff == 0.0) continue;
    const auto& sample_grad = logp_new_gradients[i].data();
    auto& total = step.gradient.data();
    for (std::size_t p = 0; p < total.size(); ++p) {
      total[p] += inv_g * coeff * sample_grad[p];
    }
  }
  return step;
}

struct TrainStepLog {
  int step = 0;
  double mean_reward = 0.0;
  double mean_intention_reward = 0.0;
  double objective = 0.0;
  double kl = 0.0;
};

struct TrainResult {
  std::vector<TrainStepLog> log;
  ToyPolicy policy;
};

// Dataset plus reward wiring for the training loop.
struct TrainTask {
  Vocabulary vocab;
  std::vector<AnnotationRecord> records;
  PromptTemplate prompt;
  RewardConfig reward_cfg;
  PolicyTextTemplate filler;
};

// On-policy GRPO: each step samples a batch of contexts, draws G outputs per
// context from the current policy (whose log-probs become logp_old), scores
// them, standardizes advantages within each group and takes one ascent step
// against the step-0 reference snapshot. Deterministic given cfg.seed.
inline TrainResult train(ToyPolicy policy, const TrainTask& task, const GrpoConfig& cfg,
                         const EmbeddingProvider& emb = reference_embedder()) {
  cfg.validate();
  task.prompt.validate();
  task.reward_cfg.validate();
  if (task.records.empty()) throw InputError("train: empty dataset");

  TrainResult result{{}, std::move(policy)};
  ToyPolicy reference = result.policy;
  Rng batch_rng(cfg.seed, "grpo.batch");
  Rng sample_rng(cfg.seed, "grpo.sample");

  for (int step = 1; step <= cfg.steps; ++step) {
    if (cfg.ref_refresh_interval > 0 && (step - 1) % cfg.ref_refresh_interval == 0 &&
        step > 1) {
      reference = result.policy;
    }

    Grid<double> batch_gradient(result.policy.logits().rows(),
                                result.policy.logits().cols(), 0.0);
    double reward_sum = 0.0, intention_sum = 0.0, objective_sum = 0.0, kl_sum = 0.0;
    std::size_t sample_count = 0;

    for (int b = 0; b < cfg.batch_size; ++b) {
      const auto& record = task.records[batch_rng.uniform_index(task.records.size())];
      if (record.observed.empty()) throw InputError("train: record with no observed actions");
      const int future_length = static_cast<int>(record.future.size());
      const PromptInfo prompt_info{record.observed.back()};

      RolloutGroup group;
      group.observed = record.observed;
      group.context = render_prompt(record.observed, future_length, task.vocab, task.prompt);
      std::vector<Grid<double>> gradients;
      gradients.reserve(static_cast<std::size_t>(cfg.group_size));

      for (int i = 0; i < cfg.group_size; ++i) {
        auto sampled = sample_output(result.policy, prompt_info, future_length,
                                     cfg.temperature, sample_rng, task.vocab, task.filler);
        const double logp = sequence_logprob(result.policy, prompt_info, sampled.emissions,
                                             cfg.temperature);
        const double logp_ref =
            sequence_logprob(reference, prompt_info, sampled.emissions, cfg.temperature);
        auto scored =
            score_generation(sampled.raw, record.future,
                             record.intention_gt.value_or(""), task.vocab, task.reward_cfg, emb);

        group.outputs_raw.push_back(std::move(sampled.raw));
        group.rewards.push_back(scored.breakdown.r_total);
        intention_sum += scored.breakdown.s_int;
        group.outputs_parsed.push_back(std::move(scored.parsed));
        // Single inner epoch: the sampling policy is the current policy.
        group.logp_old.push_back(logp);
        group.logp_new.push_back(logp);
        group.logp_ref.push_back(logp_ref);
        gradients.push_back(logprob_gradient(result.policy, prompt_info, sampled.emissions,
                                             cfg.temperature));
      }
      group.advantages = compute_advantages(group.rewards, cfg.std_floor);

      const GrpoStep grpo = grpo_objective(group, cfg, gradients);
      objective_sum += grpo.objective;
      kl_sum += grpo.kl;
      for (double r : group.rewards) reward_sum += r;
      sample_count += group.size();

      auto& total = batch_gradient.data();
      const auto& g = grpo.gradient.data();
      for (std::size_t p = 0; p < total.size(); ++p) total[p] += g[p];
    }

    const double inv_batch = 1.0 / static_cast<double>(cfg.batch_size);
    for (double& p : batch_gradient.data()) p *= inv_batch;
    apply_update(result.policy, batch_gradient, cfg.learning_rate);

    result.log.push_back({step, reward_sum / static_cast<double>(sample_count),
                          intention_sum / static_cast<double>(sample_count),
                          objective_sum * inv_batch, kl_sum * inv_batch});
  }
  return result;
}

// CSV behind the reward curves: step, mean_reward, mean_intention_reward,
// objective, kl.
inline std::string training_log_to_csv(const std::vector<TrainStepLog>& log) {
  std::string out = "step,mean_reward,mean_intention_reward,objective,kl\n";
  char buf[192];
  for (const auto& row : log) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", row.step, row.mean_reward,
                  row.mean_intention_reward, row.objective, row.kl);
    out += buf;
  }
  return out;
}

}  // namespace lta
