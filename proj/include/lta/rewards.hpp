#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lta/edit_distance.hpp"
#include "lta/embedding.hpp"
#include "lta/errors.hpp"
#include "lta/eval.hpp"
#include "lta/structured.hpp"
#include "lta/vocab.hpp"

namespace lta {

struct RewardWeights {
  double w1 = 0.90;  // gates the task score by the length reward
  double w2 = 0.10;  // soft overlong penalty
  double w3 = 0.85;  // accuracy
  double w4 = 0.05;  // intention
  double w5 = 0.05;  // language
  double w6 = 0.05;  // format

  void validate() const {
    for (double w : {w1, w2, w3, w4, w5, w6}) {
      if (w < 0.0) throw InputError("reward weights must be non-negative");
    }
  }
};

struct IntentionParams {
  double beta = 0.8;   // similarity where the sigmoid is centered
  double gamma = 40.0;  // sharpness

  void validate() const {
    if (!(gamma > 0.0)) throw InputError("intention gamma must be positive");
    if (!(beta > 0.0 && beta < 1.0)) throw InputError("intention beta must be in (0, 1)");
  }
};

struct OverlongParams {
  int l_max = 450;
  int l_cache = 256;

  void validate() const {
    if (l_max < 1) throw InputError("overlong l_max must be positive");
    if (l_cache < 1) throw InputError("overlong l_cache must be positive");
    if (l_cache > l_max) throw InputError("overlong l_cache must not exceed l_max");
  }
};

struct RewardConfig {
  RewardWeights weights;
  IntentionParams intention;
  OverlongParams overlong;

  void validate() const {
    weights.validate();
    intention.validate();
    overlong.validate();
  }
};

inline void from_json(const nlohmann::json& j, RewardConfig& cfg) {
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    cfg.weights.w1 = w.value("w1", cfg.weights.w1);
    cfg.weights.w2 = w.value("w2", cfg.weights.w2);
    cfg.weights.w3 = w.value("w3", cfg.weights.w3);
    cfg.weights.w4 = w.value("w4", cfg.weights.w4);
    cfg.weights.w5 = w.value("w5", cfg.weights.w5);
    cfg.weights.w6 = w.value("w6", cfg.weights.w6);
  }
  if (j.contains("intention")) {
    const auto& p = j.at("intention");
    cfg.intention.beta = p.value("beta", cfg.intention.beta);
    cfg.intention.gamma = p.value("gamma", cfg.intention.gamma);
  }
  if (j.contains("overlong")) {
    const auto& p = j.at("overlong");
    cfg.overlong.l_max = p.value("l_max", cfg.overlong.l_max);
    cfg.overlong.l_cache = p.value("l_cache", cfg.overlong.l_cache);
  }
  cfg.validate();
}

inline void to_json(nlohmann::json& j, const RewardConfig& cfg) {
  j = {{"weights",
        {{"w1", cfg.weights.w1},
         {"w2", cfg.weights.w2},
         {"w3", cfg.weights.w3},
         {"w4", cfg.weights.w4},
         {"w5", cfg.weights.w5},
         {"w6", cfg.weights.w6}}},
       {"intention", {{"beta", cfg.intention.beta}, {"gamma", cfg.intention.gamma}}},
       {"overlong", {{"l_max", cfg.overlong.l_max}, {"l_cache", cfg.overlong.l_cache}}}};
}

inline RewardConfig load_reward_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open reward config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("reward config '" + path + "': " + e.what());
  }
  return j.get<RewardConfig>();
}

struct RewardBreakdown {
  double s_len = 0.0;
  double s_fmt = 0.0;
  double s_lang = 0.0;
  double s_acc = 0.0;
  double s_int = 0.0;
  double r_soft = 0.0;
  double r_task = 0.0;
  double r_total = 0.0;
};

inline void to_json(nlohmann::json& j, const RewardBreakdown& b) {
  j = {{"s_len", b.s_len},   {"s_fmt", b.s_fmt},   {"s_lang", b.s_lang},
       {"s_acc", b.s_acc},   {"s_int", b.s_int},   {"r_soft", b.r_soft},
       {"r_task", b.r_task}, {"r_total", b.r_total}};
}

// 1 when the generated pair list reaches the target length Z.
inline double length_reward(const ActionSequence& parsed_pairs, int future_length) {
  if (future_length < 1) throw InputError("length_reward: Z must be >= 1");
  return parsed_pairs.size() >= static_cast<std::size_t>(future_length) ? 1.0 : 0.0;
}

inline double format_reward(const StructuredOutput& parse) {
  return parse.tags_valid ? 1.0 : 0.0;
}

inline double language_reward(std::string_view raw) {
  return check_language(raw) ? 1.0 : 0.0;
}

// 0 until L enters (l_max - l_cache, l_max], then a linear ramp down to -1,
// and -1 past l_max.
inline double soft_overlong(int length, const OverlongParams& p) {
  p.validate();
  if (length < 0) throw InputError("soft_overlong: negative length");
  const int window_start = p.l_max - p.l_cache;
  if (length <= window_start) return 0.0;
  if (length > p.l_max) return -1.0;
  return -static_cast<double>(length - window_start) / static_cast<double>(p.l_cache);
}

// Normalizes the prediction to length Z (truncate or pad), then scores
// 1 - ED/Z with the pad marker never matching a real pair.
inline double accuracy_reward_ed(const ActionSequence& pred, const ActionSequence& truth,
                                 int future_length) {
  if (truth.empty()) throw InputError("accuracy_reward_ed: empty truth sequence");
  if (truth.size() != static_cast<std::size_t>(future_length)) {
    throw InputError("accuracy_reward_ed: |truth| must equal Z");
  }
  ActionSequence normalized(pred.begin(),
                            pred.begin() + std::min(pred.size(), truth.size()));
  normalized.resize(truth.size(), ActionPair::pad());

  // Encode pairs as scalars for the distance; pads map to a symbol no real
  // pair can take.
  auto encode = [](const ActionSequence& seq) {
    std::vector<std::int64_t> symbols;
    symbols.reserve(seq.size());
    for (const auto& pair : seq) {
      symbols.push_back(pair.is_pad()
                            ? std::int64_t{-1}
                            : (static_cast<std::int64_t>(pair.verb) << 32) |
                                  static_cast<std::int64_t>(static_cast<std::uint32_t>(pair.noun)));
    }
    return symbols;
  };
  const auto d = edit_distance(encode(normalized), encode(truth));
  const double reward = 1.0 - static_cast<double>(d) / static_cast<double>(truth.size());
  return std::clamp(reward, 0.0, 1.0);
}

struct ApReward {
  double value = 0.0;
  bool skipped_no_positives = false;
};

// mAP-style accuracy reward: the single example's average precision. A
// rollout with no positive labels scores 0 and raises the skipped flag so
// callers can keep the reward total.
inline ApReward accuracy_reward_map(std::span<const double> scores,
                                    std::span<const int> labels) {
  const auto ap = average_precision(scores, labels);
  if (!ap) return {0.0, true};
  return {*ap, false};
}

// min(sigmoid(gamma * (sim - beta)) / sigmoid(gamma * (1 - beta)), 1).
inline double intention_reward_from_similarity(double sim, const IntentionParams& p) {
  p.validate();
  const auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  const double ratio = sigmoid(p.gamma * (sim - p.beta)) / sigmoid(p.gamma * (1.0 - p.beta));
  return std::min(ratio, 1.0);
}

// Sigmoid-normalized cosine similarity between the generated and reference
// intention embeddings, clamped at 1.
inline double intention_reward(std::string_view int_gen, std::string_view int_gt,
                               const EmbeddingProvider& emb, const IntentionParams& p) {
  const auto a = emb.embed(int_gen);
  const auto b = emb.embed(int_gt);
  return intention_reward_from_similarity(cosine_similarity(a, b), p);
}

// R = w1 * S_len * R_task + w2 * R_soft with
// R_task = w3 * S_acc + w4 * S_int + w5 * S_lang + w6 * S_fmt.
inline RewardBreakdown total_reward(double s_len, double s_fmt, double s_lang, double s_acc,
                                    double s_int, double r_soft, const RewardWeights& w) {
  w.validate();
  RewardBreakdown b;
  b.s_len = s_len;
  b.s_fmt = s_fmt;
  b.s_lang = s_lang;
  b.s_acc = s_acc;
  b.s_int = s_int;
  b.r_soft = r_soft;
  b.r_task = w.w3 * s_acc + w.w4 * s_int + w.w5 * s_lang + w.w6 * s_fmt;
  b.r_total = w.w1 * s_len * b.r_task + w.w2 * r_soft;
  return b;
}

struct ScoredGeneration {
  StructuredOutput parsed;
  RewardBreakdown breakdown;
};

// Full reward pipeline for one raw generation against one reference record.
inline ScoredGeneration score_generation(std::string_view raw, const ActionSequence& truth_future,
                                         std::string_view intention_gt, const Vocabulary& vocab,
                                         const RewardConfig& cfg, const EmbeddingProvider& emb) {
  cfg.validate();
  ScoredGeneration out;
  out.parsed = parse_and_extract(raw, vocab);
  const int future_length = static_cast<int>(truth_future.size());

  const double s_len = length_reward(out.parsed.parsed_pairs, future_length);
  const double s_fmt = format_reward(out.parsed);
  const double s_lang = language_reward(raw);
  const double s_acc = accuracy_reward_ed(out.parsed.parsed_pairs, truth_future, future_length);
  const double s_int =
      intention_reward(out.parsed.intention_text, intention_gt, emb, cfg.intention);
  const double r_soft = soft_overlong(static_cast<int>(out.parsed.token_count), cfg.overlong);

  out.breakdown = total_reward(s_len, s_fmt, s_lang, s_acc, s_int, r_soft, cfg.weights);
  return out;
}

}  // namespace lta
