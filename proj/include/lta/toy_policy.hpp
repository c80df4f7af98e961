#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lta/errors.hpp"
#include "lta/grid.hpp"
#include "lta/rng.hpp"
#include "lta/structured.hpp"
#include "lta/vocab.hpp"

namespace lta {

// Fixed think/intention filler wrapped around the sampled answer, so the
// format and language rewards are attainable without language modeling.
struct PolicyTextTemplate {
  std::string think = "I observe the recent actions.";
  std::string intention = "I plan to continue the routine.";
};

// Prompt-side conditioning available to the policy: the last observed pair.
struct PromptInfo {
  ActionPair last_observed;
};

struct SampledOutput {
  std::string raw;
  std::vector<std::size_t> emissions;  // includes the stop symbol on early stop
};

// Tabular autoregressive softmax policy over verb-noun pairs plus a stop
// symbol. Emissions condition either on nothing (order 0) or on the previous
// emission and a hash bucket of the prompt's last observed pair (order 1);
// that is enough state to learn a first-order pair chain while keeping exact
// log-probabilities and gradients.
class ToyPolicy {
 public:
  static constexpr std::size_t kPromptBuckets = 16;

  ToyPolicy(std::size_t verb_count, std::size_t noun_count, int context_order)
      : verb_count_(verb_count), noun_count_(noun_count), context_order_(context_order) {
    if (verb_count_ == 0 || noun_count_ == 0) {
      throw InputError("toy policy: empty vocabulary");
    }
    if (context_order_ != 0 && context_order_ != 1) {
      throw InputError("toy policy: context_order must be 0 or 1");
    }
    logits_ = Grid<double>(context_rows(), alphabet_size(), 0.0);
  }

  std::size_t verb_count() const { return verb_count_; }
  std::size_t noun_count() const { return noun_count_; }
  int context_order() const { return context_order_; }
  std::size_t alphabet_size() const { return verb_count_ * noun_count_ + 1; }
  std::size_t stop_symbol() const { return alphabet_size() - 1; }
  std::size_t context_rows() const {
    return context_order_ == 0 ? 1 : kPromptBuckets * (alphabet_size() + 1);
  }

  Grid<double>& logits() { return logits_; }
  const Grid<double>& logits() const { return logits_; }

  ActionPair pair_of(std::size_t symbol) const {
    return {static_cast<int>(symbol / noun_count_), static_cast<int>(symbol % noun_count_)};
  }
  std::size_t symbol_of(const ActionPair& pair) const {
    return static_cast<std::size_t>(pair.verb) * noun_count_ +
           static_cast<std::size_t>(pair.noun);
  }

  // Row of the logits table for the next emission. prev == alphabet_size()
  // means "nothing emitted yet".
  std::size_t context_row(const PromptInfo& prompt, std::size_t prev) const {
    if (context_order_ == 0) return 0;
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t x) {
      h ^= x;
      h *= 0x100000001b3ULL;
    };
    mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(prompt.last_observed.verb)));
    mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(prompt.last_observed.noun)));
    const std::size_t bucket = static_cast<std::size_t>(h % kPromptBuckets);
    return bucket * (alphabet_size() + 1) + prev;
  }

  std::vector<double> emission_probs(std::size_t row, double temperature) const {
    if (!(temperature > 0.0)) throw InputError("toy policy: temperature must be positive");
    const std::size_t a = alphabet_size();
    std::vector<double> probs(a);
    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < a; ++s) {
      max_logit = std::max(max_logit, logits_.at(row, s) / temperature);
    }
    double total = 0.0;
    for (std::size_t s = 0; s < a; ++s) {
      probs[s] = std::exp(logits_.at(row, s) / temperature - max_logit);
      total += probs[s];
    }
    for (double& p : probs) p /= total;
    return probs;
  }

 private:
  std::size_t verb_count_;
  std::size_t noun_count_;
  int context_order_;
  Grid<double> logits_;
};

// Emits up to Z pairs autoregressively, stopping early on the stop symbol,
// and wraps them into the canonical tag layout.
inline SampledOutput sample_output(const ToyPolicy& policy, const PromptInfo& prompt,
                                   int future_length, double temperature, Rng& rng,
                                   const Vocabulary& vocab,
                                   const PolicyTextTemplate& text = {}) {
  SampledOutput out;
  std::string answer;
  std::size_t prev = policy.alphabet_size();
  for (int step = 0; step < future_length; ++step) {
    const std::size_t row = policy.context_row(prompt, prev);
    const auto probs = policy.emission_probs(row, temperature);
    const std::size_t symbol = rng.categorical(probs);
    out.emissions.push_back(symbol);
    if (symbol == policy.stop_symbol()) break;
    if (!answer.empty()) answer += ", ";
    answer += vocab.pair_label(policy.pair_of(symbol));
    prev = symbol;
  }
  out.raw = render_structured(text.think, text.intention, answer);
  return out;
}

inline double sequence_logprob(const ToyPolicy& policy, const PromptInfo& prompt,
                               std::span<const std::size_t> emissions,
                               double temperature = 1.0) {
  double logp = 0.0;
  std::size_t prev = policy.alphabet_size();
  for (std::size_t symbol : emissions) {
    if (symbol >= policy.alphabet_size()) {
      throw InputError("sequence_logprob: emission symbol out of alphabet");
    }
    const std::size_t row = policy.context_row(prompt, prev);
    const auto probs = policy.emission_probs(row, temperature);
    logp += std::log(probs[symbol]);
    prev = symbol;
  }
  return logp;
}

// d log pi / d logits. Each visited (row, symbol) accumulates
// (1{symbol emitted} - softmax) / temperature; unvisited rows stay zero.
inline Grid<double> logprob_gradient(const ToyPolicy& policy, const PromptInfo& prompt,
                                     std::span<const std::size_t> emissions,
                                     double temperature = 1.0) {
  Grid<double> grad(policy.logits().rows(), policy.logits().cols(), 0.0);
  std::size_t prev = policy.alphabet_size();
  for (std::size_t symbol : emissions) {
    if (symbol >= policy.alphabet_size()) {
      throw InputError("logprob_gradient: emission symbol out of alphabet");
    }
    const std::size_t row = policy.context_row(prompt, prev);
    const auto probs = policy.emission_probs(row, temperature);
    for (std::size_t s = 0; s < probs.size(); ++s) {
      grad.at(row, s) += (((s == symbol) ? 1.0 : 0.0) - probs[s]) / temperature;
    }
    prev = symbol;
  }
  return grad;
}

inline void apply_update(ToyPolicy& policy, const Grid<double>& gradient,
                         double learning_rate) {
  if (!policy.logits().same_shape(gradient)) {
    throw InputError("apply_update: gradient shape does not match policy logits");
  }
  auto& data = policy.logits().data();
  const auto& g = gradient.data();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] += learning_rate * g[i];
}

inline nlohmann::json policy_to_json(const ToyPolicy& policy) {
  nlohmann::json j;
  j["verb_count"] = policy.verb_count();
  j["noun_count"] = policy.noun_count();
  j["context_order"] = policy.context_order();
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < policy.logits().rows(); ++r) {
    const double* row = &policy.logits().at(r, 0);
    rows.push_back(std::vector<double>(row, row + policy.logits().cols()));
  }
  j["logits"] = std::move(rows);
  return j;
}

inline ToyPolicy policy_from_json(const nlohmann::json& j) {
  ToyPolicy policy(j.at("verb_count").get<std::size_t>(), j.at("noun_count").get<std::size_t>(),
                   j.at("context_order").get<int>());
  const auto& rows = j.at("logits");
  if (rows.size() != policy.logits().rows()) {
    throw InputError("policy checkpoint: logits row count mismatch");
  }
  for (std::size_t r = 0; r < policy.logits().rows(); ++r) {
    const auto& row = rows[r];
    if (row.size() != policy.logits().cols()) {
      throw InputError("policy checkpoint: logits column count mismatch");
    }
    for (std::size_t c = 0; c < policy.logits().cols(); ++c) {
      policy.logits().at(r, c) = row[c].get<double>();
    }
  }
  return policy;
}

}  // namespace lta
