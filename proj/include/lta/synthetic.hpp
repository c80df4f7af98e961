#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "lta/errors.hpp"
#include "lta/grid.hpp"
#include "lta/rng.hpp"
#include "lta/vocab.hpp"

namespace lta {

// Desk-scale anticipation task: a first-order Markov chain over verb-noun
// pairs. Joint pair states (not factored verb/noun chains) give the chain
// real co-occurrence structure for the correction module to exploit.
struct SyntheticTaskConfig {
  int verb_count = 5;
  int noun_count = 5;
  int observed_length = 8;   // K
  int future_length = 20;    // Z
  double transition_concentration = 0.3;
  std::uint64_t seed = 0;
  int record_count = 128;

  void validate() const {
    if (verb_count < 2) throw InputError("synthetic config: verb_count must be >= 2");
    if (noun_count < 2) throw InputError("synthetic config: noun_count must be >= 2");
    if (observed_length < 1) throw InputError("synthetic config: K must be >= 1");
    if (future_length < 1) throw InputError("synthetic config: Z must be >= 1");
    if (!(transition_concentration > 0.0)) {
      throw InputError("synthetic config: transition_concentration must be positive");
    }
    if (record_count < 1) throw InputError("synthetic config: record_count must be >= 1");
    // The transition table is dense over pair states; keep it desk-scale.
    if (static_cast<long long>(verb_count) * noun_count > 4096) {
      throw InputError("synthetic config: verb_count * noun_count must be <= 4096");
    }
  }
};

inline void from_json(const nlohmann::json& j, SyntheticTaskConfig& cfg) {
  cfg.verb_count = j.value("verb_count", cfg.verb_count);
  cfg.noun_count = j.value("noun_count", cfg.noun_count);
  cfg.observed_length = j.value("K", cfg.observed_length);
  cfg.future_length = j.value("Z", cfg.future_length);
  cfg.transition_concentration =
      j.value("transition_concentration", cfg.transition_concentration);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.record_count = j.value("record_count", cfg.record_count);
}

inline void to_json(nlohmann::json& j, const SyntheticTaskConfig& cfg) {
  j = {{"verb_count", cfg.verb_count},
       {"noun_count", cfg.noun_count},
       {"K", cfg.observed_length},
       {"Z", cfg.future_length},
       {"transition_concentration", cfg.transition_concentration},
       {"seed", cfg.seed},
       {"record_count", cfg.record_count}};
}

struct SyntheticTask {
  Vocabulary vocab;
  std::vector<AnnotationRecord> records;
  std::vector<double> initial;   // start distribution over pair states
  Grid<double> transitions;      // row-stochastic, states are v * |N| + n
};

namespace detail {

inline std::vector<std::string> synthetic_labels(int count, const char* const* stock,
                                                 int stock_count, const char* prefix) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    if (i < stock_count) {
      labels.emplace_back(stock[i]);
    } else {
      labels.push_back(std::string(prefix) + std::to_string(i));
    }
  }
  return labels;
}

inline Vocabulary synthetic_vocabulary(int verb_count, int noun_count) {
  static const char* const kVerbs[] = {"take", "put",  "open", "close", "wash", "cut",
                                       "mix",  "pour", "stir", "move",  "turn", "fill",
                                       "peel", "slice", "grab", "wipe"};
  static const char* const kNouns[] = {"cup",   "knife",  "bowl",  "door",  "pan",  "plate",
                                       "onion", "bread",  "bottle", "spoon", "towel", "board",
                                       "egg",   "jar",    "tap",   "cloth"};
  return Vocabulary(synthetic_labels(verb_count, kVerbs, 16, "verb"),
                    synthetic_labels(noun_count, kNouns, 16, "noun"));
}

// Long-run noun frequency of the chain, via power iteration from the
// initial distribution.
inline int dominant_noun(const std::vector<double>& initial, const Grid<double>& transitions,
                         int noun_count) {
  std::vector<double> dist = initial;
  std::vector<double> next(dist.size());
  for (int iter = 0; iter < 200; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < dist.size(); ++s) {
      if (dist[s] == 0.0) continue;
      for (std::size_t t = 0; t < dist.size(); ++t) {
        next[t] += dist[s] * transitions.at(s, t);
      }
    }
    dist.swap(next);
  }
  std::vector<double> noun_mass(static_cast<std::size_t>(noun_count), 0.0);
  for (std::size_t s = 0; s < dist.size(); ++s) {
    noun_mass[s % static_cast<std::size_t>(noun_count)] += dist[s];
  }
  int best = 0;
  for (int n = 1; n < noun_count; ++n) {
    if (noun_mass[static_cast<std::size_t>(n)] > noun_mass[static_cast<std::size_t>(best)]) {
      best = n;
    }
  }
  return best;
}

}  // namespace detail

inline SyntheticTask generate_synthetic_task(const SyntheticTaskConfig& cfg) {
  cfg.validate();
  const std::size_t states =
      static_cast<std::size_t>(cfg.verb_count) * static_cast<std::size_t>(cfg.noun_count);

  Rng chain_rng(cfg.seed, "synth.chain");
  Grid<double> transitions(states, states);
  for (std::size_t s = 0; s < states; ++s) {
    const auto row = chain_rng.dirichlet(cfg.transition_concentration, states);
    for (std::size_t t = 0; t < states; ++t) transitions.at(s, t) = row[t];
  }
  const std::vector<double> initial = chain_rng.dirichlet(cfg.transition_concentration, states);

  SyntheticTask task{detail::synthetic_vocabulary(cfg.verb_count, cfg.noun_count),
                     {},
                     initial,
                     std::move(transitions)};

  const int noun = detail::dominant_noun(task.initial, task.transitions, cfg.noun_count);
  const std::string intention = "prepare " + task.vocab.noun_label(noun);

  Rng walk_rng(cfg.seed, "synth.walk");
  task.records.reserve(static_cast<std::size_t>(cfg.record_count));
  const int steps = cfg.observed_length + cfg.future_length;
  for (int r = 0; r < cfg.record_count; ++r) {
    AnnotationRecord rec;
    char id[32];
    std::snprintf(id, sizeof(id), "clip_%04d", r);
    rec.clip_id = id;
    std::size_t state = walk_rng.categorical(task.initial);
    for (int k = 0; k < steps; ++k) {
      const ActionPair pair{static_cast<int>(state) / cfg.noun_count,
                            static_cast<int>(state) % cfg.noun_count};
      if (k < cfg.observed_length) {
        rec.observed.push_back(pair);
      } else {
        rec.future.push_back(pair);
      }
      if (k + 1 < steps) {
        const double* row = &task.transitions.at(state, 0);
        state = walk_rng.categorical(std::span<const double>(row, states));
      }
    }
    rec.intention_gt = intention;
    task.records.push_back(std::move(rec));
  }
  return task;
}

inline nlohmann::json transitions_to_json(const SyntheticTask& task) {
  nlohmann::json j;
  nlohmann::json labels = nlohmann::json::array();
  const int noun_count = static_cast<int>(task.vocab.noun_count());
  for (std::size_t s = 0; s < task.transitions.rows(); ++s) {
    labels.push_back(task.vocab.pair_label(
        {static_cast<int>(s) / noun_count, static_cast<int>(s) % noun_count}));
  }
  j["states"] = std::move(labels);
  j["initial"] = task.initial;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t s = 0; s < task.transitions.rows(); ++s) {
    const double* row = &task.transitions.at(s, 0);
    rows.push_back(std::vector<double>(row, row + task.transitions.cols()));
  }
  j["rows"] = std::move(rows);
  return j;
}

}  // namespace lta
