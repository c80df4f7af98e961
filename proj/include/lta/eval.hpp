#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lta/edit_distance.hpp"
#include "lta/errors.hpp"
#include "lta/grid.hpp"
#include "lta/vocab.hpp"

namespace lta {

// --- sequence-forecast protocol (edit distance over 5 candidates) ---------

struct EdReport {
  double verb_ed = 0.0;
  double noun_ed = 0.0;
  double action_ed = 0.0;
};

inline void to_json(nlohmann::json& j, const EdReport& r) {
  j = {{"verb_ed", r.verb_ed}, {"noun_ed", r.noun_ed}, {"action_ed", r.action_ed}};
}

constexpr std::size_t kCandidateCount = 5;

namespace detail {

inline std::vector<std::int64_t> verb_view(const ActionSequence& seq) {
  std::vector<std::int64_t> out;
  out.reserve(seq.size());
  for (const auto& p : seq) out.push_back(p.is_pad() ? -1 : p.verb);
  return out;
}

inline std::vector<std::int64_t> noun_view(const ActionSequence& seq) {
  std::vector<std::int64_t> out;
  out.reserve(seq.size());
  for (const auto& p : seq) out.push_back(p.is_pad() ? -1 : p.noun);
  return out;
}

inline std::vector<std::int64_t> pair_view(const ActionSequence& seq) {
  std::vector<std::int64_t> out;
  out.reserve(seq.size());
  for (const auto& p : seq) {
    out.push_back(p.is_pad() ? std::int64_t{-1}
                             : (static_cast<std::int64_t>(p.verb) << 32) |
                                   static_cast<std::int64_t>(static_cast<std::uint32_t>(p.noun)));
  }
  return out;
}

}  // namespace detail

// For each view (verbs, nouns, whole pairs) reports the minimum normalized
// edit distance achieved by any of the exactly-5 candidate sequences.
inline EdReport ego4d_eval(const std::vector<ActionSequence>& candidates,
                           const ActionSequence& truth) {
  if (candidates.size() != kCandidateCount) {
    throw InputError("ego4d_eval: expected exactly " + std::to_string(kCandidateCount) +
                     " candidate sequences, got " + std::to_string(candidates.size()));
  }
  if (truth.empty()) throw InputError("ego4d_eval: empty truth sequence");
  for (const auto& c : candidates) {
    if (c.size() != truth.size()) {
      throw InputError("ego4d_eval: candidate length " + std::to_string(c.size()) +
                       " does not match truth length " + std::to_string(truth.size()));
    }
  }

  const double z = static_cast<double>(truth.size());
  auto min_view = [&](auto view) {
    const auto truth_syms = view(truth);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) {
      best = std::min(best, static_cast<double>(edit_distance(view(c), truth_syms)) / z);
    }
    return best;
  };
  return {min_view(detail::verb_view), min_view(detail::noun_view),
          min_view(detail::pair_view)};
}

// --- ranking metrics -------------------------------------------------------

// Average precision of one ranking: sort by descending score (ties broken by
// ascending index), then average precision-at-k over the positive ranks.
// Returns nullopt when there is no positive label.
inline std::optional<double> average_precision(std::span<const double> scores,
                                               std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw InputError("average_precision: scores and labels differ in length");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  double sum = 0.0;
  std::size_t positives_seen = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]] > 0) {
      ++positives_seen;
      sum += static_cast<double>(positives_seen) / static_cast<double>(rank + 1);
    }
  }
  if (positives_seen == 0) return std::nullopt;
  return sum / static_cast<double>(positives_seen);
}

// --- anticipation-as-multi-label protocol (mAP over horizons) --------------

inline constexpr std::array<int, 3> kHorizons = {25, 50, 75};

// Per-horizon scores and labels, examples x classes.
struct HorizonData {
  Grid<double> scores;
  Grid<std::uint8_t> labels;
};

struct FreqRareSplit {
  std::vector<std::size_t> freq_classes;
  std::vector<std::size_t> rare_classes;
};

// FREQ = classes whose training count reaches the threshold (median of the
// nonzero counts unless overridden); RARE = everything else.
inline FreqRareSplit make_freq_rare_split(std::span<const std::int64_t> training_counts,
                                          std::optional<double> threshold = std::nullopt) {
  if (training_counts.empty()) throw InputError("freq/rare split: empty count list");
  std::vector<std::int64_t> nonzero;
  for (auto c : training_counts) {
    if (c < 0) throw InputError("freq/rare split: negative count");
    if (c > 0) nonzero.push_back(c);
  }
  if (nonzero.empty()) throw InputError("freq/rare split: all counts are zero");

  double cut;
  if (threshold) {
    cut = *threshold;
  } else {
    std::sort(nonzero.begin(), nonzero.end());
    const std::size_t mid = nonzero.size() / 2;
    cut = (nonzero.size() % 2 == 1)
              ? static_cast<double>(nonzero[mid])
              : 0.5 * static_cast<double>(nonzero[mid - 1] + nonzero[mid]);
  }

  FreqRareSplit split;
  for (std::size_t i = 0; i < training_counts.size(); ++i) {
    if (static_cast<double>(training_counts[i]) >= cut) {
      split.freq_classes.push_back(i);
    } else {
      split.rare_classes.push_back(i);
    }
  }
  return split;
}

struct CategoryScores {
  std::optional<double> all;
  std::optional<double> freq;
  std::optional<double> rare;
};

struct MapReport {
  std::array<CategoryScores, 3> per_horizon;  // aligned with kHorizons
  CategoryScores average;                     // arithmetic mean over horizons
};

inline void to_json(nlohmann::json& j, const CategoryScores& c) {
  auto field = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  j = {{"all", field(c.all)}, {"freq", field(c.freq)}, {"rare", field(c.rare)}};
}

inline void to_json(nlohmann::json& j, const MapReport& r) {
  j = nlohmann::json::object();
  for (std::size_t h = 0; h < kHorizons.size(); ++h) {
    j["P" + std::to_string(kHorizons[h])] = r.per_horizon[h];
  }
  j["average"] = r.average;
}

// Class-wise AP with examples as ranking units, then mAP per category and
// the per-category mean across the three observation horizons. Classes with
// no positive label at a horizon are excluded from that horizon's mean.
inline MapReport map_eval(const std::array<HorizonData, 3>& horizons,
                          const FreqRareSplit& split) {
  MapReport report;
  std::array<std::vector<std::optional<double>>, 3> class_ap;

  for (std::size_t h = 0; h < horizons.size(); ++h) {
    const auto& data = horizons[h];
    if (data.scores.rows() != data.labels.rows() || data.scores.cols() != data.labels.cols()) {
      throw InputError("map_eval: score and label grids disagree on shape");
    }
    const std::size_t examples = data.scores.rows();
    const std::size_t classes = data.scores.cols();
    class_ap[h].resize(classes);
    std::vector<double> scores(examples);
    std::vector<int> labels(examples);
    for (std::size_t c = 0; c < classes; ++c) {
      for (std::size_t e = 0; e < examples; ++e) {
        scores[e] = data.scores.at(e, c);
        labels[e] = data.labels.at(e, c);
      }
      class_ap[h][c] = average_precision(scores, labels);
    }
  }

  auto category_mean = [&](std::size_t h, std::span<const std::size_t> members)
      -> std::optional<double> {
    double sum = 0.0;
    std::size_t evaluable = 0;
    for (std::size_t c : members) {
      if (c >= class_ap[h].size()) throw InputError("map_eval: split index out of range");
      if (class_ap[h][c]) {
        sum += *class_ap[h][c];
        ++evaluable;
      }
    }
    if (evaluable == 0) return std::nullopt;
    return sum / static_cast<double>(evaluable);
  };

  std::vector<std::size_t> all_classes;
  all_classes.insert(all_classes.end(), split.freq_classes.begin(), split.freq_classes.end());
  all_classes.insert(all_classes.end(), split.rare_classes.begin(), split.rare_classes.end());
  std::sort(all_classes.begin(), all_classes.end());

  for (std::size_t h = 0; h < horizons.size(); ++h) {
    report.per_horizon[h].all = category_mean(h, all_classes);
    report.per_horizon[h].freq = category_mean(h, split.freq_classes);
    report.per_horizon[h].rare = category_mean(h, split.rare_classes);
  }

  auto average_of = [&](auto member) -> std::optional<double> {
    double sum = 0.0;
    std::size_t present = 0;
    for (const auto& horizon : report.per_horizon) {
      if (const auto& v = member(horizon)) {
        sum += *v;
        ++present;
      }
    }
    if (present == 0) return std::nullopt;
    return sum / static_cast<double>(present);
  };
  report.average.all = average_of([](const CategoryScores& c) { return c.all; });
  report.average.freq = average_of([](const CategoryScores& c) { return c.freq; });
  report.average.rare = average_of([](const CategoryScores& c) { return c.rare; });
  return report;
}

// Aligned-text rendering for terminal reports; the JSON form is the
// contract.
inline std::string ed_report_table(const EdReport& r) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-8s %-8s %-8s\n%-8.4f %-8.4f %-8.4f\n", "verb", "noun",
                "action", r.verb_ed, r.noun_ed, r.action_ed);
  return buf;
}

inline std::string map_report_table(const MapReport& r) {
  std::string out = "horizon  all      freq     rare\n";
  auto cell = [](const std::optional<double>& v) {
    char buf[16];
    if (v) {
      std::snprintf(buf, sizeof(buf), "%-8.4f", *v);
    } else {
      std::snprintf(buf, sizeof(buf), "%-8s", "n/a");
    }
    return std::string(buf);
  };
  for (std::size_t h = 0; h < kHorizons.size(); ++h) {
    char head[16];
    std::snprintf(head, sizeof(head), "P%-7d ", kHorizons[h]);
    out += head;
    out += cell(r.per_horizon[h].all) + " " + cell(r.per_horizon[h].freq) + " " +
           cell(r.per_horizon[h].rare) + "\n";
  }
  out += "avg      " + cell(r.average.all) + " " + cell(r.average.freq) + " " +
         cell(r.average.rare) + "\n";
  return out;
}

}  // namespace lta
