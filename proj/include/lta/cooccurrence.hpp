#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lta/errors.hpp"
#include "lta/grid.hpp"
#include "lta/vocab.hpp"

namespace lta {

// |V| x |N| grid of verb-noun co-occurrence counts.
using CooccurrenceMatrix = Grid<std::int64_t>;

// Row- and column-normalized conditionals. Rows/columns whose source counts
// are all zero stay all zero: an unseen verb must not endorse arbitrary
// nouns.
struct ConditionalTables {
  Grid<double> p_noun_given_verb;
  Grid<double> p_verb_given_noun;
};

struct MarginalDistributions {
  std::vector<double> p_verb;
  std::vector<double> p_noun;

  void validate() const {
    validate_one(p_verb, "p_verb");
    validate_one(p_noun, "p_noun");
  }

 private:
  static void validate_one(const std::vector<double>& p, const char* name) {
    if (p.empty()) throw InputError(std::string(name) + ": empty distribution");
    double sum = 0.0;
    for (double x : p) {
      if (x < 0.0) throw InputError(std::string(name) + ": negative probability");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw InputError(std::string(name) + ": probabilities sum to " + std::to_string(sum));
    }
  }
};

// Tallies (verb, noun) occurrences over the observed segments of every
// record; future labels are counted only when include_future is set, so the
// default cannot leak evaluation labels. Pad markers are skipped.
inline CooccurrenceMatrix build_cooccurrence(const std::vector<AnnotationRecord>& annotations,
                                             const Vocabulary& vocab,
                                             bool include_future = false) {
  CooccurrenceMatrix counts(vocab.verb_count(), vocab.noun_count(), 0);
  auto tally = [&](const ActionSequence& seq) {
    for (const auto& pair : seq) {
      if (pair.is_pad()) continue;
      if (!vocab.contains(pair)) {
        throw InputError("co-occurrence: action pair (" + std::to_string(pair.verb) + ", " +
                         std::to_string(pair.noun) + ") out of range for vocabulary");
      }
      ++counts.at(static_cast<std::size_t>(pair.verb), static_cast<std::size_t>(pair.noun));
    }
  };
  for (const auto& rec : annotations) {
    tally(rec.observed);
    if (include_future) tally(rec.future);
  }
  return counts;
}

inline ConditionalTables normalize_conditionals(const CooccurrenceMatrix& counts) {
  const std::size_t verbs = counts.rows();
  const std::size_t nouns = counts.cols();
  ConditionalTables tables{Grid<double>(verbs, nouns, 0.0), Grid<double>(verbs, nouns, 0.0)};

  for (std::size_t v = 0; v < verbs; ++v) {
    std::int64_t row_sum = 0;
    for (std::size_t n = 0; n < nouns; ++n) row_sum += counts.at(v, n);
    if (row_sum == 0) continue;
    for (std::size_t n = 0; n < nouns; ++n) {
      tables.p_noun_given_verb.at(v, n) =
          static_cast<double>(counts.at(v, n)) / static_cast<double>(row_sum);
    }
  }
  for (std::size_t n = 0; n < nouns; ++n) {
    std::int64_t col_sum = 0;
    for (std::size_t v = 0; v < verbs; ++v) col_sum += counts.at(v, n);
    if (col_sum == 0) continue;
    for (std::size_t v = 0; v < verbs; ++v) {
      tables.p_verb_given_noun.at(v, n) =
          static_cast<double>(counts.at(v, n)) / static_cast<double>(col_sum);
    }
  }
  return tables;
}

// Corrected joint score: p(v) * p(n) * (P(n|v) + P(v|n)) / 2. Left
// unnormalized; the decode only needs the argmax.
inline Grid<double> corrected_joint(const std::vector<double>& p_verb,
                                    const std::vector<double>& p_noun,
                                    const ConditionalTables& tables) {
  const std::size_t verbs = tables.p_noun_given_verb.rows();
  const std::size_t nouns = tables.p_noun_given_verb.cols();
  if (!tables.p_noun_given_verb.same_shape(tables.p_verb_given_noun)) {
    throw InputError("corrected_joint: conditional tables disagree on shape");
  }
  if (p_verb.size() != verbs || p_noun.size() != nouns) {
    throw InputError("corrected_joint: marginal sizes (" + std::to_string(p_verb.size()) +
                     ", " + std::to_string(p_noun.size()) + ") do not match tables (" +
                     std::to_string(verbs) + ", " + std::to_string(nouns) + ")");
  }
  Grid<double> scores(verbs, nouns);
  for (std::size_t v = 0; v < verbs; ++v) {
    for (std::size_t n = 0; n < nouns; ++n) {
      scores.at(v, n) = p_verb[v] * p_noun[n] * 0.5 *
                        (tables.p_noun_given_verb.at(v, n) + tables.p_verb_given_noun.at(v, n));
    }
  }
  return scores;
}

// Argmax cell of a score grid; ties break to the lowest verb index, then the
// lowest noun index.
inline ActionPair map_decode(const Grid<double>& scores) {
  if (scores.empty()) throw InputError("map_decode: empty score grid");
  std::size_t best_v = 0, best_n = 0;
  double best = scores.at(0, 0);
  for (std::size_t v = 0; v < scores.rows(); ++v) {
    for (std::size_t n = 0; n < scores.cols(); ++n) {
      if (scores.at(v, n) > best) {
        best = scores.at(v, n);
        best_v = v;
        best_n = n;
      }
    }
  }
  return {static_cast<int>(best_v), static_cast<int>(best_n)};
}

// CSV grid with verb labels as row headers and noun labels as column
// headers.
inline std::string cooccurrence_to_csv(const CooccurrenceMatrix& counts,
                                       const Vocabulary& vocab) {
  if (counts.rows() != vocab.verb_count() || counts.cols() != vocab.noun_count()) {
    throw InputError("co-occurrence CSV: matrix shape does not match vocabulary");
  }
  std::string out;
  for (const auto& noun : vocab.nouns()) {
    out += ",";
    out += noun;
  }
  out += "\n";
  for (std::size_t v = 0; v < counts.rows(); ++v) {
    out += vocab.verbs()[v];
    for (std::size_t n = 0; n < counts.cols(); ++n) {
      out += ",";
      out += std::to_string(counts.at(v, n));
    }
    out += "\n";
  }
  return out;
}

// Parses the CSV produced above and returns the matrix plus the labels it
// carries, so a caller can cross-check them against its vocabulary.
struct LabeledCooccurrence {
  std::vector<std::string> verbs;
  std::vector<std::string> nouns;
  CooccurrenceMatrix counts;
};

inline LabeledCooccurrence parse_cooccurrence_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("co-occurrence CSV: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  LabeledCooccurrence out;
  {
    std::stringstream header(line);
    std::string cell;
    bool first = true;
    while (std::getline(header, cell, ',')) {
      if (first) {
        if (!detail::trim(cell).empty()) {
          throw InputError("co-occurrence CSV: header must start with an empty cell");
        }
        first = false;
        continue;
      }
      out.nouns.push_back(detail::trim(cell));
    }
    if (first || out.nouns.empty()) {
      throw InputError("co-occurrence CSV: header carries no noun labels");
    }
  }

  std::vector<std::vector<std::int64_t>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    std::stringstream row(line);
    std::string cell;
    if (!std::getline(row, cell, ',')) continue;
    out.verbs.push_back(detail::trim(cell));
    std::vector<std::int64_t> values;
    while (std::getline(row, cell, ',')) {
      try {
        values.push_back(std::stoll(detail::trim(cell)));
      } catch (const std::exception&) {
        throw InputError("co-occurrence CSV line " + std::to_string(line_no) +
                         ": bad count '" + cell + "'");
      }
    }
    if (values.size() != out.nouns.size()) {
      throw InputError("co-occurrence CSV line " + std::to_string(line_no) + ": expected " +
                       std::to_string(out.nouns.size()) + " counts, got " +
                       std::to_string(values.size()));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw InputError("co-occurrence CSV: no verb rows");

  out.counts = CooccurrenceMatrix(rows.size(), out.nouns.size());
  for (std::size_t v = 0; v < rows.size(); ++v) {
    for (std::size_t n = 0; n < out.nouns.size(); ++n) {
      if (rows[v][n] < 0) throw InputError("co-occurrence CSV: negative count");
      out.counts.at(v, n) = rows[v][n];
    }
  }
  return out;
}

inline LabeledCooccurrence load_cooccurrence_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open co-occurrence file '" + path + "'");
  return parse_cooccurrence_csv(in);
}

}  // namespace lta
