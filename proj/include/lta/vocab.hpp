#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "lta/errors.hpp"

namespace lta {

// Padding sentinel used when short predictions are length-normalized before
// edit-distance scoring. It never enters a Vocabulary or a co-occurrence
// count; in files it is spelled with the label below.
constexpr int kPadIndex = -1;
inline constexpr std::string_view kPadLabel = "⟨pad⟩";

struct ActionPair {
  int verb = 0;
  int noun = 0;

  static constexpr ActionPair pad() { return {kPadIndex, kPadIndex}; }
  constexpr bool is_pad() const { return verb == kPadIndex && noun == kPadIndex; }

  friend constexpr bool operator==(const ActionPair&, const ActionPair&) = default;
};

using ActionSequence = std::vector<ActionPair>;

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Ordered verb and noun label sets. Indices are 0-based and stable; labels
// are unique within each list and both lists are non-empty.
class Vocabulary {
 public:
  Vocabulary(std::vector<std::string> verbs, std::vector<std::string> nouns)
      : verbs_(std::move(verbs)), nouns_(std::move(nouns)) {
    if (verbs_.empty()) throw InputError("vocabulary: empty verb set");
    if (nouns_.empty()) throw InputError("vocabulary: empty noun set");
    index_labels(verbs_, verb_index_, verb_index_ci_, "verb");
    index_labels(nouns_, noun_index_, noun_index_ci_, "noun");
  }

  const std::vector<std::string>& verbs() const { return verbs_; }
  const std::vector<std::string>& nouns() const { return nouns_; }
  std::size_t verb_count() const { return verbs_.size(); }
  std::size_t noun_count() const { return nouns_.size(); }

  std::optional<int> find_verb(std::string_view label) const {
    return find(verb_index_, label);
  }
  std::optional<int> find_noun(std::string_view label) const {
    return find(noun_index_, label);
  }
  // Case-insensitive lookup, used when parsing model generations.
  std::optional<int> find_verb_ci(std::string_view label) const {
    return find(verb_index_ci_, to_lower(label));
  }
  std::optional<int> find_noun_ci(std::string_view label) const {
    return find(noun_index_ci_, to_lower(label));
  }

  const std::string& verb_label(int index) const { return verbs_.at(static_cast<std::size_t>(index)); }
  const std::string& noun_label(int index) const { return nouns_.at(static_cast<std::size_t>(index)); }

  bool contains(const ActionPair& pair) const {
    if (pair.is_pad()) return true;
    return pair.verb >= 0 && pair.verb < static_cast<int>(verbs_.size()) &&
           pair.noun >= 0 && pair.noun < static_cast<int>(nouns_.size());
  }

  // "verb noun" label form, or the pad label for the pad marker.
  std::string pair_label(const ActionPair& pair) const {
    if (pair.is_pad()) return std::string(kPadLabel);
    return verb_label(pair.verb) + " " + noun_label(pair.noun);
  }

 private:
  using IndexMap = std::unordered_map<std::string, int>;

  static std::optional<int> find(const IndexMap& map, std::string_view label) {
    auto it = map.find(std::string(label));
    if (it == map.end()) return std::nullopt;
    return it->second;
  }

  static void index_labels(const std::vector<std::string>& labels, IndexMap& exact,
                           IndexMap& ci, const char* kind) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == kPadLabel) {
        throw InputError(std::string("vocabulary: reserved pad label used as ") + kind);
      }
      if (labels[i].empty() || labels[i].find_first_of(",\r\n") != std::string::npos) {
        // Commas and line breaks would corrupt the CSV formats.
        throw InputError(std::string("vocabulary: invalid ") + kind + " label '" + labels[i] +
                         "'");
      }
      if (!exact.emplace(labels[i], static_cast<int>(i)).second) {
        throw InputError(std::string("vocabulary: duplicate ") + kind + " label '" +
                         labels[i] + "'");
      }
      ci.emplace(to_lower(labels[i]), static_cast<int>(i));
    }
  }

  std::vector<std::string> verbs_;
  std::vector<std::string> nouns_;
  IndexMap verb_index_, noun_index_;
  IndexMap verb_index_ci_, noun_index_ci_;
};

// One annotated clip: K observed segments, Z ground-truth future actions and
// an optional reference intention string.
struct AnnotationRecord {
  std::string clip_id;
  ActionSequence observed;
  ActionSequence future;
  std::optional<std::string> intention_gt;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline ActionPair resolve_pair(const std::string& verb, const std::string& noun,
                               const Vocabulary& vocab, std::size_t line_no) {
  if (verb == kPadLabel && noun == kPadLabel) return ActionPair::pad();
  auto v = vocab.find_verb(verb);
  if (!v) {
    throw InputError("line " + std::to_string(line_no) + ": unknown verb label '" + verb + "'");
  }
  auto n = vocab.find_noun(noun);
  if (!n) {
    throw InputError("line " + std::to_string(line_no) + ": unknown noun label '" + noun + "'");
  }
  return {*v, *n};
}

inline ActionSequence parse_pair_array(const nlohmann::json& arr, const Vocabulary& vocab,
                                       std::size_t line_no, const char* field) {
  if (!arr.is_array()) {
    throw InputError("line " + std::to_string(line_no) + ": field '" + field +
                     "' must be an array of [verb, noun] pairs");
  }
  ActionSequence seq;
  seq.reserve(arr.size());
  for (const auto& item : arr) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_string() || !item[1].is_string()) {
      throw InputError("line " + std::to_string(line_no) + ": field '" + field +
                       "' must contain [verb, noun] string pairs");
    }
    seq.push_back(resolve_pair(item[0].get<std::string>(), item[1].get<std::string>(), vocab,
                               line_no));
  }
  return seq;
}

}  // namespace detail

// Reads the two-column vocabulary CSV (header "kind,label", kind in
// {verb, noun}). Labels keep file order; duplicates are rejected.
inline Vocabulary parse_vocabulary_csv(std::istream& in) {
  std::vector<std::string> verbs, nouns;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw InputError("vocabulary line " + std::to_string(line_no) + ": expected 'kind,label'");
    }
    const std::string kind = detail::trim(line.substr(0, comma));
    const std::string label = detail::trim(line.substr(comma + 1));
    if (!saw_header) {
      if (kind != "kind" || label != "label") {
        throw InputError("vocabulary: missing 'kind,label' header");
      }
      saw_header = true;
      continue;
    }
    if (kind == "verb") {
      verbs.push_back(label);
    } else if (kind == "noun") {
      nouns.push_back(label);
    } else {
      throw InputError("vocabulary line " + std::to_string(line_no) + ": unknown kind '" +
                       kind + "'");
    }
  }
  if (!saw_header) throw InputError("vocabulary: empty file");
  return Vocabulary(std::move(verbs), std::move(nouns));
}

inline Vocabulary load_vocabulary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open vocabulary file '" + path + "'");
  return parse_vocabulary_csv(in);
}

inline std::string vocabulary_to_csv(const Vocabulary& vocab) {
  std::string out = "kind,label\n";
  for (const auto& v : vocab.verbs()) out += "verb," + v + "\n";
  for (const auto& n : vocab.nouns()) out += "noun," + n + "\n";
  return out;
}

// Optional length checks applied while parsing annotations.
struct AnnotationStrictness {
  std::optional<std::size_t> observed_length;  // K
  std::optional<std::size_t> future_length;    // Z
};

// Parses annotation JSONL: one record per line with fields clip_id,
// observed, future and optional intention_gt. Labels are resolved against
// the vocabulary; any failure reports the 1-based line number.
inline std::vector<AnnotationRecord> parse_annotations_stream(
    std::istream& in, const Vocabulary& vocab, const AnnotationStrictness& strict = {}) {
  std::vector<AnnotationRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InputError("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    if (!obj.is_object() || !obj.contains("clip_id") || !obj.contains("observed") ||
        !obj.contains("future")) {
      throw InputError("line " + std::to_string(line_no) +
                       ": record needs clip_id, observed and future fields");
    }
    AnnotationRecord rec;
    if (!obj["clip_id"].is_string()) {
      throw InputError("line " + std::to_string(line_no) + ": clip_id must be a string");
    }
    rec.clip_id = obj["clip_id"].get<std::string>();
    rec.observed = detail::parse_pair_array(obj["observed"], vocab, line_no, "observed");
    rec.future = detail::parse_pair_array(obj["future"], vocab, line_no, "future");
    if (obj.contains("intention_gt")) {
      if (!obj["intention_gt"].is_string()) {
        throw InputError("line " + std::to_string(line_no) + ": intention_gt must be a string");
      }
      rec.intention_gt = obj["intention_gt"].get<std::string>();
    }
    if (strict.observed_length && rec.observed.size() != *strict.observed_length) {
      throw InputError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(*strict.observed_length) + " observed segments, got " +
                       std::to_string(rec.observed.size()));
    }
    if (strict.future_length && rec.future.size() != *strict.future_length) {
      throw InputError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(*strict.future_length) + " future actions, got " +
                       std::to_string(rec.future.size()));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

inline std::vector<AnnotationRecord> parse_annotations(const std::string& path,
                                                       const Vocabulary& vocab,
                                                       const AnnotationStrictness& strict = {}) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open annotations file '" + path + "'");
  return parse_annotations_stream(in, vocab, strict);
}

inline nlohmann::json pair_array_json(const ActionSequence& seq, const Vocabulary& vocab) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& pair : seq) {
    if (pair.is_pad()) {
      arr.push_back({kPadLabel, kPadLabel});
    } else {
      arr.push_back({vocab.verb_label(pair.verb), vocab.noun_label(pair.noun)});
    }
  }
  return arr;
}

inline std::string serialize_annotations(const std::vector<AnnotationRecord>& records,
                                         const Vocabulary& vocab) {
  std::string out;
  for (const auto& rec : records) {
    nlohmann::json obj;
    obj["clip_id"] = rec.clip_id;
    obj["observed"] = pair_array_json(rec.observed, vocab);
    obj["future"] = pair_array_json(rec.future, vocab);
    if (rec.intention_gt) obj["intention_gt"] = *rec.intention_gt;
    out += obj.dump();
    out += "\n";
  }
  return out;
}

}  // namespace lta
