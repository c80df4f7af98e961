#pragma once

#include <array>
#include <cctype>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "lta/errors.hpp"
#include "lta/vocab.hpp"

namespace lta {

// A parsed think -> intention -> answer trace. tags_valid is true only for
// the strict grammar: the three sections exactly once, in order, properly
// closed, with nothing but whitespace outside them.
struct StructuredOutput {
  std::string think_text;
  std::string intention_text;
  std::string answer_text;
  bool tags_valid = false;
  std::size_t token_count = 0;
  ActionSequence parsed_pairs;
  std::size_t unparsed_answer_items = 0;
};

// Number of maximal whitespace-separated runs.
inline std::size_t count_tokens(std::string_view raw) {
  std::size_t count = 0;
  bool in_token = false;
  for (unsigned char c : raw) {
    if (std::isspace(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

// True iff the text is pure ASCII and every token either contains a letter
// or is made of digits/punctuation only (tag markup falls under
// punctuation). The empty string passes vacuously.
inline bool check_language(std::string_view raw) {
  for (unsigned char c : raw) {
    if (c > 0x7F) return false;
  }
  std::size_t i = 0;
  while (i < raw.size()) {
    while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
    if (i == raw.size()) break;
    bool has_letter = false;
    bool only_symbols = true;
    while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) {
      const unsigned char c = static_cast<unsigned char>(raw[i]);
      if (std::isalpha(c)) has_letter = true;
      if (!std::isdigit(c) && !std::ispunct(c)) only_symbols = false;
      ++i;
    }
    if (!has_letter && !only_symbols) return false;
  }
  return true;
}

namespace detail {

struct TagSet {
  std::string_view open;
  std::string_view close;
};

inline constexpr std::array<TagSet, 3> kTags = {{{"<think>", "</think>"},
                                                 {"<intention>", "</intention>"},
                                                 {"<answer>", "</answer>"}}};

inline std::vector<std::size_t> find_all(std::string_view haystack, std::string_view needle) {
  std::vector<std::size_t> hits;
  std::size_t pos = haystack.find(needle);
  while (pos != std::string_view::npos) {
    hits.push_back(pos);
    pos = haystack.find(needle, pos + 1);
  }
  return hits;
}

inline bool whitespace_only(std::string_view s) {
  for (unsigned char c : s) {
    if (!std::isspace(c)) return false;
  }
  return true;
}

}  // namespace detail

// Accepts any string; malformed input yields tags_valid=false with
// best-effort section extraction. parsed_pairs stays empty here; see
// parse_and_extract.
inline StructuredOutput parse_structured(std::string_view raw) {
  StructuredOutput out;
  out.token_count = count_tokens(raw);

  std::array<std::vector<std::size_t>, 3> opens, closes;
  for (std::size_t t = 0; t < 3; ++t) {
    opens[t] = detail::find_all(raw, detail::kTags[t].open);
    closes[t] = detail::find_all(raw, detail::kTags[t].close);
  }

  // Best-effort extraction: first open tag, first close tag after it.
  std::string* sections[3] = {&out.think_text, &out.intention_text, &out.answer_text};
  for (std::size_t t = 0; t < 3; ++t) {
    if (opens[t].empty()) continue;
    const std::size_t begin = opens[t].front() + detail::kTags[t].open.size();
    const std::size_t end = raw.find(detail::kTags[t].close, begin);
    if (end == std::string_view::npos) continue;
    *sections[t] = detail::trim(raw.substr(begin, end - begin));
  }

  bool valid = true;
  for (std::size_t t = 0; t < 3; ++t) {
    if (opens[t].size() != 1 || closes[t].size() != 1) valid = false;
  }
  if (valid) {
    std::size_t cursor = 0;
    for (std::size_t t = 0; t < 3; ++t) {
      const std::size_t open = opens[t].front();
      const std::size_t close = closes[t].front();
      if (open < cursor || close < open + detail::kTags[t].open.size()) {
        valid = false;
        break;
      }
      if (!detail::whitespace_only(raw.substr(cursor, open - cursor))) {
        valid = false;
        break;
      }
      cursor = close + detail::kTags[t].close.size();
    }
    if (valid && !detail::whitespace_only(raw.substr(cursor))) valid = false;
  }
  out.tags_valid = valid;
  return out;
}

// Canonical tag layout; parse_structured(render_structured(...)) is the
// identity on trimmed sections.
inline std::string render_structured(std::string_view think, std::string_view intention,
                                     std::string_view answer) {
  std::string out;
  out.reserve(think.size() + intention.size() + answer.size() + 64);
  out += "<think>";
  out += think;
  out += "</think>\n<intention>";
  out += intention;
  out += "</intention>\n<answer>";
  out += answer;
  out += "</answer>";
  return out;
}

// Splits answer text into items on newlines and commas; each item must read
// "verb noun" with both tokens resolving case-insensitively. Items that do
// not resolve are dropped and counted.
inline std::pair<ActionSequence, std::size_t> extract_action_pairs(std::string_view answer_text,
                                                                   const Vocabulary& vocab) {
  ActionSequence pairs;
  std::size_t unparsed = 0;

  std::size_t start = 0;
  auto consume_item = [&](std::string_view item) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < item.size()) {
      while (i < item.size() && std::isspace(static_cast<unsigned char>(item[i]))) ++i;
      std::size_t b = i;
      while (i < item.size() && !std::isspace(static_cast<unsigned char>(item[i]))) ++i;
      if (i > b) tokens.emplace_back(item.substr(b, i - b));
    }
    if (tokens.empty()) return;  // blank segment, not an item
    if (tokens.size() == 2) {
      const auto v = vocab.find_verb_ci(tokens[0]);
      const auto n = vocab.find_noun_ci(tokens[1]);
      if (v && n) {
        pairs.push_back({*v, *n});
        return;
      }
    }
    ++unparsed;
  };

  for (std::size_t i = 0; i <= answer_text.size(); ++i) {
    if (i == answer_text.size() || answer_text[i] == ',' || answer_text[i] == '\n') {
      consume_item(answer_text.substr(start, i - start));
      start = i + 1;
    }
  }
  return {std::move(pairs), unparsed};
}

inline StructuredOutput parse_and_extract(std::string_view raw, const Vocabulary& vocab) {
  StructuredOutput out = parse_structured(raw);
  auto [pairs, unparsed] = extract_action_pairs(out.answer_text, vocab);
  out.parsed_pairs = std::move(pairs);
  out.unparsed_answer_items = unparsed;
  return out;
}

// Prompt skeleton with {observed_actions} and {Z} placeholders, each
// required exactly once.
struct PromptTemplate {
  std::string text =
      "You watch an egocentric video. The recent actions were: {observed_actions}. "
      "First think about the scene inside <think></think>, state the likely goal inside "
      "<intention></intention>, then list the next {Z} actions as comma-separated "
      "\"verb noun\" pairs inside <answer></answer>.";

  void validate() const {
    for (std::string_view placeholder : {"{observed_actions}", "{Z}"}) {
      const auto hits = detail::find_all(text, placeholder);
      if (hits.size() != 1) {
        throw InputError("prompt template must contain " + std::string(placeholder) +
                         " exactly once (found " + std::to_string(hits.size()) + ")");
      }
    }
  }
};

inline PromptTemplate load_prompt_template(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open prompt template '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  PromptTemplate tpl{std::move(text)};
  tpl.validate();
  return tpl;
}

inline std::string render_prompt(const ActionSequence& observed, int future_length,
                                 const Vocabulary& vocab, const PromptTemplate& tpl) {
  tpl.validate();
  std::string actions;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (i > 0) actions += ", ";
    actions += vocab.pair_label(observed[i]);
  }
  std::string out = tpl.text;
  const auto replace_once = [&out](std::string_view placeholder, const std::string& value) {
    const std::size_t pos = out.find(placeholder);
    out.replace(pos, placeholder.size(), value);
  };
  replace_once("{observed_actions}", actions);
  replace_once("{Z}", std::to_string(future_length));
  return out;
}

}  // namespace lta
