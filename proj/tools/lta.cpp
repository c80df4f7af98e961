// Command-line surface for batch experimentation: synthetic task generation,
// co-occurrence building, semantic correction, reward scoring, GRPO training
// and protocol evaluation. Exit codes: 0 success, 2 input/validation error,
// 3 internal invariant violation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lta/lta.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw lta::InputError("cannot write '" + path.string() + "'");
  out << content;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw lta::InputError("cannot open '" + path + "'");
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw lta::InputError("'" + path + "': " + e.what());
  }
}

// Reads a JSONL file, reporting the 1-based line number on parse failure.
std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw lta::InputError("cannot open '" + path + "'");
  std::vector<json> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    bool blank = true;
    for (char c : line) {
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    }
    if (blank) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw lta::InputError(path + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

// --- synth ------------------------------------------------------------

struct SynthArgs {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

int cmd_synth(const SynthArgs& args) {
  lta::SyntheticTaskConfig cfg;
  if (!args.config.empty()) cfg = read_json_file(args.config).get<lta::SyntheticTaskConfig>();
  if (args.seed) cfg.seed = *args.seed;
  const auto task = lta::generate_synthetic_task(cfg);

  const fs::path dir(args.out_dir);
  write_file(dir / "vocabulary.csv", lta::vocabulary_to_csv(task.vocab));
  write_file(dir / "annotations.jsonl", lta::serialize_annotations(task.records, task.vocab));
  write_file(dir / "transitions.json", lta::transitions_to_json(task).dump(2) + "\n");
  std::cout << "wrote " << task.records.size() << " records to " << dir.string() << "\n";
  return 0;
}

// --- cooc-build --------------------------------------------------------

struct CoocArgs {
  std::string vocab;
  std::string annotations;
  std::string out;
  bool include_future = false;
};

int cmd_cooc_build(const CoocArgs& args) {
  const auto vocab = lta::load_vocabulary(args.vocab);
  const auto records = lta::parse_annotations(args.annotations, vocab);
  const auto counts = lta::build_cooccurrence(records, vocab, args.include_future);
  write_file(args.out, lta::cooccurrence_to_csv(counts, vocab));
  std::cout << "wrote " << counts.rows() << "x" << counts.cols() << " matrix to " << args.out
            << "\n";
  return 0;
}

// --- correct ------------------------------------------------------------

struct CorrectArgs {
  std::string marginals;
  std::string cooc;
  std::string out;
};

int cmd_correct(const CorrectArgs& args) {
  const auto labeled = lta::load_cooccurrence_csv(args.cooc);
  const auto tables = lta::normalize_conditionals(labeled.counts);

  std::string out;
  std::size_t row_no = 0;
  for (const auto& row : read_jsonl(args.marginals)) {
    ++row_no;
    if (!row.contains("p_verb") || !row.contains("p_noun")) {
      throw lta::InputError("marginals row " + std::to_string(row_no) +
                            ": need p_verb and p_noun arrays");
    }
    lta::MarginalDistributions marginals{row["p_verb"].get<std::vector<double>>(),
                                         row["p_noun"].get<std::vector<double>>()};
    marginals.validate();
    const auto scores = lta::corrected_joint(marginals.p_verb, marginals.p_noun, tables);
    const auto pair = lta::map_decode(scores);
    json rec;
    if (row.contains("id")) rec["id"] = row["id"];
    rec["verb"] = labeled.verbs.at(static_cast<std::size_t>(pair.verb));
    rec["noun"] = labeled.nouns.at(static_cast<std::size_t>(pair.noun));
    out += rec.dump();
    out += "\n";
  }
  write_file(args.out, out);
  std::cout << "corrected " << row_no << " rows\n";
  return 0;
}

// --- reward ---------------------------------------------------------------

struct RewardArgs {
  std::string vocab;
  std::string generations;
  std::string truth;
  std::string config;
  std::string out;
};

int cmd_reward(const RewardArgs& args) {
  const auto vocab = lta::load_vocabulary(args.vocab);
  lta::RewardConfig cfg;
  if (!args.config.empty()) cfg = lta::load_reward_config(args.config);

  std::map<std::string, const lta::AnnotationRecord*> truth_by_id;
  const auto truth_records = lta::parse_annotations(args.truth, vocab);
  for (const auto& rec : truth_records) truth_by_id[rec.clip_id] = &rec;

  std::string out;
  lta::RewardBreakdown totals;
  std::size_t count = 0;
  for (const auto& row : read_jsonl(args.generations)) {
    if (!row.contains("id") || !row.contains("raw")) {
      throw lta::InputError("generation rows need 'id' and 'raw' fields");
    }
    const std::string id = row["id"].get<std::string>();
    const auto it = truth_by_id.find(id);
    if (it == truth_by_id.end()) {
      throw lta::InputError("no truth record for generation id '" + id + "'");
    }
    const auto scored = lta::score_generation(row["raw"].get<std::string>(),
                                              it->second->future,
                                              it->second->intention_gt.value_or(""), vocab, cfg,
                                              lta::reference_embedder());
    json rec = scored.breakdown;
    rec["id"] = id;
    rec["unparsed_answer_items"] = scored.parsed.unparsed_answer_items;
    out += rec.dump();
    out += "\n";

    const auto& b = scored.breakdown;
    totals.s_len += b.s_len;
    totals.s_fmt += b.s_fmt;
    totals.s_lang += b.s_lang;
    totals.s_acc += b.s_acc;
    totals.s_int += b.s_int;
    totals.r_soft += b.r_soft;
    totals.r_task += b.r_task;
    totals.r_total += b.r_total;
    ++count;
  }
  write_file(args.out, out);

  if (count > 0) {
    const double n = static_cast<double>(count);
    std::printf("samples  %zu\n", count);
    std::printf("%-8s %-8s %-8s %-8s %-8s %-8s %-8s %-8s\n", "s_len", "s_fmt", "s_lang", "s_acc",
                "s_int", "r_soft", "r_task", "r_total");
    std::printf("%-8.4f %-8.4f %-8.4f %-8.4f %-8.4f %-8.4f %-8.4f %-8.4f\n", totals.s_len / n,
                totals.s_fmt / n, totals.s_lang / n, totals.s_acc / n, totals.s_int / n,
                totals.r_soft / n, totals.r_task / n, totals.r_total / n);
  } else {
    std::cout << "no generations scored\n";
  }
  return 0;
}

// --- train ------------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> steps;
};

int cmd_train(const TrainArgs& args) {
  const json run = read_json_file(args.config);
  for (const char* field : {"vocab", "annotations"}) {
    if (!run.contains(field)) {
      throw lta::InputError("run config: missing required path '" + std::string(field) + "'");
    }
  }

  lta::TrainTask task{lta::load_vocabulary(run["vocab"].get<std::string>()),
                      {},
                      {},
                      {},
                      {}};
  task.records = lta::parse_annotations(run["annotations"].get<std::string>(), task.vocab);
  if (run.contains("prompt_template")) {
    task.prompt = lta::load_prompt_template(run["prompt_template"].get<std::string>());
  }
  if (run.contains("reward_config")) {
    task.reward_cfg = lta::load_reward_config(run["reward_config"].get<std::string>());
  }

  lta::GrpoConfig cfg;
  if (run.contains("grpo_config")) {
    cfg = lta::load_grpo_config(run["grpo_config"].get<std::string>());
  }
  if (run.contains("seed")) cfg.seed = run["seed"].get<std::uint64_t>();
  if (args.seed) cfg.seed = *args.seed;
  if (args.steps) cfg.steps = *args.steps;
  cfg.validate();

  std::string out_dir = args.out_dir;
  if (out_dir.empty() && run.contains("out_dir")) out_dir = run["out_dir"].get<std::string>();
  if (out_dir.empty()) throw lta::InputError("train: no output directory (--out or out_dir)");

  const int context_order = run.value("context_order", 1);
  lta::ToyPolicy policy(task.vocab.verb_count(), task.vocab.noun_count(), context_order);
  auto result = lta::train(std::move(policy), task, cfg);

  const fs::path dir(out_dir);
  write_file(dir / "training_log.csv", lta::training_log_to_csv(result.log));
  write_file(dir / "policy_final.json", lta::policy_to_json(result.policy).dump(2) + "\n");

  if (!result.log.empty()) {
    std::printf("steps    %zu\n", result.log.size());
    std::printf("reward   first %.4f  last %.4f\n", result.log.front().mean_reward,
                result.log.back().mean_reward);
  }
  return 0;
}

// --- eval --------------------------------------------------------------------

struct EvalArgs {
  std::string mode;
  std::string predictions;
  std::string truth;
  std::string vocab;
  std::string out;
  std::string horizons = "25,50,75";
  std::string freq_split;
};

int cmd_eval_ego4d(const EvalArgs& args) {
  const auto vocab = lta::load_vocabulary(args.vocab);
  const auto truth_records = lta::parse_annotations(args.truth, vocab);
  std::map<std::string, const lta::AnnotationRecord*> truth_by_id;
  for (const auto& rec : truth_records) truth_by_id[rec.clip_id] = &rec;

  auto resolve_sequence = [&vocab](const json& arr, const std::string& clip) {
    lta::ActionSequence seq;
    if (!arr.is_array()) {
      throw lta::InputError("clip '" + clip + "': candidate must be an array of pairs");
    }
    for (const auto& item : arr) {
      if (!item.is_array() || item.size() != 2 || !item[0].is_string() ||
          !item[1].is_string()) {
        throw lta::InputError("clip '" + clip + "': candidates must hold [verb, noun] pairs");
      }
      const auto verb = item[0].get<std::string>();
      const auto noun = item[1].get<std::string>();
      if (verb == lta::kPadLabel && noun == lta::kPadLabel) {
        seq.push_back(lta::ActionPair::pad());
        continue;
      }
      const auto v = vocab.find_verb(verb);
      const auto n = vocab.find_noun(noun);
      if (!v || !n) {
        throw lta::InputError("clip '" + clip + "': unknown label '" + verb + " " + noun + "'");
      }
      seq.push_back({*v, *n});
    }
    return seq;
  };

  lta::EdReport mean;
  json per_clip = json::array();
  std::size_t clips = 0;
  for (const auto& row : read_jsonl(args.predictions)) {
    if (!row.contains("clip_id") || !row.contains("candidates")) {
      throw lta::InputError("prediction rows need 'clip_id' and 'candidates'");
    }
    const std::string clip = row["clip_id"].get<std::string>();
    const auto it = truth_by_id.find(clip);
    if (it == truth_by_id.end()) {
      throw lta::InputError("no truth record for clip '" + clip + "'");
    }
    std::vector<lta::ActionSequence> candidates;
    for (const auto& cand : row["candidates"]) {
      candidates.push_back(resolve_sequence(cand, clip));
    }
    const auto report = lta::ego4d_eval(candidates, it->second->future);
    json entry = report;
    entry["clip_id"] = clip;
    per_clip.push_back(std::move(entry));
    mean.verb_ed += report.verb_ed;
    mean.noun_ed += report.noun_ed;
    mean.action_ed += report.action_ed;
    ++clips;
  }
  if (clips == 0) throw lta::InputError("no prediction rows");
  mean.verb_ed /= static_cast<double>(clips);
  mean.noun_ed /= static_cast<double>(clips);
  mean.action_ed /= static_cast<double>(clips);

  json report;
  report["mode"] = "ego4d";
  report["clips"] = clips;
  report["mean"] = mean;
  report["per_clip"] = std::move(per_clip);
  write_file(args.out, report.dump(2) + "\n");
  std::cout << lta::ed_report_table(mean);
  return 0;
}

int cmd_eval_map(const EvalArgs& args) {
  {
    std::set<int> horizons;
    std::stringstream ss(args.horizons);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        horizons.insert(std::stoi(item));
      } catch (const std::exception&) {
        throw lta::InputError("bad --horizons value '" + item + "'");
      }
    }
    if (horizons != std::set<int>{25, 50, 75}) {
      throw lta::InputError("the protocol evaluates at P in {25,50,75}");
    }
  }

  auto load_grids = [](const std::string& path, const char* field) {
    std::map<std::string, std::array<std::vector<double>, 3>> rows;
    std::vector<std::string> order;
    for (const auto& row : read_jsonl(path)) {
      if (!row.contains("id") || !row.contains(field)) {
        throw lta::InputError(path + ": rows need 'id' and '" + std::string(field) + "'");
      }
      const std::string id = row["id"].get<std::string>();
      std::array<std::vector<double>, 3> values;
      for (std::size_t h = 0; h < lta::kHorizons.size(); ++h) {
        const std::string key = std::to_string(lta::kHorizons[h]);
        if (!row[field].contains(key)) {
          throw lta::InputError(path + ": id '" + id + "' missing horizon " + key);
        }
        values[h] = row[field][key].get<std::vector<double>>();
      }
      if (rows.count(id)) throw lta::InputError(path + ": duplicate id '" + id + "'");
      rows[id] = std::move(values);
      order.push_back(id);
    }
    return std::pair(std::move(rows), std::move(order));
  };

  auto [pred_rows, pred_order] = load_grids(args.predictions, "scores");
  auto [truth_rows, truth_order] = load_grids(args.truth, "labels");
  if (pred_rows.empty()) throw lta::InputError("no prediction rows");

  std::size_t classes = 0;
  for (const auto& [id, values] : pred_rows) {
    if (!truth_rows.count(id)) throw lta::InputError("no truth row for id '" + id + "'");
    if (classes == 0) classes = values[0].size();
  }
  if (truth_rows.size() != pred_rows.size()) {
    throw lta::InputError("prediction and truth files list different example sets");
  }

  std::array<lta::HorizonData, 3> horizons;
  const std::size_t examples = pred_order.size();
  for (std::size_t h = 0; h < 3; ++h) {
    horizons[h].scores = lta::Grid<double>(examples, classes);
    horizons[h].labels = lta::Grid<std::uint8_t>(examples, classes);
  }
  for (std::size_t e = 0; e < examples; ++e) {
    const auto& id = pred_order[e];
    const auto& scores = pred_rows.at(id);
    const auto& labels = truth_rows.at(id);
    for (std::size_t h = 0; h < 3; ++h) {
      if (scores[h].size() != classes || labels[h].size() != classes) {
        throw lta::InputError("id '" + id + "': class-vector length mismatch");
      }
      for (std::size_t c = 0; c < classes; ++c) {
        horizons[h].scores.at(e, c) = scores[h][c];
        horizons[h].labels.at(e, c) = labels[h][c] > 0.0 ? 1 : 0;
      }
    }
  }

  lta::FreqRareSplit split;
  if (!args.freq_split.empty()) {
    const json j = read_json_file(args.freq_split);
    if (!j.contains("freq") || !j.contains("rare")) {
      throw lta::InputError("freq split file needs 'freq' and 'rare' class lists");
    }
    split.freq_classes = j["freq"].get<std::vector<std::size_t>>();
    split.rare_classes = j["rare"].get<std::vector<std::size_t>>();
  } else {
    // No training counts supplied: split on positive-label counts pooled
    // over the truth file's horizons.
    std::vector<std::int64_t> counts(classes, 0);
    for (std::size_t h = 0; h < 3; ++h) {
      for (std::size_t e = 0; e < examples; ++e) {
        for (std::size_t c = 0; c < classes; ++c) {
          counts[c] += horizons[h].labels.at(e, c);
        }
      }
    }
    split = lta::make_freq_rare_split(counts);
  }

  const auto report = lta::map_eval(horizons, split);
  json out = report;
  out["mode"] = "map";
  out["examples"] = examples;
  out["classes"] = classes;
  write_file(args.out, out.dump(2) + "\n");
  std::cout << lta::map_report_table(report);
  return 0;
}

int cmd_eval(const EvalArgs& args) {
  if (args.mode == "ego4d") return cmd_eval_ego4d(args);
  if (args.mode == "map") return cmd_eval_map(args);
  throw lta::InputError("unknown eval mode '" + args.mode + "' (expected ego4d or map)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-term action anticipation toolkit"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic anticipation task");
  synth_cmd->add_option("--config", synth.config, "Synthetic task config JSON");
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();
  std::uint64_t synth_seed = 0;
  auto* synth_seed_opt = synth_cmd->add_option("--seed", synth_seed, "Override config seed");

  CoocArgs cooc;
  auto* cooc_cmd = app.add_subcommand("cooc-build", "Build the verb-noun co-occurrence matrix");
  cooc_cmd->add_option("--vocab", cooc.vocab, "Vocabulary CSV")->required();
  cooc_cmd->add_option("--annotations", cooc.annotations, "Annotations JSONL")->required();
  cooc_cmd->add_option("--out", cooc.out, "Output CSV")->required();
  cooc_cmd->add_flag("--include-future", cooc.include_future,
                     "Also count future labels (off by default)");

  CorrectArgs correct;
  auto* correct_cmd =
      app.add_subcommand("correct", "Apply semantic correction to marginal predictions");
  correct_cmd->add_option("--marginals", correct.marginals, "Marginals JSONL")->required();
  correct_cmd->add_option("--cooc", correct.cooc, "Co-occurrence CSV")->required();
  correct_cmd->add_option("--out", correct.out, "Corrected predictions JSONL")->required();

  RewardArgs reward;
  auto* reward_cmd = app.add_subcommand("reward", "Score generations against truth records");
  reward_cmd->add_option("--vocab", reward.vocab, "Vocabulary CSV")->required();
  reward_cmd->add_option("--generations", reward.generations, "Generations JSONL")->required();
  reward_cmd->add_option("--truth", reward.truth, "Truth annotations JSONL")->required();
  reward_cmd->add_option("--config", reward.config, "Reward config JSON");
  reward_cmd->add_option("--out", reward.out, "Per-sample breakdown JSONL")->required();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Run GRPO training on the toy policy");
  train_cmd->add_option("--config", train.config, "Run config JSON")->required();
  train_cmd->add_option("--out", train.out_dir, "Output directory (overrides config)");
  std::uint64_t train_seed = 0;
  auto* train_seed_opt = train_cmd->add_option("--seed", train_seed, "Override seed");
  int train_steps = 0;
  auto* train_steps_opt = train_cmd->add_option("--steps", train_steps, "Override step count");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate predictions under a protocol");
  eval_cmd->add_option("--mode", eval.mode, "ego4d or map")->required();
  eval_cmd->add_option("--predictions", eval.predictions, "Predictions JSONL")->required();
  eval_cmd->add_option("--truth", eval.truth, "Truth JSONL")->required();
  eval_cmd->add_option("--vocab", eval.vocab, "Vocabulary CSV (ego4d mode)");
  eval_cmd->add_option("--out", eval.out, "Report JSON")->required();
  eval_cmd->add_option("--horizons", eval.horizons, "Observation horizons (map mode)");
  eval_cmd->add_option("--freq-split", eval.freq_split, "Explicit freq/rare class lists JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth_cmd->parsed()) {
      if (synth_seed_opt->count() > 0) synth.seed = synth_seed;
      return cmd_synth(synth);
    }
    if (cooc_cmd->parsed()) return cmd_cooc_build(cooc);
    if (correct_cmd->parsed()) return cmd_correct(correct);
    if (reward_cmd->parsed()) return cmd_reward(reward);
    if (train_cmd->parsed()) {
      if (train_seed_opt->count() > 0) train.seed = train_seed;
      if (train_steps_opt->count() > 0) train.steps = train_steps;
      return cmd_train(train);
    }
    if (eval_cmd->parsed()) {
      if (eval.mode == "ego4d" && eval.vocab.empty()) {
        throw lta::InputError("ego4d mode requires --vocab");
      }
      return cmd_eval(eval);
    }
  } catch (const lta::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
