// Acceptance suite. Runs every criterion at its stated tolerance and prints
// one pass/fail line each; exits non-zero if any fail. argv[1] must be the
// path to the lta CLI binary (used by the determinism criterion).

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lta/lta.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace lta;

namespace {

std::string g_cli;
int g_failures = 0;

struct Check {
  std::vector<std::string> problems;

  void expect(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
  void expect_near(double actual, double expected, double tol, const std::string& what) {
    if (!(std::abs(actual - expected) <= tol)) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s: got %.17g, want %.17g (tol %g)", what.c_str(),
                    actual, expected, tol);
      problems.push_back(buf);
    }
  }
};

void run_criterion(int number, const std::string& title, double time_limit_s,
                   const std::function<void(Check&)>& body) {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(check);
  } catch (const std::exception& e) {
    check.problems.push_back(std::string("exception: ") + e.what());
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (elapsed > time_limit_s) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "runtime %.2fs exceeds %.0fs limit", elapsed, time_limit_s);
    check.problems.push_back(buf);
  }
  if (check.problems.empty()) {
    std::printf("[PASS] criterion %d (%.2fs): %s\n", number, elapsed, title.c_str());
  } else {
    ++g_failures;
    std::printf("[FAIL] criterion %d (%.2fs): %s\n", number, elapsed, title.c_str());
    for (const auto& p : check.problems) std::printf("       - %s\n", p.c_str());
  }
  std::fflush(stdout);
}

int run_cli(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- criterion 1: reward formula exactness ---------------------------------

void criterion_reward_exactness(Check& c) {
  const double tol = 1e-9;
  const Vocabulary vocab({"take", "put"}, {"cup", "pan"});

  auto pairs = [](std::size_t n) {
    ActionSequence s;
    for (std::size_t i = 0; i < n; ++i) s.push_back({static_cast<int>(i % 2), 0});
    return s;
  };
  c.expect_near(length_reward(pairs(20), 20), 1.0, tol, "length_reward 20/20");
  c.expect_near(length_reward(pairs(19), 20), 0.0, tol, "length_reward 19/20");
  c.expect_near(length_reward(pairs(25), 20), 1.0, tol, "length_reward 25/20");

  StructuredOutput valid;
  valid.tags_valid = true;
  c.expect_near(format_reward(valid), 1.0, tol, "format_reward valid");
  c.expect_near(format_reward(StructuredOutput{}), 0.0, tol, "format_reward invalid");
  c.expect_near(format_reward(parse_structured("")), 0.0, tol, "format_reward empty");

  c.expect_near(language_reward("take the cup"), 1.0, tol, "language ascii");
  c.expect_near(language_reward("caf\xC3\xA9"), 0.0, tol, "language non-ascii");
  c.expect_near(language_reward(""), 1.0, tol, "language empty");

  const OverlongParams overlong;  // 450 / 256
  c.expect_near(soft_overlong(100, overlong), 0.0, tol, "soft_overlong 100");
  c.expect_near(soft_overlong(322, overlong), -0.5, tol, "soft_overlong 322");
  c.expect_near(soft_overlong(451, overlong), -1.0, tol, "soft_overlong 451");

  const auto truth4 = pairs(4);
  c.expect_near(accuracy_reward_ed(truth4, truth4, 4), 1.0, tol, "accuracy equal");
  c.expect_near(accuracy_reward_ed({}, pairs(20), 20), 0.0, tol, "accuracy empty pred");
  auto off_by_one = truth4;
  off_by_one[1] = {1, 1};
  c.expect_near(accuracy_reward_ed(off_by_one, truth4, 4), 0.75, tol, "accuracy one sub");

  const std::vector<double> scores{0.9, 0.8, 0.7};
  const std::vector<int> labels{1, 0, 1};
  c.expect_near(accuracy_reward_map(scores, labels).value, (1.0 + 2.0 / 3.0) / 2.0, tol,
                "accuracy_map hand value");
  c.expect_near(accuracy_reward_map(std::vector<double>{0.9, 0.1},
                                    std::vector<int>{1, 0}).value,
                1.0, tol, "accuracy_map perfect");
  const auto skipped =
      accuracy_reward_map(std::vector<double>{0.9}, std::vector<int>{0});
  c.expect(skipped.skipped_no_positives && skipped.value == 0.0, "accuracy_map no positives");

  const IntentionParams intent;  // beta 0.8, gamma 40
  c.expect_near(intention_reward("prepare the cup", "prepare the cup", reference_embedder(),
                                 intent),
                1.0, tol, "intention identical strings");
  c.expect_near(intention_reward_from_similarity(0.8, intent), 0.5001677313139512, tol,
                "intention sim = beta");
  const double ortho = intention_reward("alpha", "beta", reference_embedder(), intent);
  c.expect(ortho < 1e-13, "intention orthogonal < 1e-13");

  const RewardWeights w;
  const auto full = total_reward(1, 1, 1, 1, 1, 0, w);
  c.expect_near(full.r_task, 1.0, tol, "total r_task all ones");
  c.expect_near(full.r_total, 0.9, tol, "total r_total all ones");
  const auto gated = total_reward(0, 1, 1, 1, 1, -1, w);
  c.expect_near(gated.r_total, -0.1, tol, "total gated");
  const auto zeros = total_reward(0, 0, 0, 0, 0, 0, w);
  c.expect_near(zeros.r_total, 0.0, tol, "total zeros");

  const auto& emb = reference_embedder();
  c.expect(cosine_similarity(emb.embed("take cup"), emb.embed("take cup")) > 1.0 - 1e-12,
           "embedder determinism");
  c.expect(cosine_similarity(emb.embed("alpha"), emb.embed("beta")) == 0.0,
           "embedder disjoint buckets");
  c.expect(cosine_similarity(emb.embed(""), emb.embed("x")) == 0.0, "embedder empty text");
}

// --- criterion 2: aggregation bound -----------------------------------------

void criterion_aggregation_bound(Check& c) {
  const RewardWeights w;
  Rng rng(2202);
  for (int trial = 0; trial < 10000; ++trial) {
    const double s_len = rng.uniform() < 0.5 ? 0.0 : 1.0;
    const double s_fmt = rng.uniform();
    const double s_lang = rng.uniform();
    const double s_acc = rng.uniform();
    const double s_int = rng.uniform();
    const double r_soft = -rng.uniform();
    const auto b = total_reward(s_len, s_fmt, s_lang, s_acc, s_int, r_soft, w);
    if (!(b.r_total >= -0.1 - 1e-12 && b.r_total <= 0.9 + 1e-12)) {
      c.expect(false, "r_total left [-0.1, 0.9] at trial " + std::to_string(trial));
      return;
    }
    if (s_len == 0.0) {
      const auto other = total_reward(0.0, rng.uniform(), rng.uniform(), rng.uniform(),
                                      rng.uniform(), r_soft, w);
      if (other.r_total != b.r_total) {
        c.expect(false, "gating violated at trial " + std::to_string(trial));
        return;
      }
    }
  }
}

// --- criterion 3: GRPO numerics ----------------------------------------------

void criterion_grpo_numerics(Check& c) {
  const auto adv = compute_advantages(std::vector<double>{1, 0, 0, 0, 0}, 1e-8);
  c.expect_near(adv[0], 1.78885, 1e-5, "advantage[0]");
  for (int i = 1; i < 5; ++i) c.expect_near(adv[i], -0.44721, 1e-5, "advantage[i]");

  Rng rng(3303);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t g = 1 + rng.uniform_index(6);
    std::vector<double> ref(g), cur(g);
    for (std::size_t i = 0; i < g; ++i) {
      ref[i] = rng.uniform(-25.0, 0.0);
      cur[i] = rng.uniform(-25.0, 0.0);
    }
    if (kl_estimate(ref, cur) < 0.0) {
      c.expect(false, "kl_estimate negative at trial " + std::to_string(trial));
      return;
    }
  }

  // Finite-difference agreement on 20 random toy-policy configurations.
  GrpoConfig cfg;
  const Vocabulary vocab({"a", "b"}, {"c", "d"});
  int tested = 0;
  for (std::uint64_t seed = 0; tested < 20 && seed < 80; ++seed) {
    Rng setup(seed, "acc.fd");
    ToyPolicy sampler(2, 2, 1);
    for (auto& l : sampler.logits().data()) l = setup.uniform(-1.0, 1.0);
    const PromptInfo prompt{{static_cast<int>(setup.uniform_index(2)),
                             static_cast<int>(setup.uniform_index(2))}};
    const double temperature = 0.9;

    std::vector<std::vector<std::size_t>> emissions;
    std::vector<double> logp_old, logp_ref, rewards;
    Rng sample_rng(seed, "acc.fd.sample");
    for (int i = 0; i < 5; ++i) {
      auto out = sample_output(sampler, prompt, 4, temperature, sample_rng, vocab);
      logp_old.push_back(sequence_logprob(sampler, prompt, out.emissions, temperature));
      emissions.push_back(std::move(out.emissions));
      rewards.push_back(setup.uniform());
    }
    ToyPolicy theta = sampler, reference = sampler;
    for (auto& l : theta.logits().data()) l += setup.uniform(-0.05, 0.05);
    for (auto& l : reference.logits().data()) l += setup.uniform(-0.05, 0.05);

    RolloutGroup group;
    group.context = "x";
    std::vector<Grid<double>> gradients;
    bool near_kink = false;
    for (std::size_t i = 0; i < emissions.size(); ++i) {
      const double lp = sequence_logprob(theta, prompt, emissions[i], temperature);
      const double ratio = likelihood_ratio(lp, logp_old[i]);
      if (std::abs(ratio - (1.0 - cfg.clip_epsilon)) < 0.02 ||
          std::abs(ratio - (1.0 + cfg.clip_epsilon)) < 0.02) {
        near_kink = true;
      }
      group.outputs_raw.push_back("");
      group.outputs_parsed.push_back({});
      group.rewards.push_back(rewards[i]);
      group.logp_new.push_back(lp);
      group.logp_old.push_back(logp_old[i]);
      group.logp_ref.push_back(sequence_logprob(reference, prompt, emissions[i], temperature));
      gradients.push_back(logprob_gradient(theta, prompt, emissions[i], temperature));
    }
    if (near_kink) continue;
    ++tested;
    group.advantages = compute_advantages(group.rewards, cfg.std_floor);

    const auto step = grpo_objective(group, cfg, gradients);
    auto objective_at = [&](const ToyPolicy& p) {
      std::vector<double> logp_new, ratios;
      for (std::size_t i = 0; i < emissions.size(); ++i) {
        logp_new.push_back(sequence_logprob(p, prompt, emissions[i], temperature));
        ratios.push_back(likelihood_ratio(logp_new.back(), logp_old[i]));
      }
      return clipped_surrogate(ratios, group.advantages, cfg.clip_epsilon) -
             cfg.kl_coeff * kl_estimate(group.logp_ref, logp_new);
    };

    const double h = 1e-6;
    double max_diff = 0.0, max_grad = 0.0;
    for (std::size_t r = 0; r < step.gradient.rows(); ++r) {
      for (std::size_t col = 0; col < step.gradient.cols(); ++col) {
        bool touched = false;
        for (const auto& grad : gradients) {
          if (grad.at(r, col) != 0.0) touched = true;
        }
        if (!touched) continue;
        ToyPolicy plus = theta, minus = theta;
        plus.logits().at(r, col) += h;
        minus.logits().at(r, col) -= h;
        const double fd = (objective_at(plus) - objective_at(minus)) / (2.0 * h);
        max_diff = std::max(max_diff, std::abs(fd - step.gradient.at(r, col)));
        max_grad = std::max(max_grad, std::abs(step.gradient.at(r, col)));
      }
    }
    if (!(max_grad > 0.0) || !(max_diff / max_grad < 1e-4)) {
      c.expect(false, "finite-difference mismatch at seed " + std::to_string(seed));
      return;
    }
  }
  c.expect(tested == 20, "collected 20 clip-boundary-free configurations");
}

// --- criterion 4: end-to-end training ----------------------------------------

void criterion_training(Check& c) {
  SyntheticTaskConfig synth;
  synth.verb_count = 5;
  synth.noun_count = 5;
  synth.observed_length = 8;
  synth.future_length = 5;
  synth.transition_concentration = 0.05;
  synth.seed = 7;
  synth.record_count = 8;
  auto data = generate_synthetic_task(synth);

  TrainTask task{std::move(data.vocab), std::move(data.records), PromptTemplate{},
                 RewardConfig{}, PolicyTextTemplate{}};
  GrpoConfig cfg;
  cfg.group_size = 5;
  cfg.kl_coeff = 0.08;
  cfg.temperature = 0.9;
  cfg.steps = 500;
  cfg.learning_rate = 1.0;
  cfg.batch_size = 4;
  cfg.seed = 7;

  const auto result =
      train(ToyPolicy(task.vocab.verb_count(), task.vocab.noun_count(), 1), task, cfg);
  if (result.log.size() != 500) {
    c.expect(false, "expected 500 log rows");
    return;
  }
  auto window_mean = [&](std::size_t begin, std::size_t end, auto field) {
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += field(result.log[i]);
    return sum / static_cast<double>(end - begin);
  };
  const double first = window_mean(0, 50, [](const TrainStepLog& l) { return l.mean_reward; });
  const double last =
      window_mean(450, 500, [](const TrainStepLog& l) { return l.mean_reward; });
  char buf[128];
  std::snprintf(buf, sizeof(buf), "mean reward first50 %.4f last50 %.4f (need >= 1.5x)", first,
                last);
  c.expect(last >= 1.5 * first && first > 0.0, buf);

  // 50-step moving average of the intention reward must be non-decreasing in
  // at least 90% of consecutive windows.
  std::vector<double> ma;
  for (std::size_t i = 0; i + 50 <= result.log.size(); ++i) {
    ma.push_back(window_mean(i, i + 50,
                             [](const TrainStepLog& l) { return l.mean_intention_reward; }));
  }
  std::size_t non_decreasing = 0;
  for (std::size_t i = 0; i + 1 < ma.size(); ++i) {
    if (ma[i + 1] >= ma[i] - 1e-12) ++non_decreasing;
  }
  const double frac =
      static_cast<double>(non_decreasing) / static_cast<double>(ma.size() - 1);
  std::snprintf(buf, sizeof(buf), "intention moving average non-decreasing fraction %.3f",
                frac);
  c.expect(frac >= 0.9, buf);
}

// --- criterion 5: edit-distance oracle equivalence ----------------------------

void criterion_edit_distance(Check& c) {
  std::vector<std::vector<int>> all;
  for (std::size_t len = 0; len <= 4; ++len) {
    std::vector<int> s(len, 0);
    while (true) {
      all.push_back(s);
      std::size_t i = 0;
      while (i < len && s[i] == 2) s[i++] = 0;
      if (i == len) break;
      ++s[i];
    }
  }
  for (const auto& a : all) {
    for (const auto& b : all) {
      if (edit_distance(a, b) != oracles::bfs_edit_distance(a, b, 3)) {
        c.expect(false, "exhaustive mismatch (lengths " + std::to_string(a.size()) + "," +
                            std::to_string(b.size()) + ")");
        return;
      }
    }
  }
  Rng rng(5505);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> a(rng.uniform_index(7)), b(rng.uniform_index(7));
    for (auto& x : a) x = static_cast<int>(rng.uniform_index(3));
    for (auto& x : b) x = static_cast<int>(rng.uniform_index(3));
    if (edit_distance(a, b) != oracles::bfs_edit_distance(a, b, 3)) {
      c.expect(false, "random mismatch at trial " + std::to_string(trial));
      return;
    }
  }
}

// --- criterion 6: sequence-forecast protocol ----------------------------------

void criterion_ego4d_protocol(Check& c) {
  Rng rng(6606);
  const auto random_seq = [&rng](std::size_t z) {
    ActionSequence s;
    for (std::size_t i = 0; i < z; ++i) {
      s.push_back({static_cast<int>(rng.uniform_index(4)),
                   static_cast<int>(rng.uniform_index(4))});
    }
    return s;
  };

  const auto truth = random_seq(20);
  std::vector<ActionSequence> candidates(5, random_seq(20));
  candidates[2] = truth;
  const auto exact = ego4d_eval(candidates, truth);
  c.expect(exact.verb_ed == 0.0 && exact.noun_ed == 0.0 && exact.action_ed == 0.0,
           "candidate equal to truth reports 0 on all views");

  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t z = 1 + rng.uniform_index(10);
    const auto t = random_seq(z);
    std::vector<ActionSequence> cands;
    for (int i = 0; i < 5; ++i) cands.push_back(random_seq(z));
    const auto report = ego4d_eval(cands, t);

    std::vector<double> per_candidate;
    for (const auto& cand : cands) {
      std::vector<std::int64_t> cs, ts;
      for (const auto& p : cand) cs.push_back((static_cast<std::int64_t>(p.verb) << 32) | p.noun);
      for (const auto& p : t) ts.push_back((static_cast<std::int64_t>(p.verb) << 32) | p.noun);
      per_candidate.push_back(static_cast<double>(edit_distance(cs, ts)) /
                              static_cast<double>(z));
    }
    const double full = *std::min_element(per_candidate.begin(), per_candidate.end());
    if (report.action_ed != full) {
      c.expect(false, "report is not the min over candidates at trial " + std::to_string(trial));
      return;
    }
    for (std::size_t drop = 0; drop < 5; ++drop) {
      double subset = 2.0;
      for (std::size_t i = 0; i < 5; ++i) {
        if (i != drop) subset = std::min(subset, per_candidate[i]);
      }
      if (subset < full) {
        c.expect(false, "subset minimum beat the full minimum at trial " +
                            std::to_string(trial));
        return;
      }
    }
  }
}

// --- criterion 7: mAP oracle equivalence ---------------------------------------

void criterion_map_oracle(Check& c) {
  Rng rng(7707);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(12);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(rng.uniform_index(6)) / 5.0;
      labels[i] = rng.uniform() < 0.5 ? 1 : 0;
    }
    const auto ap = average_precision(scores, labels);
    const double oracle = oracles::counting_average_precision(scores, labels);
    if (!ap) {
      if (oracle != -1.0) {
        c.expect(false, "skip disagreement at trial " + std::to_string(trial));
        return;
      }
      continue;
    }
    if (std::abs(*ap - oracle) > 1e-9) {
      c.expect(false, "AP mismatch at trial " + std::to_string(trial));
      return;
    }
  }

  std::array<HorizonData, 3> horizons;
  for (auto& h : horizons) {
    h.scores = Grid<double>(30, 6);
    h.labels = Grid<std::uint8_t>(30, 6);
    for (std::size_t e = 0; e < 30; ++e) {
      for (std::size_t cls = 0; cls < 6; ++cls) {
        h.scores.at(e, cls) = rng.uniform();
        h.labels.at(e, cls) = rng.uniform() < 0.4 ? 1 : 0;
      }
    }
  }
  FreqRareSplit split{{0, 1, 2}, {3, 4, 5}};
  const auto report = map_eval(horizons, split);
  const double mean =
      (*report.per_horizon[0].all + *report.per_horizon[1].all + *report.per_horizon[2].all) /
      3.0;
  c.expect(*report.average.all == mean, "horizon average equals mean of per-horizon values");
}

// --- criterion 8: semantic correction property ----------------------------------

void criterion_semantic_correction(Check& c) {
  Rng rng(8808);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t verbs = 2 + rng.uniform_index(6);
    const std::size_t nouns = 2 + rng.uniform_index(6);
    CooccurrenceMatrix counts(verbs, nouns, 0);
    for (auto& cell : counts.data()) {
      cell = rng.uniform() < 0.45 ? 0 : static_cast<std::int64_t>(1 + rng.uniform_index(40));
    }
    // Pick a zero-count cell and give it the dominant marginals so the raw
    // argmax lands there.
    std::vector<std::pair<std::size_t, std::size_t>> zero_cells;
    for (std::size_t v = 0; v < verbs; ++v) {
      for (std::size_t n = 0; n < nouns; ++n) {
        if (counts.at(v, n) == 0) zero_cells.emplace_back(v, n);
      }
    }
    if (zero_cells.empty()) {
      counts.at(0, 0) = 0;
      zero_cells.emplace_back(0, 0);
    }
    const auto [zv, zn] = zero_cells[rng.uniform_index(zero_cells.size())];

    std::vector<double> p_verb(verbs), p_noun(nouns);
    double sv = 0.0, sn = 0.0;
    for (auto& p : p_verb) sv += (p = 0.02 + 0.1 * rng.uniform());
    for (auto& p : p_noun) sn += (p = 0.02 + 0.1 * rng.uniform());
    p_verb[zv] = sv;  // at least half the mass
    p_noun[zn] = sn;
    sv *= 2.0;
    sn *= 2.0;
    for (auto& p : p_verb) p /= sv;
    for (auto& p : p_noun) p /= sn;

    // Raw argmax of the factored marginals is the zero-co-occurrence cell.
    std::size_t raw_v = 0, raw_n = 0;
    for (std::size_t v = 0; v < verbs; ++v) {
      if (p_verb[v] > p_verb[raw_v]) raw_v = v;
    }
    for (std::size_t n = 0; n < nouns; ++n) {
      if (p_noun[n] > p_noun[raw_n]) raw_n = n;
    }
    if (raw_v != zv || raw_n != zn) continue;  // tie landed elsewhere; rare

    const auto tables = normalize_conditionals(counts);
    const auto scores = corrected_joint(p_verb, p_noun, tables);
    bool all_zero = true;
    for (double s : scores.data()) {
      if (s != 0.0) all_zero = false;
    }
    const auto decoded = map_decode(scores);
    if (!all_zero && counts.at(static_cast<std::size_t>(decoded.verb),
                               static_cast<std::size_t>(decoded.noun)) == 0) {
      c.expect(false, "decoded a zero-co-occurrence pair at trial " + std::to_string(trial));
      return;
    }

    // Brute-force argmax scan with the same tie rule.
    ActionPair best{0, 0};
    double best_score = scores.at(0, 0);
    for (std::size_t v = 0; v < verbs; ++v) {
      for (std::size_t n = 0; n < nouns; ++n) {
        if (scores.at(v, n) > best_score) {
          best_score = scores.at(v, n);
          best = {static_cast<int>(v), static_cast<int>(n)};
        }
      }
    }
    if (!(decoded == best)) {
      c.expect(false, "decode disagrees with brute-force scan at trial " +
                          std::to_string(trial));
      return;
    }
  }
}

// --- criterion 9: CLI determinism ----------------------------------------------

void criterion_cli_determinism(Check& c) {
  const fs::path dir = fs::temp_directory_path() / "lta_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);

  {
    std::ofstream cfg(dir / "synth.json");
    cfg << R"({"verb_count": 5, "noun_count": 5, "K": 8, "Z": 5, "record_count": 32, "seed": 11})";
  }
  c.expect(run_cli("synth --config " + (dir / "synth.json").string() + " --out " +
                   (dir / "task_a").string()) == 0,
           "synth run A");
  c.expect(run_cli("synth --config " + (dir / "synth.json").string() + " --out " +
                   (dir / "task_b").string()) == 0,
           "synth run B");
  for (const char* name : {"vocabulary.csv", "annotations.jsonl", "transitions.json"}) {
    c.expect(slurp(dir / "task_a" / name) == slurp(dir / "task_b" / name),
             std::string("synth byte-identical: ") + name);
    c.expect(!slurp(dir / "task_a" / name).empty(), std::string("synth non-empty: ") + name);
  }

  {
    std::ofstream run(dir / "run.json");
    run << "{\"vocab\": \"" << (dir / "task_a" / "vocabulary.csv").string()
        << "\", \"annotations\": \"" << (dir / "task_a" / "annotations.jsonl").string()
        << "\", \"seed\": 13}";
  }
  c.expect(run_cli("train --config " + (dir / "run.json").string() + " --steps 25 --out " +
                   (dir / "train_a").string()) == 0,
           "train run A");
  c.expect(run_cli("train --config " + (dir / "run.json").string() + " --steps 25 --out " +
                   (dir / "train_b").string()) == 0,
           "train run B");
  for (const char* name : {"training_log.csv", "policy_final.json"}) {
    c.expect(slurp(dir / "train_a" / name) == slurp(dir / "train_b" / name),
             std::string("train byte-identical: ") + name);
    c.expect(!slurp(dir / "train_a" / name).empty(), std::string("train non-empty: ") + name);
  }
  fs::remove_all(dir);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path-to-lta-binary>\n");
    return 1;
  }
  g_cli = argv[1];

  run_criterion(1, "reward formula exactness at 1e-9", 1.0, criterion_reward_exactness);
  run_criterion(2, "aggregation bound and length gating over 10k fuzz cases", 5.0,
                criterion_aggregation_bound);
  run_criterion(3, "GRPO numerics: advantages, KL positivity, gradient check", 30.0,
                criterion_grpo_numerics);
  run_criterion(4, "end-to-end GRPO training improves the reward", 300.0, criterion_training);
  run_criterion(5, "edit distance equals brute-force edit search", 30.0,
                criterion_edit_distance);
  run_criterion(6, "sequence-forecast protocol: exactness and min-monotonicity", 10.0,
                criterion_ego4d_protocol);
  run_criterion(7, "average precision equals counting oracle; horizon averaging", 30.0,
                criterion_map_oracle);
  run_criterion(8, "semantic correction never decodes unsupported pairs", 30.0,
                criterion_semantic_correction);
  run_criterion(9, "CLI train/synth byte-identical across same-seed runs", 120.0,
                criterion_cli_determinism);

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
