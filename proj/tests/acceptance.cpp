// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "otl/baseline.hpp"
#include "otl/checkpoint.hpp"
#include "otl/cli.hpp"
#include "otl/corpus.hpp"
#include "otl/embed.hpp"
#include "otl/evalkit.hpp"
#include "otl/features.hpp"
#include "otl/fixtures.hpp"
#include "otl/gradcheck.hpp"
#include "otl/lda.hpp"
#include "otl/net.hpp"
#include "otl/random.hpp"
#include "otl/textprep.hpp"
#include "otl/transfer.hpp"
#include "test_support.hpp"

using namespace otl;
using otl::testing::read_file;
using otl::testing::TempDir;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "otl");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Reads the number after `key ` on the last line starting with it.
double value_after(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  double v = std::nan("");
  while (std::getline(in, line))
    if (line.rfind(key + " ", 0) == 0) v = std::stod(line.substr(key.size() + 1));
  return v;
}

// ---------------------------------------------------------------------------

Verdict gradient_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto small = cli({"gradcheck", "--small", "--batches", "5", "--seed", "3"});
  const auto full = cli({"gradcheck", "--batches", "5", "--per-tensor", "10", "--seed", "3"});
  const double secs = seconds_since(t0);
  const double e_small = value_after(small.out, "max relative error");
  const double e_full = value_after(full.out, "max relative error");
  const bool ok = small.code == kExitOk && full.code == kExitOk && e_small < 1e-4 && e_full < 1e-4 && secs < 120;
  return {ok, "reduced net all coords " + sci(e_small) + ", default net sampled " + sci(e_full) + ", " +
                  fmt(secs, 1) + "s"};
}

std::vector<std::vector<int>> phase_layers(const FreezeSchedule& s) {
  std::vector<std::vector<int>> out;
  for (const auto& p : s.phases) out.push_back(p.trainable.layers());
  return out;
}

Verdict freeze_contract() {
  const auto t0 = std::chrono::steady_clock::now();
  using L = std::vector<std::vector<int>>;
  bool orders = phase_layers(make_schedule(Strategy::gu)) == L{{4}, {3, 4}, {2, 3, 4}, {1, 2, 3, 4}} &&
                phase_layers(make_schedule(Strategy::bu)) == L{{4}, {1}, {2}, {3}, {1, 2, 3, 4}} &&
                phase_layers(make_schedule(Strategy::tu)) == L{{4}, {3}, {2}, {1}, {1, 2, 3, 4}};

  const auto tweets = fixtures::separable_labeled(64, 12, 2);
  EmbeddingConfig ec;
  ec.dim = 50;
  const EmbeddingTable table(ec);
  const Featurizer fz(table, nullptr, 51, 100);
  const auto samples = featurize(tweets, Task::coarse, fz);
  NetConfig nc;
  nc.input_dim = 50;

  std::size_t checks = 0, violations = 0, changed = 0;
  for (Strategy s : {Strategy::gu, Strategy::bu, Strategy::tu}) {
    const auto schedule = make_schedule(s, 2);
    std::map<int, std::string> entry;
    FinetuneOptions opts;
    opts.seed = 4;
    opts.observer = [&](PhaseEvent ev, std::size_t p, const NetworkParams& params) {
      const auto& mask = schedule.phases[p].trainable;
      if (ev == PhaseEvent::begin) {
        for (int l = 1; l <= 4; ++l) entry[l] = layer_checksum(params, l);
        return;
      }
      for (int l = 1; l <= 4; ++l) {
        const bool same = layer_checksum(params, l) == entry[l];
        if (!mask.trainable(l)) {
          ++checks;
          if (!same) ++violations;
        } else if (ev == PhaseEvent::end && !same) {
          ++changed;
        }
      }
    };
    finetune(init_params(nc, 5), schedule, samples, samples, opts);
  }
  const double secs = seconds_since(t0);
  const bool ok = orders && violations == 0 && checks > 0 && changed > 0 && secs < 300;
  return {ok, std::string("schedule orders ") + (orders ? "match" : "DIFFER") + ", " + std::to_string(checks) +
                  " frozen-layer checks, " + std::to_string(violations) + " violations, " + fmt(secs, 1) + "s"};
}

struct SmokeRun {
  double transfer = 0, scratch = 0;
  bool ok = true;
  std::string err;
};

SmokeRun smoke_seed(const std::filesystem::path& root, std::uint64_t seed) {
  SmokeRun r;
  const auto dir = root / ("seed" + std::to_string(seed));
  const auto fx = dir.string();
  fixtures::write_all(dir, seed, 50);
  const auto all = load_labeled(dir / "smoke_labeled.tsv");
  std::vector<LabeledTweet> train(all.begin(), all.begin() + 64);
  std::vector<LabeledTweet> valid(all.end() - 100, all.end());
  save_labeled(dir / "train.tsv", train);
  save_labeled(dir / "valid.tsv", valid);
  const std::string s = std::to_string(seed);

  auto step = [&](std::vector<std::string> args) {
    const auto c = cli(std::move(args));
    if (c.code != kExitOk) {
      r.ok = false;
      r.err += c.err;
    }
    return c.out;
  };
  step({"lda-train", "--corpus", fx + "/smoke_raw.jsonl", "--topics", "2", "--iterations", "200", "--seed", s,
        "--out", fx + "/lda.bin"});
  step({"pretrain", "--task", "topic", "--corpus", fx + "/smoke_raw.jsonl", "--lda", fx + "/lda.bin", "--vectors",
        fx + "/vectors.txt", "--epochs", "10", "--seed", s, "--out", fx + "/pre.ckpt"});
  const auto bu = step({"finetune", "--ckpt", fx + "/pre.ckpt", "--strategy", "bu", "--train", fx + "/train.tsv",
                        "--valid", fx + "/valid.tsv", "--vectors", fx + "/vectors.txt", "--epochs", "20", "--seed", s,
                        "--out", fx + "/bu.ckpt"});
  const auto none = step({"finetune", "--ckpt", "none", "--strategy", "none", "--train", fx + "/train.tsv", "--valid",
                          fx + "/valid.tsv", "--vectors", fx + "/vectors.txt", "--epochs", "100", "--seed", s,
                          "--out", fx + "/none.ckpt"});
  r.transfer = value_after(bu, "best");
  r.scratch = value_after(none, "best");
  if (std::isnan(r.transfer) || std::isnan(r.scratch)) r.ok = false;
  return r;
}

Verdict transfer_smoke() {
  const auto t0 = std::chrono::steady_clock::now();
  TempDir dir;
  double sum_t = 0, sum_s = 0;
  std::string per;
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = smoke_seed(dir.path(), seed);
    if (!r.ok) {
      ok = false;
      per += " seed " + std::to_string(seed) + " failed: " + r.err;
      continue;
    }
    sum_t += r.transfer;
    sum_s += r.scratch;
    per += " " + fmt(r.transfer, 2) + "/" + fmt(r.scratch, 2);
  }
  const double mt = sum_t / 5, ms = sum_s / 5;
  const double secs = seconds_since(t0);
  ok = ok && mt >= 0.95 && mt > ms && secs < 600;
  return {ok, "mean F1 transfer " + fmt(mt) + " vs no-transfer " + fmt(ms) + " (per seed" + per + "), " +
                  fmt(secs, 1) + "s"};
}

double doc_purity(const LdaModel& m, const std::vector<int>& planted, int planted_k) {
  const auto K = static_cast<std::size_t>(m.topics);
  std::vector<std::vector<int>> table(K, std::vector<int>(static_cast<std::size_t>(planted_k), 0));
  for (std::size_t d = 0; d < planted.size(); ++d) {
    std::vector<double> row(K);
    for (std::size_t t = 0; t < K; ++t) row[t] = static_cast<double>(m.doc_topic[d * K + t]);
    ++table[static_cast<std::size_t>(argmax_lowest(row))][static_cast<std::size_t>(planted[d])];
  }
  int good = 0;
  for (const auto& r : table) good += *std::max_element(r.begin(), r.end());
  return static_cast<double>(good) / static_cast<double>(planted.size());
}

Verdict lda_recovery() {
  const auto corpus = fixtures::planted_topics(200, 20, 2, 50, 11);
  LdaOptions o;
  o.topics = 2;
  o.iterations = 200;
  o.seed = 5;
  int sweeps = 0;
  std::string broken;
  o.on_sweep = [&](int, const LdaModel& m) {
    ++sweeps;
    const auto msg = check_counts(m);
    if (!msg.empty() && broken.empty()) broken = msg;
  };
  const auto a = train_gibbs(corpus.docs, o);
  o.on_sweep = nullptr;
  const auto b = train_gibbs(corpus.docs, o);
  const double purity = doc_purity(a, corpus.topics, 2);
  const bool same = a.assignments == b.assignments && a.topic_word == b.topic_word;
  const bool ok = purity >= 0.95 && broken.empty() && sweeps == 200 && same;
  return {ok, "purity " + fmt(purity) + ", counts checked on " + std::to_string(sweeps) + " sweeps" +
                  (broken.empty() ? "" : " (" + broken + ")") + ", reruns " + (same ? "bit-identical" : "DIFFER")};
}

Verdict user_clustering() {
  const auto f = fixtures::mention_cliques(60, 3, 600, 13);
  const auto lists = extract_mention_lists(f.tweets, 2, 5);
  LdaOptions o;
  o.topics = 3;
  o.iterations = 1000;
  o.seed = 3;
  const auto clusters = cluster_users(lists, o);
  std::map<int, std::map<int, int>> table;
  for (const auto& [user, q] : clusters.cluster_of) ++table[q][f.clique_of.at(user)];
  int good = 0;
  for (const auto& [_, row] : table) {
    int best = 0;
    for (const auto& [__, n] : row) best = std::max(best, n);
    good += best;
  }
  const double purity = static_cast<double>(good) / 60.0;
  const bool ok = clusters.cluster_of.size() == 60 && purity >= 0.95;
  return {ok, std::to_string(clusters.cluster_of.size()) + " users, purity " + fmt(purity)};
}

Verdict emoji_builder() {
  const auto f = fixtures::emoji_tweets(100, 17);
  const auto task = build_emoji_task(f.tweets);
  std::size_t leaks = 0;
  for (const auto& e : task.examples)
    for (const auto& tok : e.tweet.tokens) {
      if (!extract_emojis(tok).empty()) ++leaks;
      for (const auto& em : f.pool)
        if (tok.find(em) != std::string::npos) ++leaks;
    }
  const bool ok = task.examples.size() == f.expected_examples && leaks == 0;
  return {ok, std::to_string(task.examples.size()) + " examples, expected " + std::to_string(f.expected_examples) +
                  ", emoji in texts: " + std::to_string(leaks)};
}

Prf brute_prf(std::span<const int> p, std::span<const int> g, int c) {
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == c && g[i] == c) ++tp;
    if (p[i] == c && g[i] != c) ++fp;
    if (p[i] != c && g[i] == c) ++fn;
  }
  Prf r;
  r.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  r.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  r.f1 = r.precision + r.recall == 0.0 ? 0.0 : 2 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

Verdict metrics_oracle() {
  Rng rng(23);
  double worst = 0.0;
  auto diff = [&](double a, double b) { worst = std::max(worst, std::abs(a - b)); };
  for (int k : {2, 4}) {
    std::vector<int> p, g;
    for (int i = 0; i < 1000; ++i) {
      p.push_back(static_cast<int>(uniform_index(rng, static_cast<std::size_t>(k))));
      g.push_back(static_cast<int>(uniform_index(rng, static_cast<std::size_t>(k))));
    }
    std::vector<std::string> names;
    for (int c = 0; c < k; ++c) names.push_back("c" + std::to_string(c));
    const auto macro = macro_metrics(p, g, names);
    Prf mean;
    for (int c = 0; c < k; ++c) {
      const auto want = brute_prf(p, g, c);
      diff(macro.per_class[c].precision, want.precision);
      diff(macro.per_class[c].recall, want.recall);
      diff(macro.per_class[c].f1, want.f1);
      mean.precision += want.precision / k;
      mean.recall += want.recall / k;
      mean.f1 += want.f1 / k;
      const auto bin = binary_metrics(p, g, c, names);
      diff(bin.averaged.precision, want.precision);
      diff(bin.averaged.recall, want.recall);
      diff(bin.averaged.f1, want.f1);
    }
    diff(macro.averaged.precision, mean.precision);
    diff(macro.averaged.recall, mean.recall);
    diff(macro.averaged.f1, mean.f1);
    long right = 0;
    for (std::size_t i = 0; i < p.size(); ++i) right += p[i] == g[i] ? 1 : 0;
    diff(macro.accuracy, right / 1000.0);
  }
  // TP=3 FP=1 FN=2 TN=4 with offense (0) positive.
  const std::vector<int> preds = {0, 0, 0, 0, 1, 1, 1, 1, 1, 1};
  const std::vector<int> golds = {0, 0, 0, 1, 0, 0, 1, 1, 1, 1};
  const auto f = binary_metrics(preds, golds, 0);
  const bool formula = f.averaged.precision == 0.75 && f.averaged.recall == 0.6;
  return {worst <= 1e-12 && formula,
          "max deviation " + sci(worst) + ", formula case " + (formula ? "exact" : "WRONG")};
}

Verdict overfit() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto tweets = fixtures::separable_labeled(64, 12, 29);
  const EmbeddingTable table{EmbeddingConfig{}};  // 300-dim hashed sub-word vectors
  const Featurizer fz(table, nullptr, 51, 100);
  const auto samples = featurize(tweets, Task::coarse, fz);
  std::vector<int> golds;
  for (const auto& s : samples) golds.push_back(s.label);

  const NetConfig nc;  // full architecture
  int first_perfect = 0, epoch = 0;
  double best_acc = 0;
  FinetuneOptions opts;
  opts.seed = 31;
  opts.observer = [&](PhaseEvent ev, std::size_t, const NetworkParams& params) {
    if (ev != PhaseEvent::epoch_end) return;
    ++epoch;
    const auto preds = predict(params, samples);
    long right = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) right += preds[i] == golds[i] ? 1 : 0;
    const double acc = static_cast<double>(right) / static_cast<double>(preds.size());
    best_acc = std::max(best_acc, acc);
    if (acc == 1.0 && first_perfect == 0) first_perfect = epoch;
  };
  finetune(init_params(nc, 37), make_schedule(Strategy::none, 50), samples, samples, opts);
  const double secs = seconds_since(t0);
  const bool ok = first_perfect > 0 && first_perfect <= 50;
  return {ok, "training accuracy 100% " +
                  (first_perfect > 0 ? "at epoch " + std::to_string(first_perfect) : "never (best " + fmt(best_acc) + ")") +
                  ", " + fmt(secs, 1) + "s"};
}

Verdict dropout_scaling() {
  const auto t0 = std::chrono::steady_clock::now();
  const NetConfig nc;
  const auto params = init_params(nc, 41);
  const auto samples = random_samples(nc, 2, 7, 43);
  Batch batch;
  for (const auto& s : samples) batch.samples.push_back(&s);

  const auto eval = forward(params, batch, Mode::eval);
  const std::size_t n_seeds = 10000;
  std::vector<Matrix> conv_in_sum;
  std::vector<std::vector<Vector>> kept_sum, pooled_sum;
  for (const auto& sc : eval.cache.samples) {
    conv_in_sum.push_back(Matrix::Zero(sc.conv_in.rows(), sc.conv_in.cols()));
    kept_sum.emplace_back();
    pooled_sum.emplace_back();
    for (const auto& p : sc.pooled) {
      kept_sum.back().push_back(Vector::Zero(p.size()));
      pooled_sum.back().push_back(Vector::Zero(p.size()));
    }
  }
  for (std::size_t s = 0; s < n_seeds; ++s) {
    const auto r = forward(params, batch, Mode::train, derive_seed(47, s));
    for (std::size_t i = 0; i < r.cache.samples.size(); ++i) {
      const auto& sc = r.cache.samples[i];
      conv_in_sum[i] += sc.conv_in;
      for (std::size_t k = 0; k < sc.pooled.size(); ++k) {
        kept_sum[i][k] += sc.pooled[k].cwiseProduct(sc.pooled_mask[k]);
        pooled_sum[i][k] += sc.pooled[k];
      }
    }
  }
  double lstm_err = 0, pool_err = 0;
  for (std::size_t i = 0; i < conv_in_sum.size(); ++i) {
    const Matrix mean = conv_in_sum[i] / static_cast<double>(n_seeds);
    const Matrix& target = eval.cache.samples[i].lstm_out;
    lstm_err = std::max(lstm_err, (mean - target).norm() / target.norm());
    for (std::size_t k = 0; k < kept_sum[i].size(); ++k)
      pool_err = std::max(pool_err, (kept_sum[i][k] - pooled_sum[i][k]).norm() / pooled_sum[i][k].norm());
  }
  const double secs = seconds_since(t0);
  const bool ok = lstm_err < 0.02 && pool_err < 0.02;
  return {ok, "relative error LSTM output " + fmt(lstm_err, 5) + ", pooled blocks " + fmt(pool_err, 5) + " over " +
                  std::to_string(n_seeds) + " seeds, " + fmt(secs, 1) + "s"};
}

// Runs every subcommand in `dir` and returns the concatenated stdout.
std::string pipeline(const std::filesystem::path& dir, bool& ok) {
  const std::string d = dir.string();
  const std::string fx = d + "/fx";
  std::string log;
  auto step = [&](std::vector<std::string> args) {
    const auto c = cli(std::move(args));
    if (c.code != kExitOk) ok = false;
    std::string o = c.out + c.err;
    for (auto pos = o.find(d); pos != std::string::npos; pos = o.find(d)) o.replace(pos, d.size(), "<dir>");
    log += o;
  };
  const std::vector<std::string> small = {"--set", "lstm_units=6",  "--set", "filters=5",
                                          "--set", "dense_units=6", "--set", "k_users=3"};
  auto with_small = [&](std::vector<std::string> v) {
    v.insert(v.end(), small.begin(), small.end());
    return v;
  };
  step({"make-fixtures", "--out", fx, "--seed", "7", "--dim", "12"});
  step({"prepare", "--labeled", fx + "/smoke_labeled.tsv", "--tail", "100", "--raw", fx + "/duplicates.jsonl",
        "--out", d + "/prep"});
  step({"lda-train", "--corpus", fx + "/smoke_raw.jsonl", "--topics", "2", "--iterations", "30", "--out",
        d + "/lda.bin"});
  step({"cluster-users", "--corpus", fx + "/mention_cliques.jsonl", "--k", "3", "--iterations", "30", "--out",
        d + "/clusters.tsv"});
  step(with_small({"pretrain", "--task", "topic", "--corpus", fx + "/smoke_raw.jsonl", "--lda", d + "/lda.bin",
                   "--vectors", fx + "/vectors.txt", "--clusters", d + "/clusters.tsv", "--epochs", "2", "--out",
                   d + "/topic.ckpt"}));
  step(with_small({"pretrain", "--task", "emoji", "--corpus", fx + "/emoji.jsonl", "--vectors", fx + "/vectors.txt",
                   "--epochs", "1", "--out", d + "/emoji.ckpt"}));
  step(with_small({"pretrain", "--task", "category", "--corpus", fx + "/comments.jsonl", "--vectors",
                   fx + "/vectors.txt", "--epochs", "1", "--out", d + "/category.ckpt"}));
  step(with_small({"finetune", "--ckpt", d + "/topic.ckpt", "--strategy", "gu", "--train", d + "/prep/train.tsv",
                   "--valid", d + "/prep/valid.tsv", "--vectors", fx + "/vectors.txt", "--clusters",
                   d + "/clusters.tsv", "--epochs", "4", "--out", d + "/fine.ckpt"}));
  step(with_small({"finetune", "--ckpt", "none", "--strategy", "none", "--task", "fine", "--train",
                   d + "/prep/train.tsv", "--valid", d + "/prep/valid.tsv", "--vectors", fx + "/vectors.txt",
                   "--epochs", "2", "--out", d + "/fine_task2.ckpt"}));
  step(with_small({"evaluate", "--ckpt", d + "/fine.ckpt", "--ckpt", d + "/fine.ckpt", "--data", d + "/prep/valid.tsv",
                   "--vectors", fx + "/vectors.txt", "--clusters", d + "/clusters.tsv", "--report",
                   d + "/report.txt", "--errors", d + "/errors.tsv"}));
  step({"baseline", "--train", d + "/prep/train.tsv", "--valid", d + "/prep/valid.tsv", "--vectors",
        fx + "/vectors.txt", "--task", "fine"});
  step({"gradcheck", "--small", "--batches", "1"});
  return log;
}

Verdict determinism_and_round_trips() {
  TempDir dir;
  bool ok_a = true, ok_b = true;
  const auto a = pipeline(dir / "a", ok_a);
  const auto b = pipeline(dir / "b", ok_b);
  std::size_t files = 0, differ = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir / "a")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), dir / "a");
    ++files;
    if (read_file(entry.path()) != read_file(dir / "b" / rel)) ++differ;
  }
  const bool logs_same = a == b;

  // Round-trips: reload and rewrite each artifact, expecting the same bytes.
  std::size_t round_trips = 0, broken = 0;
  auto expect_same = [&](const std::string& x, const std::string& y) {
    ++round_trips;
    if (x != y) ++broken;
  };
  const auto ckpt = dir / "a" / "fine.ckpt";
  const auto loaded = load_checkpoint(ckpt);
  save_checkpoint(dir / "re.ckpt", loaded.params);
  expect_same(read_file(ckpt), read_file(dir / "re.ckpt"));
  const auto reloaded = load_checkpoint(dir / "re.ckpt");
  {
    const auto x = tensors(loaded.params);
    const auto y = tensors(reloaded.params);
    bool eq = x.size() == y.size();
    for (std::size_t i = 0; eq && i < x.size(); ++i)
      eq = std::equal(x[i].data.begin(), x[i].data.end(), y[i].data.begin(), y[i].data.end());
    expect_same(eq ? "" : "x", "");
  }
  const auto tsv = dir / "a" / "fx" / "smoke_labeled.tsv";
  save_labeled(dir / "re.tsv", load_labeled(tsv));
  expect_same(read_file(tsv), read_file(dir / "re.tsv"));
  const auto clusters = dir / "a" / "clusters.tsv";
  save_clusters(load_clusters(clusters, 3), dir / "re_clusters.tsv");
  expect_same(read_file(clusters), read_file(dir / "re_clusters.tsv"));
  const auto lda = dir / "a" / "lda.bin";
  save_lda(load_lda(lda), dir / "re_lda.bin");
  expect_same(read_file(lda), read_file(dir / "re_lda.bin"));

  const bool ok = ok_a && ok_b && logs_same && differ == 0 && files > 0 && broken == 0;
  return {ok, std::to_string(files) + " artifacts compared, " + std::to_string(differ) + " differ, stdout " +
                  (logs_same ? "identical" : "DIFFERS") + (ok_a && ok_b ? "" : ", a subcommand FAILED") + "; " +
                  std::to_string(round_trips - broken) + "/" + std::to_string(round_trips) +
                  " round-trips bit-exact"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"gradient-oracle", gradient_oracle},
      {"freeze-contract", freeze_contract},
      {"transfer-smoke", transfer_smoke},
      {"lda-recovery", lda_recovery},
      {"user-clustering", user_clustering},
      {"emoji-task-builder", emoji_builder},
      {"metrics-oracle", metrics_oracle},
      {"overfit", overfit},
      {"dropout-scaling", dropout_scaling},
      {"determinism-round-trips", determinism_and_round_trips},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
