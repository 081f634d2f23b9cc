#include "otl/cli.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "otl/baseline.hpp"
#include "otl/checkpoint.hpp"
#include "otl/config.hpp"
#include "otl/corpus.hpp"
#include "otl/embed.hpp"
#include "otl/error.hpp"
#include "otl/evalkit.hpp"
#include "otl/features.hpp"
#include "otl/fixtures.hpp"
#include "otl/gradcheck.hpp"
#include "otl/lda.hpp"
#include "otl/net.hpp"
#include "otl/textprep.hpp"
#include "otl/transfer.hpp"

namespace otl {

namespace {

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

// Options shared by every pipeline stage. Precedence: defaults < --config
// file < --set pairs < dedicated flags.
struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;

  void add(CLI::App* app) {
    app->add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
    app->add_option("--set", sets, "override one config key (key=value), repeatable");
    seed_opt = app->add_option("--seed", seed, "random seed (overrides config key 'seed')");
  }

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw DataError("--set expects key=value, got '" + kv + "'");
      set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed_opt->count() > 0) c.seed = seed;
    return c;
  }
};

template <class T>
void override_if(const CLI::Option* opt, T& target, const T& value) {
  if (opt->count() > 0) target = value;
}

StopwordSet stopwords_from(const std::string& path) {
  return load_stopwords(path.empty() ? default_stopwords_path() : std::filesystem::path(path));
}

struct FeatureInputs {
  EmbeddingTable embeddings;
  std::unique_ptr<UserClusters> clusters;
  std::size_t cluster_width;
};

FeatureInputs feature_inputs(const std::string& vectors, const std::string& clusters, const RunConfig& config) {
  FeatureInputs in{EmbeddingTable::load(vectors, config.embedding()), nullptr,
                   static_cast<std::size_t>(config.k_users) + 1};
  if (!clusters.empty()) in.clusters = std::make_unique<UserClusters>(load_clusters(clusters, config.k_users));
  return in;
}

void warn_truncated(std::ostream& err, const Featurizer& featurizer, std::size_t max_len) {
  if (featurizer.truncated() > 0)
    err << "warning: " << featurizer.truncated() << " tweet(s) longer than " << max_len << " tokens were truncated\n";
}

void print_phase(std::ostream& out, std::size_t index, const PhaseRecord& rec) {
  out << "phase " << index + 1 << " layers " << rec.trainable.to_string() << " epochs " << rec.history.size()
      << " selected " << rec.selected_epoch << " history";
  for (double h : rec.history) out << ' ' << fixed(h);
  out << '\n';
}

// ---- prepare ---------------------------------------------------------------

struct PrepareCmd {
  Common common;
  std::string labeled, raw, out_dir;
  std::size_t tail = 0;
  CLI::Option* tail_opt = nullptr;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("prepare", "split a labeled TSV into train.tsv / valid.tsv");
    common.add(sub);
    sub->add_option("--labeled", labeled, "labeled TSV (text, coarse, fine)")->required();
    tail_opt = sub->add_option("--tail", tail, "validation tail size (config key 'tail', default 808)");
    sub->add_option("--raw", raw, "optional raw JSONL corpus to deduplicate into raw.jsonl");
    sub->add_option("--out", out_dir, "output directory")->required();
  }

  int run(std::ostream& out) {
    RunConfig c = common.resolve();
    override_if(tail_opt, c.tail, tail);
    const auto data = load_labeled(labeled);
    const auto split = split_tail(data, c.tail);
    std::filesystem::create_directories(out_dir);
    save_labeled(std::filesystem::path(out_dir) / "train.tsv", split.train);
    save_labeled(std::filesystem::path(out_dir) / "valid.tsv", split.validation);
    out << "train " << split.train.size() << "\nvalid " << split.validation.size() << '\n';
    if (!raw.empty()) {
      const auto tweets = load_raw(raw);
      const auto unique = deduplicate(tweets);
      auto f = open_out((std::filesystem::path(out_dir) / "raw.jsonl").string());
      write_raw(f, unique);
      out << "raw " << tweets.size() << " deduplicated " << unique.size() << '\n';
    }
    return kExitOk;
  }
};

// ---- lda-train -------------------------------------------------------------

struct LdaTrainCmd {
  Common common;
  std::string corpus, stopwords, out_path;
  int topics = 0, iterations = 0;
  CLI::Option *topics_opt = nullptr, *iter_opt = nullptr;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("lda-train", "train a topic model on the meaningful words of a raw corpus");
    common.add(sub);
    sub->add_option("--corpus", corpus, "raw tweets JSONL (id, text)")->required();
    topics_opt = sub->add_option("--topics", topics, "number of topics K (config key 'k_topics')");
    iter_opt = sub->add_option("--iterations", iterations, "Gibbs sweeps (config key 'lda_iterations')");
    sub->add_option("--stopwords", stopwords, "stopword list (default: bundled German list)");
    sub->add_option("--out", out_path, "model file")->required();
  }

  int run(std::ostream& out) {
    RunConfig c = common.resolve();
    override_if(topics_opt, c.k_topics, topics);
    override_if(iter_opt, c.lda_iterations, iterations);
    validate(c);
    const auto sw = stopwords_from(stopwords);
    std::vector<Document> docs;
    for (const auto& t : load_raw(corpus)) {
      auto doc = topic_document(t, sw);
      if (doc.size() >= 2) docs.push_back(std::move(doc));
    }
    if (docs.empty()) throw DataError("no document has two or more meaningful words");
    const auto model = train_gibbs(docs, c.lda(c.k_topics));
    save_lda(model, out_path);
    out << "docs " << docs.size() << " vocab " << model.vocab_size() << " topics " << model.topics << '\n';
    for (int t = 0; t < model.topics; ++t) {
      std::vector<std::pair<long, std::string>> ranked;
      for (std::size_t w = 0; w < model.vocab_size(); ++w)
        ranked.emplace_back(-model.n_tw(t, static_cast<int>(w)), model.vocab[w]);
      std::sort(ranked.begin(), ranked.end());
      out << "topic " << t << ':';
      for (std::size_t k = 0; k < std::min<std::size_t>(8, ranked.size()); ++k) out << ' ' << ranked[k].second;
      out << '\n';
    }
    return kExitOk;
  }
};

// ---- cluster-users ---------------------------------------------------------

struct ClusterCmd {
  Common common;
  std::string corpus, out_path;
  int k = 0, iterations = 0;
  std::size_t min_mentions = 0, min_freq = 0;
  CLI::Option *k_opt = nullptr, *iter_opt = nullptr, *mm_opt = nullptr, *mf_opt = nullptr;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("cluster-users", "cluster users by topic modelling their @-mention lists");
    common.add(sub);
    sub->add_option("--corpus", corpus, "raw tweets JSONL (id, text)")->required();
    k_opt = sub->add_option("--k", k, "number of user clusters (config key 'k_users', default 50)");
    iter_opt = sub->add_option("--iterations", iterations, "Gibbs sweeps (config key 'lda_iterations')");
    mm_opt = sub->add_option("--min-mentions", min_mentions, "mentions per tweet (config key 'min_mentions')");
    mf_opt = sub->add_option("--min-freq", min_freq, "corpus frequency per user (config key 'min_user_freq')");
    sub->add_option("--out", out_path, "clusters TSV (user, cluster)")->required();
  }

  int run(std::ostream& out) {
    RunConfig c = common.resolve();
    override_if(k_opt, c.k_users, k);
    override_if(iter_opt, c.lda_iterations, iterations);
    override_if(mm_opt, c.min_mentions, min_mentions);
    override_if(mf_opt, c.min_user_freq, min_freq);
    validate(c);
    const auto tweets = load_raw(corpus);
    const auto lists = extract_mention_lists(tweets, c.min_mentions, c.min_user_freq);
    if (lists.empty()) throw DataError("no mention list passes the thresholds");
    const auto clusters = cluster_users(lists, c.lda(c.k_users));
    save_clusters(clusters, out_path);
    std::vector<std::size_t> sizes(static_cast<std::size_t>(c.k_users), 0);
    for (const auto& [_, q] : clusters.cluster_of) ++sizes[static_cast<std::size_t>(q)];
    out << "lists " << lists.size() << " users " << clusters.cluster_of.size() << '\n';
    out << "cluster sizes";
    for (auto s : sizes) out << ' ' << s;
    out << '\n';
    return kExitOk;
  }
};

// ---- pretrain --------------------------------------------------------------

struct PretrainCmd {
  Common common;
  std::string task, corpus, lda_path, vectors, clusters, stopwords, out_path;
  std::size_t epochs = 0, batch = 0;
  CLI::Option *epochs_opt = nullptr, *batch_opt = nullptr;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("pretrain", "pre-train the full network on a background task");
    common.add(sub);
    sub->add_option("--task", task, "pre-training task")
        ->required()
        ->check(CLI::IsMember({"category", "emoji", "topic"}));
    sub->add_option("--corpus", corpus,
                    "comments JSONL (category) or raw tweets JSONL (emoji, topic)")
        ->required();
    sub->add_option("--lda", lda_path, "topic model (required for --task topic)");
    sub->add_option("--vectors", vectors, "word vectors (text format)")->required();
    sub->add_option("--clusters", clusters, "user clusters TSV");
    sub->add_option("--stopwords", stopwords, "stopword list (default: bundled German list)");
    epochs_opt = sub->add_option("--epochs", epochs, "epochs (config key 'pretrain_epochs', default 10)");
    batch_opt = sub->add_option("--batch", batch, "batch size (config key 'pretrain_batch', default 128)");
    sub->add_option("--out", out_path, "checkpoint file")->required();
  }

  int run(std::ostream& out, std::ostream& err) {
    RunConfig c = common.resolve();
    override_if(epochs_opt, c.pretrain_epochs, epochs);
    override_if(batch_opt, c.pretrain_batch, batch);
    validate(c);

    PretrainTask pt;
    switch (parse_pretrain_kind(task)) {
      case PretrainKind::category:
        pt = build_category_task(load_comments(corpus));
        break;
      case PretrainKind::emoji:
        pt = build_emoji_task(load_raw(corpus));
        break;
      case PretrainKind::topic: {
        if (lda_path.empty()) throw DataError("--task topic needs --lda");
        const auto model = load_lda(lda_path);
        pt = build_topic_task(load_raw(corpus), model, stopwords_from(stopwords), c.infer());
        break;
      }
    }
    pt.batch_size = c.pretrain_batch;
    pt.epochs = c.pretrain_epochs;
    if (pt.examples.empty()) throw DataError("pre-training task '" + task + "' has no examples");

    const auto inputs = feature_inputs(vectors, clusters, c);
    Featurizer featurizer(inputs.embeddings, inputs.clusters.get(), inputs.cluster_width, c.max_seq_len);
    const auto params = init_params(c.net(inputs.embeddings.dim(), pt.label_space.size()), derive_seed(c.seed, 100));
    TrainOptions opts{c.nadam(), pt.batch_size, pt.epochs, c.seed};
    const auto result = pretrain(pt, params, featurizer, opts);
    warn_truncated(err, featurizer, c.max_seq_len);
    save_checkpoint(out_path, result.params);
    {
      auto labels = open_out(out_path + ".labels");
      for (const auto& l : pt.label_space) labels << l << '\n';
    }
    out << "examples " << pt.examples.size() << " labels " << pt.label_space.size() << '\n';
    out << "epoch 0 loss " << fixed(result.initial_loss, 6) << '\n';
    for (std::size_t e = 0; e < result.epoch_losses.size(); ++e)
      out << "epoch " << e + 1 << " loss " << fixed(result.epoch_losses[e], 6) << '\n';
    return kExitOk;
  }
};

// ---- finetune --------------------------------------------------------------

struct FinetuneCmd {
  Common common;
  std::string ckpt, strategy = "bu", task = "coarse", train, valid, vectors, clusters, metric, out_path;
  std::size_t epochs = 0, batch = 0;
  CLI::Option *epochs_opt = nullptr, *batch_opt = nullptr;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("finetune", "fine-tune a pre-trained (or fresh) network with an unfreezing strategy");
    common.add(sub);
    sub->add_option("--ckpt", ckpt, "pre-trained checkpoint, or 'none' for a fresh network")->required();
    sub->add_option("--strategy", strategy, "unfreezing strategy")
        ->check(CLI::IsMember({"none", "gu", "bu", "tu"}))
        ->capture_default_str();
    sub->add_option("--task", task, "target task")->check(CLI::IsMember({"coarse", "fine"}))->capture_default_str();
    sub->add_option("--train", train, "training TSV")->required();
    sub->add_option("--valid", valid, "validation TSV")->required();
    sub->add_option("--vectors", vectors, "word vectors (text format)")->required();
    sub->add_option("--clusters", clusters, "user clusters TSV");
    sub->add_option("--metric", metric, "model-selection metric (default: binary_f1 for coarse, macro_f1 for fine)")
        ->check(CLI::IsMember({"binary_f1", "macro_f1"}));
    epochs_opt = sub->add_option("--epochs", epochs, "max epochs per phase (config key 'finetune_epochs', default 50)");
    batch_opt = sub->add_option("--batch", batch, "batch size (config key 'finetune_batch', default 32)");
    sub->add_option("--out", out_path, "checkpoint file for the selected model")->required();
  }

  int run(std::ostream& out, std::ostream& err) {
    RunConfig c = common.resolve();
    override_if(epochs_opt, c.finetune_epochs, epochs);
    override_if(batch_opt, c.finetune_batch, batch);
    validate(c);
    const Task t = parse_task(task);
    const auto classes = class_names(t);
    const auto inputs = feature_inputs(vectors, clusters, c);
    Featurizer featurizer(inputs.embeddings, inputs.clusters.get(), inputs.cluster_width, c.max_seq_len);
    const auto train_samples = featurize(load_labeled(train), t, featurizer);
    const auto valid_samples = featurize(load_labeled(valid), t, featurizer);
    warn_truncated(err, featurizer, c.max_seq_len);

    NetworkParams params;
    if (ckpt == "none") {
      params = init_params(c.net(inputs.embeddings.dim(), classes.size()), derive_seed(c.seed, 100));
    } else {
      const auto loaded = load_checkpoint(ckpt);
      if (loaded.params.config.input_dim != inputs.embeddings.dim())
        throw DataError("checkpoint expects " + std::to_string(loaded.params.config.input_dim) +
                        "-dim vectors, got " + std::to_string(inputs.embeddings.dim()));
      if (loaded.params.config.cluster_width != inputs.cluster_width)
        throw DataError("checkpoint cluster width " + std::to_string(loaded.params.config.cluster_width) +
                        " does not match k_users + 1 = " + std::to_string(inputs.cluster_width));
      params = replace_head(loaded.params, classes.size(), derive_seed(c.seed, 101));
    }

    FinetuneOptions opts;
    opts.metric = metric.empty() ? (t == Task::coarse ? Metric::binary_f1 : Metric::macro_f1) : parse_metric(metric);
    opts.positive = 0;
    opts.batch_size = c.finetune_batch;
    opts.optimizer = c.nadam();
    opts.seed = c.seed;
    const auto schedule = make_schedule(parse_strategy(strategy), c.finetune_epochs);
    const auto result = finetune(std::move(params), schedule, train_samples, valid_samples, opts);
    save_checkpoint(out_path, result.best_params);
    out << "train " << train_samples.size() << " valid " << valid_samples.size() << " strategy " << strategy << '\n';
    for (std::size_t p = 0; p < result.phases.size(); ++p) print_phase(out, p, result.phases[p]);
    out << "best " << fixed(result.best_metric) << '\n';
    return kExitOk;
  }
};

// ---- evaluate --------------------------------------------------------------

struct EvaluateCmd {
  Common common;
  std::vector<std::string> ckpts;
  std::string data, task = "coarse", vectors, clusters, report_path, errors_path;
  std::size_t runs = 0;
  CLI::Option* runs_opt = nullptr;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("evaluate", "score checkpoints on a labeled TSV and average over runs");
    common.add(sub);
    sub->add_option("--ckpt", ckpts,
                    "checkpoint, repeatable; a single path containing {run} expands to runs 1..N")
        ->required();
    sub->add_option("--data", data, "labeled TSV")->required();
    sub->add_option("--task", task, "target task")->check(CLI::IsMember({"coarse", "fine"}))->capture_default_str();
    sub->add_option("--vectors", vectors, "word vectors (text format)")->required();
    sub->add_option("--clusters", clusters, "user clusters TSV");
    runs_opt = sub->add_option("--runs", runs, "number of runs for a {run} pattern (config key 'runs')");
    sub->add_option("--report", report_path, "also write the report table here");
    sub->add_option("--errors", errors_path,
                    "write FP/FN rows of the first run (offense vs. other) as TSV text, gold, pred, type");
  }

  std::vector<std::string> checkpoint_paths(std::size_t n_runs) const {
    if (ckpts.size() == 1 && ckpts[0].find("{run}") != std::string::npos) {
      std::vector<std::string> out;
      for (std::size_t r = 1; r <= n_runs; ++r) {
        std::string p = ckpts[0];
        p.replace(p.find("{run}"), 5, std::to_string(r));
        out.push_back(p);
      }
      return out;
    }
    return ckpts;
  }

  int run(std::ostream& out, std::ostream& err) {
    RunConfig c = common.resolve();
    override_if(runs_opt, c.runs, runs);
    validate(c);
    const Task t = parse_task(task);
    const auto classes = class_names(t);
    const auto tweets = load_labeled(data);
    if (tweets.empty()) throw DataError("evaluation data is empty");
    const auto inputs = feature_inputs(vectors, clusters, c);
    Featurizer featurizer(inputs.embeddings, inputs.clusters.get(), inputs.cluster_width, c.max_seq_len);
    const auto samples = featurize(tweets, t, featurizer);
    warn_truncated(err, featurizer, c.max_seq_len);
    std::vector<int> golds;
    for (const auto& s : samples) golds.push_back(s.label);

    std::vector<MetricsReport> reports;
    std::vector<int> first_preds;
    for (const auto& path : checkpoint_paths(c.runs)) {
      const auto ck = load_checkpoint(path);
      if (ck.params.config.n_classes != classes.size())
        throw DataError(path + ": head has " + std::to_string(ck.params.config.n_classes) + " outputs, task " +
                        task + " has " + std::to_string(classes.size()));
      if (ck.params.config.input_dim != inputs.embeddings.dim())
        throw DataError(path + ": vector dimension mismatch");
      const auto preds = predict(ck.params, samples);
      if (first_preds.empty()) first_preds = preds;
      reports.push_back(t == Task::coarse ? binary_metrics(preds, golds, 0, classes)
                                          : macro_metrics(preds, golds, classes));
    }
    const auto report = aggregate_runs(reports);
    out << "runs " << reports.size() << '\n';
    print_report(out, report);
    if (!report_path.empty()) {
      auto f = open_out(report_path);
      f << "runs " << reports.size() << '\n';
      print_report(f, report);
    }
    if (!errors_path.empty()) {
      const int other = static_cast<int>(classes.size()) - 1;
      std::vector<int> p2, g2;
      std::vector<std::string> texts;
      for (std::size_t i = 0; i < golds.size(); ++i) {
        p2.push_back(first_preds[i] == other ? 1 : 0);
        g2.push_back(golds[i] == other ? 1 : 0);
        texts.push_back(tweets[i].text);
      }
      const auto errs = error_report(p2, g2, texts, 0);
      auto f = open_out(errors_path);
      const std::vector<std::string> coarse = class_names(Task::coarse);
      write_errors(f, errs, coarse);
      out << "errors FP " << errs.false_positives.size() << " FN " << errs.false_negatives.size() << " ratio "
          << fixed(errs.fp_percent, 1) << ':' << fixed(errs.fn_percent, 1) << '\n';
    }
    return kExitOk;
  }
};

// ---- baseline --------------------------------------------------------------

struct BaselineCmd {
  Common common;
  std::string train, valid, vectors, task = "coarse";
  std::size_t top_terms = 10;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("baseline", "linear hinge-loss baseline on IDF-weighted embedding features");
    common.add(sub);
    sub->add_option("--train", train, "training TSV")->required();
    sub->add_option("--valid", valid, "validation TSV")->required();
    sub->add_option("--vectors", vectors, "word vectors (text format)")->required();
    sub->add_option("--task", task, "target task")->check(CLI::IsMember({"coarse", "fine"}))->capture_default_str();
    sub->add_option("--top-terms", top_terms, "highest-weighted terms listed per class")->capture_default_str();
  }

  int run(std::ostream& out) {
    const RunConfig c = common.resolve();
    const Task t = parse_task(task);
    const auto classes = class_names(t);
    const auto embeddings = EmbeddingTable::load(vectors, c.embedding());
    auto prepare = [&](const std::vector<LabeledTweet>& data, std::vector<TokenizedTweet>& toks,
                       std::vector<int>& labels) {
      for (const auto& lt : data) {
        toks.push_back(preprocess(lt.text, lt.id));
        labels.push_back(label_id(lt, t));
      }
    };
    std::vector<TokenizedTweet> train_toks, valid_toks;
    std::vector<int> train_labels, valid_labels;
    prepare(load_labeled(train), train_toks, train_labels);
    prepare(load_labeled(valid), valid_toks, valid_labels);
    if (valid_toks.empty()) throw DataError("validation data is empty");
    const auto idf = compute_idf(train_toks);
    auto features = [&](const std::vector<TokenizedTweet>& toks) {
      std::vector<Vector> out_features;
      for (const auto& tk : toks) out_features.push_back(idf_weighted_vector(embeddings, idf, tk));
      return out_features;
    };
    const auto xtrain = features(train_toks);
    const auto xvalid = features(valid_toks);
    LinearOptions lo{c.baseline_l2, c.baseline_epochs, c.baseline_lr, c.seed};
    const auto model = train_linear(xtrain, train_labels, classes, lo);
    std::vector<int> preds;
    for (const auto& x : xvalid) preds.push_back(predict(model, x));
    const auto report =
        t == Task::coarse ? binary_metrics(preds, valid_labels, 0, classes) : macro_metrics(preds, valid_labels, classes);
    out << "objective first " << fixed(model.objective.front(), 6) << " last " << fixed(model.objective.back(), 6)
        << '\n';
    print_report(out, report);
    const auto terms = top_terms_per_category(train_toks, train_labels, classes.size(), idf, top_terms);
    for (std::size_t k = 0; k < classes.size(); ++k) {
      out << "top " << classes[k] << ':';
      for (const auto& term : terms[k]) out << ' ' << term;
      out << '\n';
    }
    return kExitOk;
  }
};

// ---- gradcheck -------------------------------------------------------------

struct GradcheckCmd {
  std::uint64_t seed = 3;
  std::size_t batches = 5, per_tensor = 10;
  bool small = false;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand(
        "gradcheck", "compare analytic gradients with central differences; exit 0 when max relative error < 1e-4");
    sub->add_option("--seed", seed, "random seed")->capture_default_str();
    sub->add_option("--batches", batches, "random 2-sample batches per layer group")->capture_default_str();
    sub->add_option("--per-tensor", per_tensor, "coordinates checked per tensor (0 = all)")->capture_default_str();
    sub->add_flag("--small", small, "use a reduced architecture and check every coordinate");
  }

  int run(std::ostream& out) {
    NetConfig config;
    GradCheckOptions opts;
    opts.per_tensor = per_tensor;
    if (small) {
      config.input_dim = 6;
      config.lstm_units = 3;
      config.kernel_sizes = {2, 3};
      config.filters = 4;
      config.dense_units = 5;
      config.cluster_width = 4;
      config.n_classes = 3;
      opts.per_tensor = 0;
    }
    const std::vector<FreezeMask> masks = {{1}, {2}, {3}, {4}, FreezeMask::all()};
    double worst = 0.0;
    for (const auto& mask : masks) {
      double mask_worst = 0.0;
      std::size_t checked = 0;
      double leak = 0.0;
      std::string where;
      for (std::size_t b = 0; b < batches; ++b) {
        const auto r = gradient_check(config, mask, derive_seed(seed, b), opts);
        if (r.max_rel_error > mask_worst) where = r.worst;
        mask_worst = std::max(mask_worst, r.max_rel_error);
        leak = std::max(leak, r.frozen_leak);
        checked += r.checked;
      }
      if (leak > 0.0) mask_worst = std::max(mask_worst, 1.0);
      out << "layers " << mask.to_string() << " checked " << checked << " max_rel_error " << sci(mask_worst)
          << (where.empty() ? "" : " at " + where)
          << (leak > 0.0 ? " frozen-gradient-leak" : "") << '\n';
      worst = std::max(worst, mask_worst);
    }
    out << "max relative error " << sci(worst) << '\n';
    return worst < 1e-4 ? kExitOk : kExitData;
  }
};

// ---- make-fixtures ---------------------------------------------------------

struct FixturesCmd {
  std::string out_dir;
  std::uint64_t seed = 1;
  std::size_t dim = 50;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("make-fixtures", "write the synthetic desk-scale corpora and their truth files");
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--seed", seed, "random seed")->capture_default_str();
    sub->add_option("--dim", dim, "dimension of the fixture word vectors")->capture_default_str();
  }

  int run(std::ostream& out) {
    for (const auto& name : fixtures::write_all(out_dir, seed, dim)) out << name << '\n';
    return kExitOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transfer-learning toolkit for offensive-language classification", "otl"};
  app.require_subcommand(1);

  PrepareCmd prepare;
  LdaTrainCmd lda_train;
  ClusterCmd cluster;
  PretrainCmd pretrain_cmd;
  FinetuneCmd finetune_cmd;
  EvaluateCmd evaluate;
  BaselineCmd baseline;
  GradcheckCmd gradcheck;
  FixturesCmd fixtures_cmd;
  prepare.add(app);
  lda_train.add(app);
  cluster.add(app);
  pretrain_cmd.add(app);
  finetune_cmd.add(app);
  evaluate.add(app);
  baseline.add(app);
  gradcheck.add(app);
  fixtures_cmd.add(app);

  if (args.size() <= 1) {
    err << app.help();
    return kExitUsage;
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "prepare") return prepare.run(out);
    if (name == "lda-train") return lda_train.run(out);
    if (name == "cluster-users") return cluster.run(out);
    if (name == "pretrain") return pretrain_cmd.run(out, err);
    if (name == "finetune") return finetune_cmd.run(out, err);
    if (name == "evaluate") return evaluate.run(out, err);
    if (name == "baseline") return baseline.run(out);
    if (name == "gradcheck") return gradcheck.run(out);
    if (name == "make-fixtures") return fixtures_cmd.run(out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace otl
