#include "otl/transfer.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "otl/error.hpp"
#include "otl/evalkit.hpp"

namespace otl {

PretrainKind parse_pretrain_kind(std::string_view name) {
  if (name == "category") return PretrainKind::category;
  if (name == "emoji") return PretrainKind::emoji;
  if (name == "topic") return PretrainKind::topic;
  throw DataError("unknown pre-training task '" + std::string(name) + "'");
}

Strategy parse_strategy(std::string_view name) {
  if (name == "none") return Strategy::none;
  if (name == "gu") return Strategy::gu;
  if (name == "bu") return Strategy::bu;
  if (name == "tu") return Strategy::tu;
  throw DataError("unknown strategy '" + std::string(name) + "'");
}

Metric parse_metric(std::string_view name) {
  if (name == "binary_f1") return Metric::binary_f1;
  if (name == "macro_f1") return Metric::macro_f1;
  throw DataError("unknown metric '" + std::string(name) + "'");
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::none: return "none";
    case Strategy::gu: return "gu";
    case Strategy::bu: return "bu";
    case Strategy::tu: return "tu";
  }
  return "none";
}

std::vector<CommentRecord> parse_comments(std::istream& in) {
  std::vector<CommentRecord> out;
  std::string line;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++record;
    const std::string where = "comment record " + std::to_string(record);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw DataError(where + ": invalid JSON");
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("text") || !j["text"].is_string())
      throw DataError(where + ": missing id or text");
    if (!j.contains("annotations") || !j["annotations"].is_array())
      throw DataError(where + ": missing annotations array");
    CommentRecord c{j["id"].get<std::string>(), j["text"].get<std::string>(), {}};
    for (const auto& a : j["annotations"]) {
      if (!a.is_object()) throw DataError(where + ": annotation is not an object");
      c.annotations.push_back({a.value("inappropriate", false), a.value("discriminating", false)});
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<CommentRecord> load_comments(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_comments(in);
}

void write_comments(std::ostream& out, std::span<const CommentRecord> comments) {
  for (const auto& c : comments) {
    nlohmann::json ann = nlohmann::json::array();
    for (const auto& a : c.annotations)
      ann.push_back({{"inappropriate", a.inappropriate}, {"discriminating", a.discriminating}});
    out << nlohmann::json{{"id", c.id}, {"text", c.text}, {"annotations", ann}}.dump() << '\n';
  }
}

PretrainTask build_category_task(std::span<const CommentRecord> comments) {
  PretrainTask task;
  task.kind = PretrainKind::category;
  task.label_space = {"offense", "other"};
  for (const auto& c : comments) {
    if (c.annotations.empty()) throw DataError("comment " + c.id + " has no annotators");
    std::size_t flagged = 0;
    for (const auto& a : c.annotations)
      if (a.inappropriate || a.discriminating) ++flagged;
    const bool offense = 2 * flagged > c.annotations.size();
    task.examples.push_back({preprocess(c.text, c.id), extract_mentions(c.text), offense ? 0 : 1});
  }
  return task;
}

PretrainTask build_emoji_task(std::span<const RawTweet> tweets) {
  PretrainTask task;
  task.kind = PretrainKind::emoji;
  std::unordered_map<std::string, int> label_of;
  for (const auto& t : tweets) {
    if (t.emojis.empty()) continue;
    auto tokens = preprocess(strip_emojis(t.text), t.id);
    for (const auto& e : t.emojis) {
      auto [it, inserted] = label_of.try_emplace(e, static_cast<int>(task.label_space.size()));
      if (inserted) task.label_space.push_back(e);
      task.examples.push_back({tokens, t.mentions, it->second});
    }
  }
  return task;
}

Document topic_document(const RawTweet& tweet, const StopwordSet& stopwords) {
  return meaningful_tokens(preprocess(tweet.text, tweet.id), stopwords);
}

PretrainTask build_topic_task(std::span<const RawTweet> tweets, const LdaModel& model, const StopwordSet& stopwords,
                              const InferOptions& infer) {
  PretrainTask task;
  task.kind = PretrainKind::topic;
  for (int t = 0; t < model.topics; ++t) task.label_space.push_back("topic" + std::to_string(t));
  for (const auto& t : tweets) {
    auto tokens = preprocess(t.text, t.id);
    auto doc = meaningful_tokens(tokens, stopwords);
    if (doc.size() < 2) continue;
    task.examples.push_back({std::move(tokens), t.mentions, majority_topic(model, doc, infer)});
  }
  return task;
}

std::vector<Sample> featurize(const PretrainTask& task, const Featurizer& featurizer) {
  std::vector<Sample> out;
  out.reserve(task.examples.size());
  for (const auto& e : task.examples) out.push_back(featurizer.make(e.tweet, e.mentions, e.label));
  return out;
}

namespace {

double dataset_loss(const NetworkParams& params, std::span<const Sample> samples, std::size_t batch_size) {
  double total = 0.0;
  for (const auto& batch : make_batches(samples, batch_size)) {
    auto result = forward(params, batch, Mode::eval);
    auto labels = batch.labels();
    total += loss(result.probs, labels) * static_cast<double>(batch.size());
  }
  return samples.empty() ? 0.0 : total / static_cast<double>(samples.size());
}

}  // namespace

PretrainResult pretrain(const PretrainTask& task, NetworkParams params, const Featurizer& featurizer,
                        const TrainOptions& options) {
  if (params.config.n_classes != task.label_space.size())
    throw DataError("network head has " + std::to_string(params.config.n_classes) + " outputs but the task has " +
                    std::to_string(task.label_space.size()) + " labels");
  if (task.examples.empty()) throw DataError("pre-training task has no examples");

  const auto samples = featurize(task, featurizer);
  PretrainResult result;
  result.initial_loss = dataset_loss(params, samples, options.batch_size);

  const FreezeMask all = FreezeMask::all();
  auto state = OptimizerState::fresh(params.config, options.optimizer);
  Rng order_rng(derive_seed(options.seed, 1));
  std::uint64_t step_counter = 0;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (const auto& batch : make_batches(samples, options.batch_size, &order_rng)) {
      auto fwd = forward(params, batch, Mode::train, derive_seed(options.seed, 1000 + step_counter++));
      auto labels = batch.labels();
      epoch_loss += loss(fwd.probs, labels) * static_cast<double>(batch.size());
      auto grads = backward(params, batch, fwd.cache, all);
      step(params, grads, state, all);
    }
    result.epoch_losses.push_back(epoch_loss / static_cast<double>(samples.size()));
  }
  result.params = std::move(params);
  return result;
}

FreezeSchedule make_schedule(Strategy strategy, std::size_t max_epochs) {
  const std::size_t e = std::max<std::size_t>(max_epochs, 1);
  FreezeSchedule s;
  switch (strategy) {
    case Strategy::none:
      s.phases = {{FreezeMask::all(), e, true}};
      break;
    case Strategy::gu:
      s.phases = {{{4}, 1, false},
                  {{3, 4}, 1, false},
                  {{2, 3, 4}, 1, false},
                  {FreezeMask::all(), e > 3 ? e - 3 : 1, true}};
      break;
    case Strategy::bu:
      s.phases = {{{4}, e, true}, {{1}, e, true}, {{2}, e, true}, {{3}, e, true}, {FreezeMask::all(), e, true}};
      break;
    case Strategy::tu:
      s.phases = {{{4}, e, true}, {{3}, e, true}, {{2}, e, true}, {{1}, e, true}, {FreezeMask::all(), e, true}};
      break;
  }
  return s;
}

std::vector<int> predict(const NetworkParams& params, std::span<const Sample> samples, std::size_t batch_size) {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const auto& batch : make_batches(samples, batch_size)) {
    auto result = forward(params, batch, Mode::eval);
    for (Eigen::Index b = 0; b < result.probs.cols(); ++b) {
      Eigen::Index best = 0;
      result.probs.col(b).maxCoeff(&best);
      out.push_back(static_cast<int>(best));
    }
  }
  return out;
}

double score(Metric metric, std::span<const int> preds, std::span<const int> golds, std::size_t n_classes,
             int positive) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < n_classes; ++c) names.push_back(std::to_string(c));
  if (metric == Metric::binary_f1) return binary_metrics(preds, golds, positive, names).averaged.f1;
  return macro_metrics(preds, golds, names).averaged.f1;
}

FinetuneResult finetune(NetworkParams params, const FreezeSchedule& schedule, std::span<const Sample> train,
                        std::span<const Sample> validation, const FinetuneOptions& options) {
  if (schedule.phases.empty()) throw DataError("freeze schedule has no phases");
  if (validation.empty()) throw DataError("fine-tuning needs a non-empty validation set");
  if (train.empty()) throw DataError("fine-tuning needs training data");
  for (const auto& phase : schedule.phases)
    if (phase.trainable.empty()) throw DataError("schedule phase without trainable layers");

  std::vector<int> golds;
  for (const auto& s : validation) golds.push_back(s.label);
  const std::size_t n_classes = params.config.n_classes;

  FinetuneResult result;
  Rng order_rng(derive_seed(options.seed, 1));
  std::uint64_t step_counter = 0;
  auto notify = [&](PhaseEvent ev, std::size_t phase) {
    if (options.observer) options.observer(ev, phase, params);
  };

  for (std::size_t p = 0; p < schedule.phases.size(); ++p) {
    const Phase& phase = schedule.phases[p];
    PhaseRecord record;
    record.trainable = phase.trainable;
    notify(PhaseEvent::begin, p);

    auto state = OptimizerState::fresh(params.config, options.optimizer);
    NetworkParams best = params;
    double best_metric = -1.0;
    for (std::size_t epoch = 1; epoch <= phase.max_epochs; ++epoch) {
      for (const auto& batch : make_batches(train, options.batch_size, &order_rng)) {
        auto fwd = forward(params, batch, Mode::train, derive_seed(options.seed, 1000 + step_counter++));
        auto grads = backward(params, batch, fwd.cache, phase.trainable);
        step(params, grads, state, phase.trainable);
      }
      const auto preds = predict(params, validation, options.eval_batch_size);
      const double metric = score(options.metric, preds, golds, n_classes, options.positive);
      record.history.push_back(metric);
      notify(PhaseEvent::epoch_end, p);
      if (!phase.select_best || metric > best_metric) {
        best_metric = metric;
        best = params;
        record.selected_epoch = epoch;
      }
    }
    params = std::move(best);
    result.best_metric = best_metric;
    result.phases.push_back(std::move(record));
    notify(PhaseEvent::end, p);
  }
  result.best_params = std::move(params);
  return result;
}

}  // namespace otl
