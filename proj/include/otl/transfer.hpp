#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "otl/corpus.hpp"
#include "otl/features.hpp"
#include "otl/lda.hpp"
#include "otl/net.hpp"
#include "otl/optimizer.hpp"
#include "otl/textprep.hpp"

namespace otl {

enum class PretrainKind { category, emoji, topic };
enum class Strategy { none, gu, bu, tu };
enum class Metric { binary_f1, macro_f1 };

PretrainKind parse_pretrain_kind(std::string_view name);
Strategy parse_strategy(std::string_view name);
Metric parse_metric(std::string_view name);
std::string_view to_string(Strategy s);

struct PretrainExample {
  TokenizedTweet tweet;
  std::vector<std::string> mentions;
  int label = 0;
};

struct PretrainTask {
  PretrainKind kind = PretrainKind::topic;
  std::vector<PretrainExample> examples;
  std::vector<std::string> label_space;
  std::size_t batch_size = 128;
  std::size_t epochs = 10;
};

// One annotator's judgement of a comment.
struct Annotation {
  bool inappropriate = false;
  bool discriminating = false;
};

struct CommentRecord {
  std::string id;
  std::string text;
  std::vector<Annotation> annotations;
};

// JSON lines: {"id": ..., "text": ..., "annotations": [{"inappropriate": bool,
// "discriminating": bool}, ...]}.
std::vector<CommentRecord> parse_comments(std::istream& in);
std::vector<CommentRecord> load_comments(const std::filesystem::path& path);
void write_comments(std::ostream& out, std::span<const CommentRecord> comments);

// offense when a strict majority of annotators flag the comment as
// inappropriate or discriminating, otherwise other.
PretrainTask build_category_task(std::span<const CommentRecord> comments);

// One example per distinct emoji of each tweet, with every emoji stripped
// from the text. Labels index the corpus-wide emoji list (first-seen order).
PretrainTask build_emoji_task(std::span<const RawTweet> tweets);

// The LDA document for a tweet: its meaningful tokens.
Document topic_document(const RawTweet& tweet, const StopwordSet& stopwords);

// Majority-topic labels for tweets with at least two meaningful tokens.
PretrainTask build_topic_task(std::span<const RawTweet> tweets, const LdaModel& model, const StopwordSet& stopwords,
                              const InferOptions& infer = {});

struct TrainOptions {
  NadamConfig optimizer;
  std::size_t batch_size = 128;
  std::size_t epochs = 10;
  std::uint64_t seed = 1;
};

struct PretrainResult {
  NetworkParams params;
  double initial_loss = 0.0;          // eval-mode loss before the first update
  std::vector<double> epoch_losses;   // mean training loss per epoch
};

std::vector<Sample> featurize(const PretrainTask& task, const Featurizer& featurizer);

// Trains every layer on the pre-training task.
PretrainResult pretrain(const PretrainTask& task, NetworkParams params, const Featurizer& featurizer,
                        const TrainOptions& options);

struct Phase {
  FreezeMask trainable;
  std::size_t max_epochs = 0;
  bool select_best = false;
};

struct FreezeSchedule {
  std::vector<Phase> phases;
};

FreezeSchedule make_schedule(Strategy strategy, std::size_t max_epochs = 50);

struct PhaseRecord {
  FreezeMask trainable;
  std::vector<double> history;  // validation metric after each epoch
  std::size_t selected_epoch = 0;  // 1-based; last epoch when not selecting
};

struct FinetuneResult {
  NetworkParams best_params;
  std::vector<PhaseRecord> phases;
  double best_metric = 0.0;
};

enum class PhaseEvent { begin, epoch_end, end };

struct FinetuneOptions {
  Metric metric = Metric::binary_f1;
  int positive = 0;
  std::size_t batch_size = 32;
  std::size_t eval_batch_size = 128;
  NadamConfig optimizer;
  std::uint64_t seed = 1;
  // Observer hook, called with the phase index and current parameters.
  std::function<void(PhaseEvent, std::size_t phase, const NetworkParams&)> observer;
};

// Runs the schedule phase by phase. Optimizer moments are reset at each phase
// boundary. Phases with select_best keep the epoch snapshot with the highest
// validation metric (earliest on ties) and hand it to the next phase.
FinetuneResult finetune(NetworkParams params, const FreezeSchedule& schedule, std::span<const Sample> train,
                        std::span<const Sample> validation, const FinetuneOptions& options);

std::vector<int> predict(const NetworkParams& params, std::span<const Sample> samples, std::size_t batch_size = 128);
double score(Metric metric, std::span<const int> preds, std::span<const int> golds, std::size_t n_classes,
             int positive);

}  // namespace otl
