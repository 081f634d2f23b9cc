#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace otl {

using Document = std::vector<std::string>;

// Collapsed Gibbs LDA state. Count matrices are row-major:
// topic_word[t * V + w], doc_topic[d * K + t].
struct LdaModel {
  int topics = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> vocab;
  std::unordered_map<std::string, int> word_index;
  std::vector<long> topic_word;
  std::vector<long> topic_totals;
  std::vector<long> doc_topic;                 // empty for a loaded checkpoint
  std::vector<std::vector<int>> assignments;   // per doc, per token
  std::vector<std::vector<int>> doc_words;     // word ids per doc, same shape

  std::size_t vocab_size() const { return vocab.size(); }
  long n_tw(int t, int w) const { return topic_word[static_cast<std::size_t>(t) * vocab.size() + static_cast<std::size_t>(w)]; }
  int index_of(const std::string& word) const;  // -1 when unknown
};

struct LdaOptions {
  int topics = 20;
  double alpha = 0.0;  // 0 selects 10 / topics
  double beta = 0.01;
  int iterations = 1000;
  std::uint64_t seed = 7;
  // Called after every sweep (1-based), e.g. to check count invariants.
  std::function<void(int sweep, const LdaModel&)> on_sweep;
};

struct InferOptions {
  int iterations = 50;
  int burn_in = 25;
  std::uint64_t seed = 0;
};

LdaModel train_gibbs(std::span<const Document> docs, const LdaOptions& options);

// Empty string when the count invariants hold, otherwise a description of
// the first violation.
std::string check_counts(const LdaModel& model);

// Fold-in Gibbs over doc-local counts with the model frozen. Unknown tokens
// are skipped; a document without known tokens gets the uniform distribution.
std::vector<double> infer_doc_topics(const LdaModel& model, std::span<const std::string> doc,
                                     const InferOptions& options = {});

// Index of the maximum; ties go to the lowest index.
int argmax_lowest(std::span<const double> values);
int majority_topic(const LdaModel& model, std::span<const std::string> doc, const InferOptions& options = {});

// Versioned text checkpoint holding K, alpha, beta, seed, vocab and n_tw
// (n_t is recomputed and verified on load).
void save_lda(const LdaModel& model, const std::filesystem::path& path);
LdaModel load_lda(const std::filesystem::path& path);

struct UserClusters {
  int topics = 0;
  std::map<std::string, int> cluster_of;
};

// Treats each mention list as a document of user ids and assigns each user
// its most probable topic, argmax_t n_tw[t][u] (ties to the lowest id).
UserClusters cluster_users(std::span<const Document> mention_lists, LdaOptions options);

// TSV `user<TAB>cluster`, sorted by user. The file does not carry K; pass
// the expected cluster count to validate ids (0 infers max id + 1).
void save_clusters(const UserClusters& clusters, const std::filesystem::path& path);
UserClusters load_clusters(const std::filesystem::path& path, int topics = 0);

}  // namespace otl
