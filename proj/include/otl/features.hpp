#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "otl/corpus.hpp"
#include "otl/embed.hpp"
#include "otl/lda.hpp"
#include "otl/net.hpp"
#include "otl/random.hpp"
#include "otl/textprep.hpp"

namespace otl {

// Turns tokenized tweets into network samples: frozen token embeddings
// (sequence capped at max_seq_len) plus a multi-hot vector over the clusters
// of mentioned users whose last slot flags users without a cluster.
class Featurizer {
 public:
  Featurizer(const EmbeddingTable& embeddings, const UserClusters* clusters, std::size_t cluster_width,
             std::size_t max_seq_len = 100);

  Sample make(const TokenizedTweet& tweet, std::span<const std::string> mentions, int label) const;
  Vector cluster_features(std::span<const std::string> mentions) const;

  std::size_t cluster_width() const { return cluster_width_; }
  // Number of samples cut to max_seq_len so far.
  std::size_t truncated() const { return truncated_; }

 private:
  const EmbeddingTable& embeddings_;
  const UserClusters* clusters_;
  std::size_t cluster_width_;
  std::size_t max_seq_len_;
  mutable std::size_t truncated_ = 0;
};

std::vector<Sample> featurize(std::span<const LabeledTweet> tweets, Task task, const Featurizer& featurizer);

// Consecutive batches over `samples`; with a generator the order is shuffled first.
std::vector<Batch> make_batches(std::span<const Sample> samples, std::size_t batch_size, Rng* shuffle_rng = nullptr);

}  // namespace otl
