#include "otl/features.hpp"

#include <numeric>

#include "otl/error.hpp"

namespace otl {

Featurizer::Featurizer(const EmbeddingTable& embeddings, const UserClusters* clusters, std::size_t cluster_width,
                       std::size_t max_seq_len)
    : embeddings_(embeddings), clusters_(clusters), cluster_width_(cluster_width), max_seq_len_(max_seq_len) {
  if (clusters_ && cluster_width_ < static_cast<std::size_t>(clusters_->topics) + 1)
    throw DataError("cluster feature width " + std::to_string(cluster_width_) + " cannot hold " +
                    std::to_string(clusters_->topics) + " clusters plus the unknown slot");
}

Vector Featurizer::cluster_features(std::span<const std::string> mentions) const {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(cluster_width_));
  if (cluster_width_ == 0) return v;
  const auto unknown = static_cast<Eigen::Index>(cluster_width_ - 1);
  for (const auto& user : mentions) {
    if (clusters_) {
      if (auto it = clusters_->cluster_of.find(user); it != clusters_->cluster_of.end()) {
        v[it->second] = 1.0;
        continue;
      }
    }
    v[unknown] = 1.0;
  }
  return v;
}

Sample Featurizer::make(const TokenizedTweet& tweet, std::span<const std::string> mentions, int label) const {
  Sample s;
  s.length = std::min(tweet.tokens.size(), max_seq_len_);
  if (tweet.tokens.size() > max_seq_len_) ++truncated_;
  s.tokens.resize(static_cast<Eigen::Index>(embeddings_.dim()), static_cast<Eigen::Index>(s.length));
  for (std::size_t t = 0; t < s.length; ++t) s.tokens.col(static_cast<Eigen::Index>(t)) = embeddings_.embed(tweet.tokens[t]);
  s.clusters = cluster_features(mentions);
  s.label = label;
  return s;
}

std::vector<Sample> featurize(std::span<const LabeledTweet> tweets, Task task, const Featurizer& featurizer) {
  std::vector<Sample> out;
  out.reserve(tweets.size());
  for (const auto& t : tweets) {
    auto mentions = extract_mentions(t.text);
    out.push_back(featurizer.make(preprocess(t.text, t.id), mentions, label_id(t, task)));
  }
  return out;
}

std::vector<Batch> make_batches(std::span<const Sample> samples, std::size_t batch_size, Rng* shuffle_rng) {
  if (batch_size == 0) throw DataError("batch size must be positive");
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  if (shuffle_rng) shuffle(order.begin(), order.end(), *shuffle_rng);
  std::vector<Batch> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    Batch b;
    for (std::size_t i = start; i < std::min(order.size(), start + batch_size); ++i) b.samples.push_back(&samples[order[i]]);
    batches.push_back(std::move(b));
  }
  return batches;
}

}  // namespace otl
