#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "otl/textprep.hpp"

namespace otl {

using Vector = Eigen::VectorXd;

struct EmbeddingConfig {
  std::size_t dim = 300;
  std::size_t buckets = std::size_t{1} << 18;
  int ngram_min = 3;
  int ngram_max = 6;
  std::uint64_t seed = 0;
};

// 64-bit FNV-1a over the UTF-8 bytes.
std::uint64_t fnv1a64(std::string_view bytes);

// Character n-grams (by code point) of `<token>` for n in [n_min, n_max],
// ordered by start position, then by length.
std::vector<std::string> char_ngrams(std::string_view token, int n_min, int n_max);

// Pre-trained word vectors plus hashed character n-gram buckets for
// out-of-vocabulary tokens. Bucket vectors are random but fixed: bucket b is
// generated on demand from (seed, b), uniform in [-0.5/dim, 0.5/dim), so the
// B x dim matrix is never materialized. Immutable once loaded.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(EmbeddingConfig config = {});

  // Text vector format `word v1 ... vd`, optional `count dim` header line.
  // The dimension is taken from the file; `config.dim` applies to empty files.
  static EmbeddingTable load(const std::filesystem::path& path, EmbeddingConfig config = {});

  void add_word(std::string word, Vector vec);

  std::size_t dim() const { return config_.dim; }
  const EmbeddingConfig& config() const { return config_; }
  std::size_t size() const { return words_.size(); }
  bool contains(std::string_view token) const;
  const std::unordered_map<std::string, Vector>& words() const { return words_; }

  Vector bucket_vector(std::size_t bucket) const;
  std::size_t bucket_of(std::string_view ngram) const { return fnv1a64(ngram) % config_.buckets; }

  // Stored vector for known words, otherwise the mean of the token's n-gram
  // bucket vectors.
  Vector embed(std::string_view token) const;

 private:
  EmbeddingConfig config_;
  std::unordered_map<std::string, Vector> words_;
};

class IdfTable {
 public:
  IdfTable() = default;
  IdfTable(std::size_t doc_count, std::unordered_map<std::string, std::size_t> df);

  std::size_t doc_count() const { return doc_count_; }
  std::size_t df(std::string_view token) const;
  // ln(doc_count / df); unseen tokens get ln(doc_count).
  double idf(std::string_view token) const;
  const std::unordered_map<std::string, std::size_t>& table() const { return df_; }

 private:
  std::size_t doc_count_ = 0;
  std::unordered_map<std::string, std::size_t> df_;
};

IdfTable compute_idf(std::span<const TokenizedTweet> docs);

// IDF-weighted mean of token embeddings; zero vector when all weights vanish.
Vector idf_weighted_vector(const EmbeddingTable& table, const IdfTable& idf, const TokenizedTweet& tweet);

}  // namespace otl
