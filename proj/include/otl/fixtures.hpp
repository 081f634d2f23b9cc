#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "otl/corpus.hpp"
#include "otl/embed.hpp"
#include "otl/lda.hpp"
#include "otl/transfer.hpp"

namespace otl::fixtures {

// Letter-only pseudo-word, distinct for distinct n (consonant-vowel syllables).
std::string pseudo_word(std::size_t n);

// Documents drawn from disjoint per-topic vocabularies; topics[d] is the
// planted topic of document d.
struct PlantedCorpus {
  std::vector<Document> docs;
  std::vector<int> topics;
  std::vector<std::vector<std::string>> vocab;
};
PlantedCorpus planted_topics(std::size_t docs = 200, std::size_t doc_len = 20, int topics = 2,
                             std::size_t vocab_per_topic = 50, std::uint64_t seed = 1);

// Tweets on two planted topics; the binary label follows the topic
// (topic 0 is offense). raw and labeled hold the same texts in the same order.
struct SmokeCorpus {
  std::vector<RawTweet> raw;
  std::vector<LabeledTweet> labeled;
  std::vector<int> topics;
  std::vector<std::vector<std::string>> vocab;
};
SmokeCorpus transfer_smoke(std::size_t tweets = 500, std::size_t vocab_per_topic = 150,
                           std::size_t words_per_tweet = 8, std::uint64_t seed = 1);

// Two classes with disjoint small vocabularies, alternating labels.
std::vector<LabeledTweet> separable_labeled(std::size_t n = 64, std::size_t vocab_per_class = 12,
                                            std::uint64_t seed = 1);

// Mention lists drawn from disjoint user cliques.
struct CliqueCorpus {
  std::vector<RawTweet> tweets;
  std::map<std::string, int> clique_of;
};
CliqueCorpus mention_cliques(std::size_t users = 60, int cliques = 3, std::size_t lists = 600,
                             std::uint64_t seed = 1);

// Tweets with a known emoji multiset. expected_examples is the sum over
// tweets of the number of distinct emoji types drawn for it.
struct EmojiFixture {
  std::vector<RawTweet> tweets;
  std::vector<std::vector<std::string>> drawn;  // per tweet, with repeats
  std::size_t expected_examples = 0;
  std::vector<std::string> pool;
};
EmojiFixture emoji_tweets(std::size_t tweets = 100, std::uint64_t seed = 1);

std::vector<CommentRecord> category_comments(std::size_t n = 60, std::uint64_t seed = 1);

// Distinct tweets plus near-copies that normalize to an earlier text.
struct DuplicateFixture {
  std::vector<RawTweet> tweets;
  std::size_t planted = 0;
};
DuplicateFixture duplicates(std::size_t unique = 900, std::size_t planted = 100, std::uint64_t seed = 1);

// Random word vectors, uniform in [-1, 1).
EmbeddingTable random_vectors(std::span<const std::string> words, std::size_t dim, std::uint64_t seed);
// Text format with a `count dim` header, words sorted.
void save_vectors(const EmbeddingTable& table, const std::filesystem::path& path);

// Writes every fixture plus truth files into `dir`; returns the file names.
std::vector<std::string> write_all(const std::filesystem::path& dir, std::uint64_t seed, std::size_t dim = 50);

}  // namespace otl::fixtures
