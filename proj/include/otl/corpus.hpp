#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace otl {

enum class Coarse { offense, other };
enum class Fine { insult, profanity, abuse, other };
enum class Task { coarse, fine };

// Invariant: fine == other iff coarse == other; text is non-empty.
struct LabeledTweet {
  std::string id;
  std::string text;
  Coarse coarse = Coarse::other;
  Fine fine = Fine::other;

  friend bool operator==(const LabeledTweet&, const LabeledTweet&) = default;
};

struct RawTweet {
  std::string id;
  std::string text;
  std::vector<std::string> mentions;  // in order of occurrence
  std::vector<std::string> emojis;    // distinct, in order of first occurrence

  friend bool operator==(const RawTweet&, const RawTweet&) = default;
};

struct DatasetSplit {
  std::vector<LabeledTweet> train;
  std::vector<LabeledTweet> validation;
};

std::string_view to_string(Coarse c);
std::string_view to_string(Fine f);
std::string_view to_string(Task t);
Task parse_task(std::string_view name);

// Class names in label-id order. Coarse: offense=0, other=1.
// Fine: insult=0, profanity=1, abuse=2, other=3.
std::vector<std::string> class_names(Task task);
int label_id(const LabeledTweet& tweet, Task task);

// UTF-8 TSV `text<TAB>coarse<TAB>fine`. Ids are assigned from 1-based line
// numbers. Label tokens are matched case-insensitively.
std::vector<LabeledTweet> parse_labeled(std::istream& in);
std::vector<LabeledTweet> load_labeled(const std::filesystem::path& path);
void write_labeled(std::ostream& out, std::span<const LabeledTweet> tweets);
void save_labeled(const std::filesystem::path& path, std::span<const LabeledTweet> tweets);

DatasetSplit split_tail(std::span<const LabeledTweet> data, std::size_t tail);

// `@` followed by one or more ASCII letters, digits or underscores.
std::vector<std::string> extract_mentions(std::string_view text);
// Distinct emoji sequences in order of first appearance.
std::vector<std::string> extract_emojis(std::string_view text);
RawTweet make_raw_tweet(std::string id, std::string text);

// One JSON object per line with string fields `id` and `text`.
std::vector<RawTweet> parse_raw(std::istream& in);
std::vector<RawTweet> load_raw(const std::filesystem::path& path);
void write_raw(std::ostream& out, std::span<const RawTweet> tweets);

// Keeps the first tweet for each normalized text.
std::vector<RawTweet> deduplicate(std::span<const RawTweet> tweets);

// Mention lists of tweets with at least `min_mentions` mentions whose users
// all occur at least `min_user_freq` times across the whole corpus.
std::vector<std::vector<std::string>> extract_mention_lists(std::span<const RawTweet> tweets,
                                                            std::size_t min_mentions = 2,
                                                            std::size_t min_user_freq = 5);

}  // namespace otl
