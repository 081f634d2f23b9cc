#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace otl {

inline constexpr std::string_view kUserToken = "<user>";
inline constexpr std::string_view kUrlToken = "<url>";

struct TokenizedTweet {
  std::vector<std::string> tokens;
  std::string source_id;

  friend bool operator==(const TokenizedTweet&, const TokenizedTweet&) = default;
};

using StopwordSet = std::unordered_set<std::string>;

// Replaces URLs (http://, https://, www. at a word start) with <url> and
// @-mentions with <user>, then lowercases. Idempotent.
std::string normalize(std::string_view text);

// Splits normalized text where the character class changes
// (letter / digit / symbol / emoji / whitespace). Whitespace is dropped, every
// emoji sequence is its own token, and <user> / <url> are atomic.
TokenizedTweet tokenize(std::string_view normalized, std::string source_id = {});

// normalize + tokenize.
TokenizedTweet preprocess(std::string_view raw_text, std::string source_id = {});

// Removes every emoji sequence from the text.
std::string strip_emojis(std::string_view text);

// Letter or digit tokens that are neither stopwords nor placeholders.
std::vector<std::string> meaningful_tokens(const TokenizedTweet& tweet, const StopwordSet& stopwords);

// One word per line; blank lines and `#` comments skipped; entries lowercased.
StopwordSet load_stopwords(const std::filesystem::path& path);
std::filesystem::path default_stopwords_path();

}  // namespace otl
