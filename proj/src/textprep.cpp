#include "otl/textprep.hpp"

#include <fstream>

#include "otl/error.hpp"
#include "otl/unicode.hpp"

namespace otl {

namespace {

using unicode::CharClass;

bool is_word_char(char32_t c) { return unicode::is_letter(c) || unicode::is_digit(c) || c == U'_'; }

char32_t ascii_lower(char32_t c) { return (c >= U'A' && c <= U'Z') ? c + 32 : c; }

bool starts_with_ci(std::u32string_view s, std::size_t pos, std::u32string_view prefix) {
  if (pos + prefix.size() > s.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k)
    if (ascii_lower(s[pos + k]) != prefix[k]) return false;
  return true;
}

// Length of the URL prefix at `pos`, or 0.
std::size_t url_prefix(std::u32string_view s, std::size_t pos) {
  if (pos > 0 && is_word_char(s[pos - 1])) return 0;
  for (std::u32string_view p : {U"https://", U"http://", U"www."})
    if (starts_with_ci(s, pos, p)) return p.size();
  return 0;
}

bool is_handle_char(char32_t c) {
  return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9') || c == U'_';
}

}  // namespace

std::string normalize(std::string_view text) {
  // Lowercasing first keeps the replacement pass idempotent: case mapping can
  // turn a non-handle character (U+0130) into an ASCII handle character.
  auto cps = unicode::decode_utf8(text);
  for (char32_t& c : cps) c = unicode::to_lower(c);
  std::u32string out;
  out.reserve(cps.size());
  const std::size_t n = cps.size();
  std::size_t i = 0;
  while (i < n) {
    if (auto p = url_prefix(cps, i); p > 0 && i + p < n && !unicode::is_space(cps[i + p])) {
      std::size_t j = i + p;
      while (j < n && !unicode::is_space(cps[j])) ++j;
      out += U"<url>";
      i = j;
      continue;
    }
    if (cps[i] == U'@') {
      std::size_t j = i + 1;
      while (j < n && is_handle_char(cps[j])) ++j;
      if (j > i + 1) {
        out += U"<user>";
        i = j;
        continue;
      }
    }
    out.push_back(cps[i]);
    ++i;
  }
  return unicode::encode_utf8(out);
}

TokenizedTweet tokenize(std::string_view normalized, std::string source_id) {
  TokenizedTweet result;
  result.source_id = std::move(source_id);
  auto cps = unicode::decode_utf8(normalized);
  const std::size_t n = cps.size();

  std::u32string current;
  CharClass current_class = CharClass::space;
  auto flush = [&] {
    if (!current.empty()) result.tokens.push_back(unicode::encode_utf8(current));
    current.clear();
    current_class = CharClass::space;
  };

  std::size_t i = 0;
  while (i < n) {
    if (cps[i] == U'<') {
      std::u32string_view rest = std::u32string_view(cps).substr(i);
      std::size_t len = 0;
      if (rest.starts_with(U"<user>")) len = 6;
      else if (rest.starts_with(U"<url>")) len = 5;
      if (len > 0) {
        flush();
        result.tokens.push_back(unicode::encode_utf8(rest.substr(0, len)));
        i += len;
        continue;
      }
    }
    char32_t c = cps[i];
    if (unicode::is_emoji_base(c)) {
      flush();
      auto end = unicode::emoji_sequence_end(cps, i);
      result.tokens.push_back(unicode::encode_utf8(std::u32string_view(cps).substr(i, end - i)));
      i = end;
      continue;
    }
    CharClass cls = unicode::classify(c);
    if (cls == CharClass::space) {
      flush();
    } else if (cls == CharClass::extend && !current.empty()) {
      current.push_back(c);
    } else {
      if (cls == CharClass::extend) cls = CharClass::symbol;
      if (cls != current_class) flush();
      current.push_back(c);
      current_class = cls;
    }
    ++i;
  }
  flush();
  return result;
}

TokenizedTweet preprocess(std::string_view raw_text, std::string source_id) {
  return tokenize(normalize(raw_text), std::move(source_id));
}

std::string strip_emojis(std::string_view text) {
  auto cps = unicode::decode_utf8(text);
  std::u32string out;
  out.reserve(cps.size());
  for (std::size_t i = 0; i < cps.size();) {
    if (unicode::is_emoji_base(cps[i])) {
      i = unicode::emoji_sequence_end(cps, i);
    } else {
      out.push_back(cps[i]);
      ++i;
    }
  }
  return unicode::encode_utf8(out);
}

std::vector<std::string> meaningful_tokens(const TokenizedTweet& tweet, const StopwordSet& stopwords) {
  std::vector<std::string> out;
  for (const auto& tok : tweet.tokens) {
    if (tok == kUserToken || tok == kUrlToken || stopwords.contains(tok)) continue;
    auto cps = unicode::decode_utf8(tok);
    if (cps.empty()) continue;
    auto cls = unicode::classify(cps.front());
    if (cls == CharClass::letter || cls == CharClass::digit) out.push_back(tok);
  }
  return out;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open stopword file " + path.string());
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    words.insert(unicode::to_lower(line));
  }
  return words;
}

std::filesystem::path default_stopwords_path() {
  return std::filesystem::path(OTL_DATA_DIR) / "stopwords_de.txt";
}

}  // namespace otl
