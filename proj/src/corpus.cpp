#include "otl/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "otl/error.hpp"
#include "otl/textprep.hpp"
#include "otl/unicode.hpp"

namespace otl {

namespace {

bool is_handle_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  return out;
}

Coarse parse_coarse(std::string_view token, std::size_t line) {
  auto t = lower_ascii(token);
  if (t == "offense") return Coarse::offense;
  if (t == "other") return Coarse::other;
  throw DataError("line " + std::to_string(line) + ": unknown coarse label '" + std::string(token) + "'");
}

Fine parse_fine(std::string_view token, std::size_t line) {
  auto t = lower_ascii(token);
  if (t == "insult") return Fine::insult;
  if (t == "profanity") return Fine::profanity;
  if (t == "abuse") return Fine::abuse;
  if (t == "other") return Fine::other;
  throw DataError("line " + std::to_string(line) + ": unknown fine label '" + std::string(token) + "'");
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

}  // namespace

std::string_view to_string(Coarse c) { return c == Coarse::offense ? "offense" : "other"; }

std::string_view to_string(Fine f) {
  switch (f) {
    case Fine::insult: return "insult";
    case Fine::profanity: return "profanity";
    case Fine::abuse: return "abuse";
    case Fine::other: return "other";
  }
  return "other";
}

std::string_view to_string(Task t) { return t == Task::coarse ? "coarse" : "fine"; }

Task parse_task(std::string_view name) {
  if (name == "coarse") return Task::coarse;
  if (name == "fine") return Task::fine;
  throw DataError("unknown task '" + std::string(name) + "'");
}

std::vector<std::string> class_names(Task task) {
  if (task == Task::coarse) return {"offense", "other"};
  return {"insult", "profanity", "abuse", "other"};
}

int label_id(const LabeledTweet& tweet, Task task) {
  return task == Task::coarse ? static_cast<int>(tweet.coarse) : static_cast<int>(tweet.fine);
}

std::vector<LabeledTweet> parse_labeled(std::istream& in) {
  std::vector<LabeledTweet> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos)
      throw DataError("line " + std::to_string(line_no) + ": expected 3 tab-separated fields");
    LabeledTweet tweet;
    tweet.id = std::to_string(line_no);
    tweet.text = line.substr(0, t1);
    if (tweet.text.empty()) throw DataError("line " + std::to_string(line_no) + ": empty text");
    tweet.coarse = parse_coarse(std::string_view(line).substr(t1 + 1, t2 - t1 - 1), line_no);
    tweet.fine = parse_fine(std::string_view(line).substr(t2 + 1), line_no);
    if ((tweet.fine == Fine::other) != (tweet.coarse == Coarse::other))
      throw DataError("line " + std::to_string(line_no) + ": coarse and fine labels disagree");
    out.push_back(std::move(tweet));
  }
  return out;
}

std::vector<LabeledTweet> load_labeled(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_labeled(in);
}

void write_labeled(std::ostream& out, std::span<const LabeledTweet> tweets) {
  for (const auto& t : tweets) {
    if (t.text.empty() || t.text.find_first_of("\t\n\r") != std::string::npos)
      throw DataError("tweet " + t.id + ": text is empty or contains tab/newline");
    out << t.text << '\t' << to_string(t.coarse) << '\t' << to_string(t.fine) << '\n';
  }
}

void save_labeled(const std::filesystem::path& path, std::span<const LabeledTweet> tweets) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_labeled(out, tweets);
}

DatasetSplit split_tail(std::span<const LabeledTweet> data, std::size_t tail) {
  if (tail > data.size())
    throw DataError("tail " + std::to_string(tail) + " exceeds dataset size " +
                    std::to_string(data.size()));
  auto cut = data.size() - tail;
  return {{data.begin(), data.begin() + static_cast<std::ptrdiff_t>(cut)},
          {data.begin() + static_cast<std::ptrdiff_t>(cut), data.end()}};
}

std::vector<std::string> extract_mentions(std::string_view text) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '@') continue;
    std::size_t j = i + 1;
    while (j < text.size() && is_handle_char(text[j])) ++j;
    if (j > i + 1) {
      out.emplace_back(text.substr(i + 1, j - i - 1));
      i = j - 1;
    }
  }
  return out;
}

std::vector<std::string> extract_emojis(std::string_view text) {
  auto cps = unicode::decode_utf8(text);
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < cps.size();) {
    if (unicode::is_emoji_base(cps[i])) {
      auto end = unicode::emoji_sequence_end(cps, i);
      auto e = unicode::encode_utf8(std::u32string_view(cps).substr(i, end - i));
      if (seen.insert(e).second) out.push_back(std::move(e));
      i = end;
    } else {
      ++i;
    }
  }
  return out;
}

RawTweet make_raw_tweet(std::string id, std::string text) {
  RawTweet t;
  t.id = std::move(id);
  t.text = std::move(text);
  t.mentions = extract_mentions(t.text);
  t.emojis = extract_emojis(t.text);
  return t;
}

std::vector<RawTweet> parse_raw(std::istream& in) {
  std::vector<RawTweet> out;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++record;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError("record " + std::to_string(record) + ": invalid JSON");
    }
    if (!j.is_object()) throw DataError("record " + std::to_string(record) + ": not an object");
    for (const char* field : {"id", "text"}) {
      if (!j.contains(field) || !j[field].is_string())
        throw DataError("record " + std::to_string(record) + ": missing string field '" + field + "'");
    }
    auto id = j["id"].get<std::string>();
    if (!ids.insert(id).second)
      throw DataError("record " + std::to_string(record) + ": duplicate id '" + id + "'");
    out.push_back(make_raw_tweet(std::move(id), j["text"].get<std::string>()));
  }
  return out;
}

std::vector<RawTweet> load_raw(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_raw(in);
}

void write_raw(std::ostream& out, std::span<const RawTweet> tweets) {
  for (const auto& t : tweets) out << nlohmann::json{{"id", t.id}, {"text", t.text}}.dump() << '\n';
}

std::vector<RawTweet> deduplicate(std::span<const RawTweet> tweets) {
  std::vector<RawTweet> out;
  std::unordered_set<std::string> seen;
  for (const auto& t : tweets)
    if (seen.insert(normalize(t.text)).second) out.push_back(t);
  return out;
}

std::vector<std::vector<std::string>> extract_mention_lists(std::span<const RawTweet> tweets,
                                                            std::size_t min_mentions,
                                                            std::size_t min_user_freq) {
  if (min_mentions < 1) throw DataError("min_mentions must be at least 1");
  std::unordered_map<std::string, std::size_t> freq;
  for (const auto& t : tweets)
    for (const auto& m : t.mentions) ++freq[m];

  std::vector<std::vector<std::string>> out;
  for (const auto& t : tweets) {
    if (t.mentions.size() < min_mentions) continue;
    bool all_frequent = true;
    for (const auto& m : t.mentions) {
      if (freq[m] < min_user_freq) {
        all_frequent = false;
        break;
      }
    }
    if (all_frequent) out.push_back(t.mentions);
  }
  return out;
}

}  // namespace otl
