#include "otl/fixtures.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "otl/error.hpp"
#include "otl/random.hpp"

namespace otl::fixtures {

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

std::vector<std::string> word_block(std::size_t start, std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(pseudo_word(start + i));
  return out;
}

std::string join(std::span<const std::string> words) {
  std::string s;
  for (const auto& w : words) {
    if (!s.empty()) s += ' ';
    s += w;
  }
  return s;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

}  // namespace

std::string pseudo_word(std::size_t n) {
  const std::size_t syllables = kConsonants.size() * kVowels.size();
  std::string w;
  for (int i = 0; i < 3; ++i) {
    const std::size_t s = n % syllables;
    n /= syllables;
    w += kConsonants[s / kVowels.size()];
    w += kVowels[s % kVowels.size()];
  }
  while (n > 0) {
    w += kConsonants[n % kConsonants.size()];
    n /= kConsonants.size();
  }
  return w;
}

PlantedCorpus planted_topics(std::size_t docs, std::size_t doc_len, int topics, std::size_t vocab_per_topic,
                             std::uint64_t seed) {
  PlantedCorpus c;
  for (int t = 0; t < topics; ++t)
    c.vocab.push_back(word_block(1000 + static_cast<std::size_t>(t) * vocab_per_topic, vocab_per_topic));
  Rng rng(derive_seed(seed, 11));
  for (std::size_t d = 0; d < docs; ++d) {
    const int t = static_cast<int>(d % static_cast<std::size_t>(topics));
    Document doc;
    for (std::size_t i = 0; i < doc_len; ++i) doc.push_back(c.vocab[t][uniform_index(rng, vocab_per_topic)]);
    c.docs.push_back(std::move(doc));
    c.topics.push_back(t);
  }
  return c;
}

SmokeCorpus transfer_smoke(std::size_t tweets, std::size_t vocab_per_topic, std::size_t words_per_tweet,
                           std::uint64_t seed) {
  SmokeCorpus c;
  for (int t = 0; t < 2; ++t) c.vocab.push_back(word_block(5000 + static_cast<std::size_t>(t) * vocab_per_topic, vocab_per_topic));
  const std::vector<std::string> fillers = {"und", "der", "die", "das", "ist", "nicht"};
  Rng rng(derive_seed(seed, 12));
  for (std::size_t i = 0; i < tweets; ++i) {
    const int t = static_cast<int>(uniform_index(rng, 2));
    std::vector<std::string> words;
    for (std::size_t k = 0; k < words_per_tweet; ++k) words.push_back(c.vocab[t][uniform_index(rng, vocab_per_topic)]);
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(uniform_index(rng, words.size() + 1)),
                 fillers[uniform_index(rng, fillers.size())]);
    const std::string user = "@t" + std::to_string(t) + "user" + std::to_string(uniform_index(rng, 10));
    const std::string text = user + " " + join(words);
    const std::string id = "s" + std::to_string(i + 1);
    c.raw.push_back(make_raw_tweet(id, text));
    LabeledTweet lt{id, text, t == 0 ? Coarse::offense : Coarse::other, t == 0 ? Fine::insult : Fine::other};
    c.labeled.push_back(std::move(lt));
    c.topics.push_back(t);
  }
  return c;
}

std::vector<LabeledTweet> separable_labeled(std::size_t n, std::size_t vocab_per_class, std::uint64_t seed) {
  const auto a = word_block(9000, vocab_per_class);
  const auto b = word_block(9000 + vocab_per_class, vocab_per_class);
  Rng rng(derive_seed(seed, 13));
  std::vector<LabeledTweet> out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool offense = i % 2 == 0;
    const auto& vocab = offense ? a : b;
    std::vector<std::string> words;
    const std::size_t len = 4 + uniform_index(rng, 4);
    for (std::size_t k = 0; k < len; ++k) words.push_back(vocab[uniform_index(rng, vocab.size())]);
    out.push_back({std::to_string(i + 1), join(words), offense ? Coarse::offense : Coarse::other,
                   offense ? Fine::profanity : Fine::other});
  }
  return out;
}

CliqueCorpus mention_cliques(std::size_t users, int cliques, std::size_t lists, std::uint64_t seed) {
  CliqueCorpus c;
  const std::size_t per = users / static_cast<std::size_t>(cliques);
  std::vector<std::vector<std::string>> members(static_cast<std::size_t>(cliques));
  for (std::size_t u = 0; u < per * static_cast<std::size_t>(cliques); ++u) {
    const int q = static_cast<int>(u / per);
    const std::string name = "user" + std::to_string(u);
    members[q].push_back(name);
    c.clique_of[name] = q;
  }
  Rng rng(derive_seed(seed, 14));
  for (std::size_t i = 0; i < lists; ++i) {
    const int q = static_cast<int>(i % static_cast<std::size_t>(cliques));
    auto pool = members[q];
    shuffle(pool.begin(), pool.end(), rng);
    const std::size_t k = 2 + uniform_index(rng, 4);
    std::string text;
    for (std::size_t j = 0; j < k; ++j) text += "@" + pool[j] + " ";
    text += pseudo_word(20000 + uniform_index(rng, 500));
    c.tweets.push_back(make_raw_tweet("m" + std::to_string(i + 1), text));
  }
  return c;
}

EmojiFixture emoji_tweets(std::size_t tweets, std::uint64_t seed) {
  EmojiFixture f;
  f.pool = {"\U0001F600",                          // grinning face
            "\U0001F389",                          // party popper
            "\U0001F602",                          // tears of joy
            "\u2764\uFE0F",                        // red heart
            "\U0001F44D\U0001F3FD",                // thumbs up, medium skin tone
            "\U0001F468\u200D\U0001F469\u200D\U0001F467",  // family
            "\U0001F1E9\U0001F1EA",                // flag DE
            "\U0001F525",                          // fire
            "\U0001F648",                          // see-no-evil monkey
            "\u2615"};                             // hot beverage
  Rng rng(derive_seed(seed, 15));
  for (std::size_t i = 0; i < tweets; ++i) {
    const std::size_t k = uniform_index(rng, 5);
    std::vector<std::string> drawn;
    for (std::size_t j = 0; j < k; ++j) drawn.push_back(f.pool[uniform_index(rng, f.pool.size())]);
    std::string text = pseudo_word(30000 + i) + " " + pseudo_word(31000 + uniform_index(rng, 50));
    for (const auto& e : drawn) {
      if (uniform_index(rng, 2) == 0) text += ' ';
      text += e;
    }
    if (uniform_index(rng, 2) == 0) text += " " + pseudo_word(32000 + uniform_index(rng, 50)) + "!";
    f.expected_examples += std::set<std::string>(drawn.begin(), drawn.end()).size();
    f.tweets.push_back(make_raw_tweet("e" + std::to_string(i + 1), text));
    f.drawn.push_back(std::move(drawn));
  }
  return f;
}

std::vector<CommentRecord> category_comments(std::size_t n, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 16));
  std::vector<CommentRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    CommentRecord c;
    c.id = "c" + std::to_string(i + 1);
    const bool rude = uniform_index(rng, 3) == 0;
    c.text = pseudo_word(rude ? 40000 + uniform_index(rng, 20) : 41000 + uniform_index(rng, 20)) + " " +
             pseudo_word(42000 + uniform_index(rng, 100));
    const std::size_t annotators = 1 + uniform_index(rng, 4);
    for (std::size_t a = 0; a < annotators; ++a) {
      const bool flag = rude ? uniform_index(rng, 5) != 0 : uniform_index(rng, 5) == 0;
      const bool which = uniform_index(rng, 2) == 0;
      c.annotations.push_back({flag && which, flag && !which});
    }
    out.push_back(std::move(c));
  }
  return out;
}

DuplicateFixture duplicates(std::size_t unique, std::size_t planted, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 17));
  DuplicateFixture f;
  std::vector<std::string> texts;
  for (std::size_t i = 0; i < unique; ++i) texts.push_back(pseudo_word(50000 + i) + " " + pseudo_word(60000 + i) + "!");
  std::vector<std::string> all = texts;
  for (std::size_t i = 0; i < planted; ++i) {
    std::string copy = texts[uniform_index(rng, texts.size())];
    if (i % 2 == 0) {
      for (auto& ch : copy) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    }
    all.push_back(std::move(copy));
  }
  shuffle(all.begin() + 1, all.end(), rng);
  // A copy may now precede its original; either way one survives.
  for (std::size_t i = 0; i < all.size(); ++i) f.tweets.push_back(make_raw_tweet("d" + std::to_string(i + 1), all[i]));
  f.planted = planted;
  return f;
}

EmbeddingTable random_vectors(std::span<const std::string> words, std::size_t dim, std::uint64_t seed) {
  EmbeddingConfig cfg;
  cfg.dim = dim;
  cfg.seed = seed;
  EmbeddingTable table(cfg);
  Rng rng(derive_seed(seed, 18));
  for (const auto& w : words) {
    if (table.contains(w)) continue;
    Vector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = uniform(rng, -1.0, 1.0);
    table.add_word(w, std::move(v));
  }
  return table;
}

void save_vectors(const EmbeddingTable& table, const std::filesystem::path& path) {
  auto out = open_out(path);
  std::vector<std::string> words;
  for (const auto& [w, _] : table.words()) words.push_back(w);
  std::sort(words.begin(), words.end());
  out << words.size() << ' ' << table.dim() << '\n';
  char buf[32];
  for (const auto& w : words) {
    out << w;
    for (double x : table.words().at(w)) {
      std::snprintf(buf, sizeof buf, " %.6f", x);
      out << buf;
    }
    out << '\n';
  }
}

std::vector<std::string> write_all(const std::filesystem::path& dir, std::uint64_t seed, std::size_t dim) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  auto open = [&](const std::string& name) {
    written.push_back(name);
    return open_out(dir / name);
  };

  const auto planted = planted_topics(200, 20, 2, 50, seed);
  {
    auto out = open("planted_topics.jsonl");
    std::vector<RawTweet> raw;
    for (std::size_t d = 0; d < planted.docs.size(); ++d)
      raw.push_back(make_raw_tweet("p" + std::to_string(d + 1), join(planted.docs[d])));
    write_raw(out, raw);
    auto truth = open("planted_topics_truth.tsv");
    for (std::size_t d = 0; d < planted.docs.size(); ++d) truth << "p" << d + 1 << '\t' << planted.topics[d] << '\n';
  }

  const auto smoke = transfer_smoke(500, 150, 8, seed);
  {
    auto raw = open("smoke_raw.jsonl");
    write_raw(raw, smoke.raw);
    auto labeled = open("smoke_labeled.tsv");
    write_labeled(labeled, smoke.labeled);
  }

  const auto separable = separable_labeled(64, 12, seed);
  {
    auto out = open("separable.tsv");
    write_labeled(out, separable);
  }

  const auto cliques = mention_cliques(60, 3, 600, seed);
  {
    auto out = open("mention_cliques.jsonl");
    write_raw(out, cliques.tweets);
    auto truth = open("mention_cliques_truth.tsv");
    for (const auto& [user, q] : cliques.clique_of) truth << user << '\t' << q << '\n';
  }

  const auto emoji = emoji_tweets(100, seed);
  {
    auto out = open("emoji.jsonl");
    write_raw(out, emoji.tweets);
  }

  const auto comments = category_comments(60, seed);
  {
    auto out = open("comments.jsonl");
    write_comments(out, comments);
  }

  const auto dups = duplicates(900, 100, seed);
  {
    auto out = open("duplicates.jsonl");
    write_raw(out, dups.tweets);
  }

  std::vector<std::string> words;
  for (const auto& v : planted.vocab) words.insert(words.end(), v.begin(), v.end());
  for (const auto& v : smoke.vocab) words.insert(words.end(), v.begin(), v.end());
  for (const auto& t : separable)
    for (const auto& tok : preprocess(t.text).tokens) words.push_back(tok);
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  {
    written.push_back("vectors.txt");
    save_vectors(random_vectors(words, dim, seed), dir / "vectors.txt");
  }

  {
    auto out = open("truth.json");
    nlohmann::json j = {{"seed", seed},
                        {"duplicates_planted", dups.planted},
                        {"duplicates_expected_unique", dups.tweets.size() - dups.planted},
                        {"emoji_expected_examples", emoji.expected_examples},
                        {"emoji_tweets", emoji.tweets.size()},
                        {"planted_docs", planted.docs.size()},
                        {"smoke_tweets", smoke.raw.size()},
                        {"separable_examples", separable.size()},
                        {"clique_users", cliques.clique_of.size()},
                        {"clique_lists", cliques.tweets.size()},
                        {"vector_dim", dim}};
    out << j.dump(2) << '\n';
  }
  return written;
}

}  // namespace otl::fixtures
