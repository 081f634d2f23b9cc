#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "otl/random.hpp"
#include "otl/textprep.hpp"
#include "otl/unicode.hpp"

using namespace otl;

namespace {

using Tokens = std::vector<std::string>;

// Random text over a pool that exercises every tokenizer branch.
std::string random_text(Rng& rng) {
  static const std::vector<std::string> pool = {
      "a", "B", "ä", "Ö", "ß", "ẞ", "İ", "x", "7", "0", "!", "?", ".", ",", "#", " ", " ", "\t", "\n",
      "@", "@Merkel", "@a_b", "http://x.de/p?q=1", "HTTPS://Y.org", "www.test.de", "wwwx", "<user>", "<url>",
      "\U0001F600", "\U0001F44D\U0001F3FD", "\U0001F1E9\U0001F1EA", "\U0001F468\u200D\U0001F469",
      "\u2764\uFE0F", "é", "\xff", "\u00A0", "Σ"};
  std::string s;
  const std::size_t n = uniform_index(rng, 16);
  for (std::size_t i = 0; i < n; ++i) s += pool[uniform_index(rng, pool.size())];
  return s;
}

unicode::CharClass token_class(const std::string& tok) {
  const auto cps = unicode::decode_utf8(tok);
  if (unicode::emoji_sequence_end(cps, 0) == cps.size() && unicode::is_emoji_base(cps[0]))
    return unicode::CharClass::emoji;
  // A combining mark with nothing to attach to starts a symbol run.
  const auto c = unicode::classify(cps[0]);
  return c == unicode::CharClass::extend ? unicode::CharClass::symbol : c;
}

}  // namespace

TEST(Normalize, ReplacesMentionsAndUrlsAndLowercases) {
  EXPECT_EQ(normalize("Hallo @Merkel http://x.de"), "hallo <user> <url>");
  EXPECT_EQ(normalize(""), "");
  EXPECT_EQ(normalize("ÄRGER!!!"), "ärger!!!");
}

TEST(Normalize, UrlForms) {
  EXPECT_EQ(normalize("see www.spiegel.de/x now"), "see <url> now");
  EXPECT_EQ(normalize("HTTPS://A.B/C?d=1"), "<url>");
  EXPECT_EQ(normalize("xhttp://a.b"), "xhttp://a.b");
}

TEST(Normalize, IsIdempotentOnRandomText) {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const std::string s = random_text(rng);
    const std::string once = normalize(s);
    EXPECT_EQ(normalize(once), once) << s;
  }
}

TEST(Tokenize, ClassBoundaries) {
  EXPECT_EQ(tokenize("abc123!?").tokens, (Tokens{"abc", "123", "!?"}));
  EXPECT_EQ(tokenize("\U0001F600\U0001F600").tokens, (Tokens{"\U0001F600", "\U0001F600"}));
  EXPECT_EQ(tokenize("geh heim<user>").tokens, (Tokens{"geh", "heim", "<user>"}));
}

TEST(Tokenize, EmojiSequencesStayWhole) {
  const std::string family = "\U0001F468\u200D\U0001F469\u200D\U0001F467";
  const std::string thumbs = "\U0001F44D\U0001F3FD";
  const std::string flag = "\U0001F1E9\U0001F1EA";
  EXPECT_EQ(tokenize(family + thumbs + flag + "ok").tokens, (Tokens{family, thumbs, flag, "ok"}));
}

TEST(Tokenize, PlaceholdersAreAtomic) {
  EXPECT_EQ(preprocess("@A,@b http://x.y!").tokens, (Tokens{"<user>", ",", "<user>", "<url>"}));
  EXPECT_EQ(preprocess("@A,@b http://x.y !").tokens, (Tokens{"<user>", ",", "<user>", "<url>", "!"}));
}

TEST(Tokenize, RandomTextProperties) {
  Rng rng(12);
  for (int i = 0; i < 2000; ++i) {
    const std::string norm = normalize(random_text(rng));
    const auto t = tokenize(norm);
    EXPECT_EQ(tokenize(norm), t);
    std::string joined, stripped;
    for (const auto& tok : t.tokens) {
      ASSERT_FALSE(tok.empty());
      joined += tok;
      if (tok == kUserToken || tok == kUrlToken) continue;
      const auto cps = unicode::decode_utf8(tok);
      const auto cls = token_class(tok);
      EXPECT_NE(cls, unicode::CharClass::space) << norm;
      if (cls != unicode::CharClass::emoji) {
        for (char32_t cp : cps) {
          const auto c = unicode::classify(cp);
          EXPECT_TRUE(c == cls || c == unicode::CharClass::extend) << norm;
        }
      }
    }
    for (char32_t cp : unicode::decode_utf8(norm))
      if (!unicode::is_space(cp)) unicode::append_utf8(stripped, cp);
    EXPECT_EQ(joined, stripped) << norm;
  }
}

TEST(MeaningfulTokens, Filters) {
  TokenizedTweet t{{"der", "hund", "<url>", "!"}, "1"};
  EXPECT_EQ(meaningful_tokens(t, {"der"}), (Tokens{"hund"}));
  TokenizedTweet all_stop{{"der", "die", "das"}, "2"};
  EXPECT_TRUE(meaningful_tokens(all_stop, {"der", "die", "das"}).empty());
}

TEST(MeaningfulTokens, SubsequenceOfTokens) {
  Rng rng(13);
  const StopwordSet sw = {"a", "x"};
  for (int i = 0; i < 500; ++i) {
    const auto t = preprocess(random_text(rng));
    const auto m = meaningful_tokens(t, sw);
    std::size_t j = 0;
    for (const auto& tok : t.tokens)
      if (j < m.size() && tok == m[j]) ++j;
    EXPECT_EQ(j, m.size());
  }
}

TEST(Stopwords, BundledGermanList) {
  const auto sw = load_stopwords(default_stopwords_path());
  EXPECT_GT(sw.size(), 200u);
  EXPECT_TRUE(sw.count("und"));
  EXPECT_TRUE(sw.count("der"));
  EXPECT_FALSE(sw.count("hund"));
}

TEST(StripEmojis, RemovesEverySequence) {
  EXPECT_EQ(preprocess(strip_emojis("hi \U0001F600\U0001F389\U0001F600")).tokens, (Tokens{"hi"}));
  EXPECT_EQ(strip_emojis("a\u2764\uFE0Fb"), "ab");
}
