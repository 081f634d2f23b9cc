#include <gtest/gtest.h>

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "otl/corpus.hpp"
#include "otl/error.hpp"
#include "otl/fixtures.hpp"
#include "otl/random.hpp"
#include "test_support.hpp"

using namespace otl;

namespace {

std::vector<LabeledTweet> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_labeled(in);
}

std::vector<RawTweet> parse_jsonl(const std::string& text) {
  std::istringstream in(text);
  return parse_raw(in);
}

std::vector<LabeledTweet> numbered(std::size_t n) {
  std::vector<LabeledTweet> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({std::to_string(i + 1), "t" + std::to_string(i)});
  return out;
}

}  // namespace

TEST(LoadLabeled, ParsesLabels) {
  const auto v = parse("Hallo\tother\tother\nDu Idiot\tOFFENSE\tINSULT\n");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].text, "Hallo");
  EXPECT_EQ(v[0].coarse, Coarse::other);
  EXPECT_EQ(v[0].fine, Fine::other);
  EXPECT_EQ(v[1].coarse, Coarse::offense);
  EXPECT_EQ(v[1].fine, Fine::insult);
  EXPECT_EQ(label_id(v[1], Task::coarse), 0);
  EXPECT_EQ(label_id(v[1], Task::fine), 0);
  EXPECT_EQ(label_id(v[0], Task::fine), 3);
}

TEST(LoadLabeled, EmptyInputGivesEmptyList) { EXPECT_TRUE(parse("").empty()); }

TEST(LoadLabeled, LargeFileKeepsOrder) {
  std::string text;
  for (int i = 0; i < 5008; ++i) text += "tweet " + std::to_string(i) + "\tother\tother\n";
  const auto v = parse(text);
  ASSERT_EQ(v.size(), 5008u);
  EXPECT_EQ(v[4999].text, "tweet 4999");
}

TEST(LoadLabeled, ErrorsCarryLineNumbers) {
  try {
    parse("ok\tother\tother\nbroken line\n");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  try {
    parse("x\toffense\tsarcasm\n");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("sarcasm"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse("x\toffense\tother\n"), DataError);
  EXPECT_THROW(parse("\tother\tother\n"), DataError);
}

TEST(LoadLabeled, MissingFileIsDataError) { EXPECT_THROW(load_labeled("/nonexistent/file.tsv"), DataError); }

TEST(LoadLabeled, RoundTripIsBitExact) {
  otl::testing::TempDir dir;
  const auto data = fixtures::transfer_smoke(50, 20, 5, 3).labeled;
  save_labeled(dir / "a.tsv", data);
  const auto back = load_labeled(dir / "a.tsv");
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(back[i].text, data[i].text);
    EXPECT_EQ(back[i].coarse, data[i].coarse);
    EXPECT_EQ(back[i].fine, data[i].fine);
  }
  save_labeled(dir / "b.tsv", back);
  EXPECT_EQ(otl::testing::read_file(dir / "a.tsv"), otl::testing::read_file(dir / "b.tsv"));
}

TEST(SaveLabeled, RejectsTabsInText) {
  std::vector<LabeledTweet> bad = {{"1", "a\tb", Coarse::other, Fine::other}};
  std::ostringstream out;
  EXPECT_THROW(write_labeled(out, bad), DataError);
}

TEST(SplitTail, FullSizeSplit) {
  const auto data = numbered(5008);
  const auto s = split_tail(data, 808);
  EXPECT_EQ(s.train.size(), 4200u);
  EXPECT_EQ(s.validation.size(), 808u);
}

TEST(SplitTail, DefinitionAndEdges) {
  const auto data = numbered(10);
  const auto s = split_tail(data, 3);
  ASSERT_EQ(s.train.size(), 7u);
  EXPECT_EQ(s.train.front().id, "1");
  EXPECT_EQ(s.validation.front().id, "8");
  EXPECT_EQ(s.validation.back().id, "10");
  EXPECT_TRUE(split_tail(data, 0).validation.empty());
  EXPECT_THROW(split_tail(data, 11), DataError);
}

TEST(SplitTail, ConcatenationIdentity) {
  const auto data = numbered(25);
  for (std::size_t t = 0; t <= data.size(); ++t) {
    auto s = split_tail(data, t);
    auto joined = s.train;
    joined.insert(joined.end(), s.validation.begin(), s.validation.end());
    EXPECT_EQ(joined, data);
  }
}

TEST(LoadRaw, ExtractsMentionsAndDistinctEmojis) {
  const auto v = parse_jsonl(
      "{\"id\":\"1\",\"text\":\"@a @b hi\"}\n"
      "{\"id\":\"2\",\"text\":\"hi \U0001F600\U0001F600\U0001F389\"}\n");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].mentions, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(v[1].emojis, (std::vector<std::string>{"\U0001F600", "\U0001F389"}));
}

TEST(LoadRaw, Errors) {
  try {
    parse_jsonl("{\"id\":\"1\",\"text\":\"x\"}\n{\"id\":\"2\"}\n");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_jsonl("{\"id\":\"1\",\"text\":\"x\"}\n{\"id\":\"1\",\"text\":\"y\"}\n"), DataError);
  EXPECT_THROW(parse_jsonl("not json\n"), DataError);
}

TEST(LoadRaw, MentionsAppearInText) {
  const auto tweets = fixtures::mention_cliques(30, 3, 50, 4).tweets;
  for (const auto& t : tweets)
    for (const auto& m : t.mentions) EXPECT_NE(t.text.find("@" + m), std::string::npos);
}

TEST(LoadRaw, RoundTrip) {
  std::ostringstream out;
  const auto tweets = fixtures::emoji_tweets(40, 2).tweets;
  write_raw(out, tweets);
  EXPECT_EQ(parse_jsonl(out.str()), tweets);
}

TEST(Deduplicate, CaseFoldedDuplicates) {
  std::vector<RawTweet> v = {make_raw_tweet("1", "Hi!"), make_raw_tweet("2", "hi!"), make_raw_tweet("3", "Yo")};
  const auto d = deduplicate(v);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].text, "Hi!");
  EXPECT_EQ(d[1].text, "Yo");
}

TEST(Deduplicate, DistinctInputUnchanged) {
  const auto tweets = fixtures::emoji_tweets(30, 5).tweets;
  EXPECT_EQ(deduplicate(tweets), tweets);
}

TEST(Deduplicate, PlantedDuplicatesAndIdempotence) {
  const auto f = fixtures::duplicates(900, 100, 7);
  ASSERT_EQ(f.tweets.size(), 1000u);
  const auto once = deduplicate(f.tweets);
  EXPECT_EQ(once.size(), 900u);
  EXPECT_EQ(deduplicate(once), once);
}

TEST(MentionLists, Thresholds) {
  std::vector<RawTweet> v;
  for (int i = 0; i < 5; ++i) v.push_back(make_raw_tweet("a" + std::to_string(i), "@x @y hallo"));
  v.push_back(make_raw_tweet("b", "@x alone"));
  const auto lists = extract_mention_lists(v, 2, 5);
  EXPECT_EQ(lists.size(), 5u);
  // With z seen four times, every list containing z is dropped.
  for (int i = 0; i < 4; ++i) v.push_back(make_raw_tweet("z" + std::to_string(i), "@x @z"));
  EXPECT_EQ(extract_mention_lists(v, 2, 5).size(), 5u);
  EXPECT_EQ(extract_mention_lists(v, 2, 4).size(), 9u);
}

TEST(MentionLists, MatchesBruteForceAndIsMonotone) {
  Rng rng(9);
  std::vector<RawTweet> v;
  for (int i = 0; i < 300; ++i) {
    std::string text;
    const auto k = uniform_index(rng, 5);
    for (std::size_t j = 0; j < k; ++j) text += "@u" + std::to_string(uniform_index(rng, 40)) + " ";
    v.push_back(make_raw_tweet(std::to_string(i), text + "x"));
  }
  std::map<std::string, std::size_t> freq;
  for (const auto& t : v)
    for (const auto& m : t.mentions) ++freq[m];
  for (std::size_t mm = 1; mm <= 4; ++mm) {
    for (std::size_t mf = 1; mf <= 20; ++mf) {
      std::vector<std::vector<std::string>> expected;
      for (const auto& t : v) {
        if (t.mentions.size() < mm) continue;
        bool ok = true;
        for (const auto& m : t.mentions) ok = ok && freq[m] >= mf;
        if (ok) expected.push_back(t.mentions);
      }
      const auto got = extract_mention_lists(v, mm, mf);
      EXPECT_EQ(got, expected);
      EXPECT_LE(extract_mention_lists(v, mm + 1, mf).size(), got.size());
      EXPECT_LE(extract_mention_lists(v, mm, mf + 1).size(), got.size());
    }
  }
}
