#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "otl/cli.hpp"
#include "otl/config.hpp"
#include "otl/error.hpp"
#include "test_support.hpp"

using namespace otl;
using otl::testing::read_file;
using otl::testing::TempDir;
using otl::testing::write_file;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "otl");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Config, EmptyInputGivesDefaults) {
  RunConfig c;
  std::istringstream in("");
  apply_config(c, in);
  EXPECT_EQ(c, RunConfig{});
  std::istringstream same("# comment\n\nlr = 0.002\n");
  apply_config(c, same);
  EXPECT_EQ(c, RunConfig{});
}

TEST(Config, ValuesAndErrors) {
  RunConfig c;
  std::istringstream in("dropout=0.25  # trailing comment\nkernel_sizes=2,3\nk_users=10\n");
  apply_config(c, in);
  EXPECT_EQ(c.dropout, 0.25);
  EXPECT_EQ(c.kernel_sizes, (std::vector<int>{2, 3}));
  EXPECT_EQ(c.k_users, 10);
  EXPECT_EQ(c.net(50, 2).cluster_width, 11u);

  try {
    set_config_value(c, "dropout", "1.5");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("dropout"), std::string::npos);
  }
  try {
    std::istringstream bad("lr=0.1\nlearning_rate=0.1\n");
    apply_config(c, bad);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("learning_rate"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
  EXPECT_THROW(set_config_value(c, "filters", "abc"), DataError);
}

TEST(Config, WriteThenReadRoundTrips) {
  RunConfig c;
  c.lr = 0.01;
  c.kernel_sizes = {2, 7};
  c.seed = 99;
  std::ostringstream out;
  write_config(out, c);
  RunConfig back;
  std::istringstream in(out.str());
  apply_config(back, in);
  EXPECT_EQ(back, c);
  EXPECT_EQ(config_keys().size(), 36u);
}

TEST(Run, UsageErrors) {
  EXPECT_EQ(invoke({}).code, kExitUsage);
  EXPECT_EQ(invoke({"bogus"}).code, kExitUsage);
  EXPECT_EQ(invoke({"prepare", "--nope"}).code, kExitUsage);
  EXPECT_EQ(invoke({"prepare"}).code, kExitUsage);  // required flags missing
  const auto help = invoke({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_NE(help.out.find("finetune"), std::string::npos);
}

TEST(Run, DataErrorsExitTwo) {
  TempDir dir;
  write_file(dir / "bad.tsv", "only one column\n");
  const auto r = invoke({"prepare", "--labeled", (dir / "bad.tsv").string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  EXPECT_NE(r.err.find("line 1"), std::string::npos);
  const auto s = invoke({"prepare", "--labeled", (dir / "bad.tsv").string(), "--out", (dir / "o").string(), "--set",
                         "dropout=2"});
  EXPECT_EQ(s.code, kExitData);
}

TEST(Run, GradcheckSmall) {
  const auto r = invoke({"gradcheck", "--small", "--batches", "1", "--per-tensor", "3"});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
  EXPECT_NE(r.out.find("max"), std::string::npos);
}

TEST(Run, PipelineIsByteIdenticalAcrossReruns) {
  TempDir dir;
  const auto fx = (dir / "fx").string();
  const auto made = invoke({"make-fixtures", "--out", fx, "--seed", "5", "--dim", "8"});
  ASSERT_EQ(made.code, kExitOk) << made.err;
  EXPECT_NE(made.out.find("smoke_labeled.tsv"), std::string::npos);
  EXPECT_NE(made.out.find("vectors.txt"), std::string::npos);

  auto stage = [&](const std::string& tag) {
    const auto out = (dir / tag).string();
    std::string log;
    auto step = [&](std::vector<std::string> args) {
      const auto r = invoke(std::move(args));
      EXPECT_EQ(r.code, kExitOk) << r.err;
      log += r.out;
    };
    step({"prepare", "--labeled", fx + "/separable.tsv", "--tail", "16", "--out", out});
    step({"lda-train", "--corpus", fx + "/smoke_raw.jsonl", "--topics", "3", "--iterations", "20", "--out",
          out + "/lda.bin"});
    step({"cluster-users", "--corpus", fx + "/mention_cliques.jsonl", "--k", "3", "--iterations", "20",
          "--min-freq", "1", "--out", out + "/clusters.tsv"});
    const std::vector<std::string> small = {"--set", "lstm_units=4", "--set", "filters=3", "--set", "dense_units=4",
                                            "--set", "k_users=3"};
    std::vector<std::string> pre = {"pretrain", "--task", "topic", "--corpus", fx + "/smoke_raw.jsonl", "--lda",
                                    out + "/lda.bin", "--vectors", fx + "/vectors.txt", "--clusters",
                                    out + "/clusters.tsv", "--epochs", "1", "--out", out + "/pre.ckpt"};
    pre.insert(pre.end(), small.begin(), small.end());
    step(pre);
    std::vector<std::string> fine = {"finetune", "--ckpt", out + "/pre.ckpt", "--strategy", "gu", "--train",
                                     out + "/train.tsv", "--valid", out + "/valid.tsv", "--vectors",
                                     fx + "/vectors.txt", "--clusters", out + "/clusters.tsv", "--epochs", "4",
                                     "--out", out + "/fine.ckpt"};
    fine.insert(fine.end(), small.begin(), small.end());
    step(fine);
    std::vector<std::string> ev = {"evaluate", "--ckpt", out + "/fine.ckpt", "--data", out + "/valid.tsv",
                                   "--vectors", fx + "/vectors.txt", "--clusters", out + "/clusters.tsv",
                                   "--errors", out + "/errors.tsv"};
    ev.insert(ev.end(), small.begin(), small.end());
    step(ev);
    step({"baseline", "--train", out + "/train.tsv", "--valid", out + "/valid.tsv", "--vectors",
          fx + "/vectors.txt"});
    return log;
  };
  const auto a = stage("a");
  const auto b = stage("b");
  // Paths differ between the two runs, so compare outputs with them removed.
  auto scrub = [&](std::string s, const std::string& tag) {
    const std::string p = (dir / tag).string();
    for (auto pos = s.find(p); pos != std::string::npos; pos = s.find(p)) s.replace(pos, p.size(), "<dir>");
    return s;
  };
  EXPECT_EQ(scrub(a, "a"), scrub(b, "b"));
  for (const char* f : {"train.tsv", "valid.tsv", "lda.bin", "clusters.tsv", "pre.ckpt", "pre.ckpt.labels",
                        "fine.ckpt", "errors.tsv"})
    EXPECT_EQ(read_file(dir / "a" / f), read_file(dir / "b" / f)) << f;
  EXPECT_NE(a.find("phase 1"), std::string::npos);
  EXPECT_NE(a.find("runs 1"), std::string::npos);
}
