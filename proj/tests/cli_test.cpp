#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "test_util.hpp"
#include "zest/container.hpp"

namespace {

using nlohmann::json;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Run zest_cli(const std::vector<std::string>& args, const std::string& stdin_text = "") {
  static zest::testing::TempDir scratch;
  static int n = 0;
  const auto err_path = scratch / ("err" + std::to_string(n));
  const auto in_path = scratch / ("in" + std::to_string(n++));
  std::ofstream(in_path) << stdin_text;
  std::string cmd = quote(ZEST_CLI_PATH);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " <" + quote(in_path.string()) + " 2>" + quote(err_path.string());
  Run r;
  FILE* p = ::popen(cmd.c_str(), "r");
  char buf[4096];
  for (std::size_t got; (got = std::fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, got);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = zest::read_file(err_path);
  return r;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new zest::testing::TempDir;
    const auto r = zest_cli({"train", "--synth", "disjoint-script", "--synth-size", "600",
                             "--subset", "train", "--seed", "3", "--model", model()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() { delete dir_; }
  static std::string model() { return (*dir_ / "script.zest").string(); }
  static zest::testing::TempDir* dir_;
};
zest::testing::TempDir* Cli::dir_ = nullptr;

TEST_F(Cli, TrainThenEvaluateDisjointScript) {
  const auto r = zest_cli({"evaluate", "--model", model(), "--synth", "disjoint-script",
                           "--synth-size", "600", "--subset", "test", "--seed", "3", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_GE(j.at("accuracy").get<double>(), 0.99);
  EXPECT_EQ(j.at("total").get<int>(), 120);

  const auto table = zest_cli({"evaluate", "--model", model(), "--synth", "disjoint-script",
                               "--synth-size", "600", "--subset", "test", "--seed", "3"});
  EXPECT_NE(table.out.find("accuracy"), std::string::npos);
}

TEST_F(Cli, TrainingIsReproducible) {
  const auto again = (*dir_ / "again.zest").string();
  ASSERT_EQ(zest_cli({"train", "--synth", "disjoint-script", "--synth-size", "600", "--subset",
                      "train", "--seed", "3", "--model", again, "--threads", "1"})
                .code,
            0);
  EXPECT_EQ(zest::read_file(model()), zest::read_file(again));
}

TEST_F(Cli, PredictStreamsInInputOrder) {
  std::string input;
  for (int i = 0; i < 300; ++i) input += i % 2 ? "Доброе утро, друзья\n" : "Καλημέρα σας φίλοι\n";
  const auto one = zest_cli({"predict", "--model", model(), "--data", "-", "--threads", "1"}, input);
  const auto many = zest_cli({"predict", "--model", model(), "--data", "-", "--threads", "4"}, input);
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(one.out, many.out);
  const auto labels = lines_of(one.out);
  ASSERT_EQ(labels.size(), 300u);
  for (std::size_t i = 0; i < labels.size(); ++i)
    EXPECT_EQ(labels[i], i % 2 ? "cyrillic" : "greek") << i;

  const auto js = zest_cli({"predict", "--model", model(), "--data", "-", "--json"}, "αβγ\n");
  EXPECT_EQ(json::parse(js.out).at("index"), 0);
}

TEST_F(Cli, ScoreCsvAndJson) {
  const auto csv = zest_cli({"score", "--model", model(), "--data", "-"},
                            "Καλημέρα σας φίλοι\nДоброе утро, друзья\n");
  ASSERT_EQ(csv.code, 0) << csv.err;
  const auto rows = lines_of(csv.out);
  ASSERT_EQ(rows.size(), 3u);
  // Class order is first appearance in the training half.
  EXPECT_EQ(rows[0], "index,argmax,raw:cyrillic,raw:greek,adjusted:cyrillic,adjusted:greek");
  EXPECT_EQ(rows[1].rfind("0,greek,", 0), 0u) << rows[1];
  EXPECT_EQ(rows[2].rfind("1,cyrillic,", 0), 0u) << rows[2];

  const auto js = zest_cli({"score", "--model", model(), "--data", "-", "--json"}, "Доброе\n");
  const auto j = json::parse(js.out);
  EXPECT_EQ(j.at("argmax"), "cyrillic");
  EXPECT_DOUBLE_EQ(j.at("adjusted").at("greek").get<double>(), 0.0);
}

TEST_F(Cli, RankSortsByAffinity) {
  const auto r = zest_cli({"rank", "--model", model(), "--data", "-", "--target-label", "greek"},
                          "Доброе утро\nΚαλημέρα σας\n\n");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines_of(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].rfind("1\t", 0), 0u);
  const auto bad = zest_cli({"rank", "--model", model(), "--data", "-", "--target-label", "x"}, "a\n");
  EXPECT_EQ(bad.code, 2);
}

TEST_F(Cli, HistogramCsv) {
  const auto path = (*dir_ / "hist.csv").string();
  const auto r = zest_cli({"evaluate", "--model", model(), "--synth", "disjoint-script",
                           "--synth-size", "200", "--histogram", path, "--bucket-width", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines_of(zest::read_file(path));
  EXPECT_EQ(rows.front(), "bucket_low,bucket_high,group,count");
  EXPECT_EQ(rows.size(), 1 + 2 * 11u);
}

TEST(CliData, CsvTrainPredictEvaluate) {
  zest::testing::TempDir dir;
  std::ofstream csv(dir / "d.csv");
  csv << "id,text,topic\n";
  for (int i = 0; i < 60; ++i) {
    csv << i << ",\"" << (i % 2 ? "the striker scored a late goal, again" : "parliament passed the budget vote")
        << " " << i << "\"," << (i % 2 ? "sports" : "politics") << "\n";
  }
  csv.close();
  const auto model = (dir / "m.zest").string();
  const auto data = (dir / "d.csv").string();
  const auto t = zest_cli({"train", "--data", data, "--label-column", "topic", "--model", model,
                           "--dicts", "2", "--base-size", "1024", "--json"});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_EQ(json::parse(t.out).at("records"), 60);
  const auto e = zest_cli({"evaluate", "--model", model, "--data", data, "--label-column", "topic",
                           "--json"});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_DOUBLE_EQ(json::parse(e.out).at("accuracy").get<double>(), 1.0);
  const auto p = zest_cli({"predict", "--model", model, "--data", data});
  EXPECT_EQ(lines_of(p.out).size(), 60u);
}

TEST(CliBench, ZestBeatsPlainConcat) {
  const auto r = zest_cli({"bench", "--synth", "shared-head", "--synth-size", "1200", "--seed", "7",
                           "--methods", "zest,concat:zstd_plain,nb", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  ASSERT_EQ(j.size(), 3u);
  EXPECT_GE(j[0].at("fom").get<double>(), j[1].at("fom").get<double>());
}

TEST(CliAblate, TableHasEveryConfig) {
  const auto r = zest_cli({"ablate", "--synth", "disjoint-vocab", "--synth-size", "300",
                           "--synth-classes", "3", "--dicts", "1,2", "--base-size", "1024", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out).size(), 4u);
}

TEST(CliErrors, MissingModelNamesPath) {
  const auto r = zest_cli({"predict", "--model", "/nonexistent/m.zest", "--data", "-"}, "x\n");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("/nonexistent/m.zest"), std::string::npos);
}

TEST(CliErrors, BadDataIsExitTwo) {
  zest::testing::TempDir dir;
  std::ofstream(dir / "bad.jsonl") << "{\"text\":\"a\",\"label\":\"x\"}\n{oops\n";
  const auto r = zest_cli({"train", "--data", (dir / "bad.jsonl").string(), "--model",
                           (dir / "m.zest").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(":2:"), std::string::npos) << r.err;
  EXPECT_FALSE(std::filesystem::exists(dir / "m.zest"));
}

TEST(CliErrors, UsageErrorsAreExitOne) {
  const std::vector<std::vector<std::string>> cases = {
      {},
      {"frobnicate"},
      {"train", "--synth", "shared-head"},                                        // no --model
      {"train", "--model", "m", "--synth", "shared-head", "--data", "x.csv"},     // two inputs
      {"train", "--model", "m"},                                                  // no input
      {"train", "--model", "m", "--synth", "shared-head", "--level", "25"},
      {"train", "--model", "m", "--synth", "shared-head", "--codec", "lzma"},
      {"train", "--model", "m", "--synth", "shared-head", "--pad-length", "0"},
      {"train", "--model", "m", "--synth", "shared-head", "--dicts", "1,2"},
      {"train", "--model", "m", "--synth", "shared-head", "--growth", "1.0"},
      {"train", "--model", "m", "--data", "plain.txt"},                           // unlabeled
      {"rank", "--model", "m", "--data", "-"},                                    // no target
      {"predict", "--model", "m", "--data", "-", "--no-pad"},                     // model owns prep
      {"bench", "--synth", "shared-head", "--methods", "zest,svm"},
      {"bench", "--synth", "shared-head", "--methods", "concat:bzip2"},
      {"evaluate", "--model", "m", "--synth", "shared-head", "--bucket-width", "0.1"},
  };
  for (const auto& args : cases) {
    const auto r = zest_cli(args);
    std::string joined;
    for (const auto& a : args) joined += a + " ";
    EXPECT_EQ(r.code, 1) << joined << "\n" << r.err;
    EXPECT_FALSE(r.err.empty()) << joined;
  }
  EXPECT_EQ(zest_cli({"--help"}).code, 0);
}

}  // namespace
