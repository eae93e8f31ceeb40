#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "json.hpp"
#include "zest/errors.hpp"
#include "zest/eval.hpp"
#include "zest/synth.hpp"

namespace {

TEST(Metrics, PerfectClassifier) {
  const std::vector<std::string> labels{"a", "b", "c"};
  const std::vector<std::string> truth{"a", "b", "c", "a", "b"};
  const auto r = zest::compute_metrics(labels, truth, truth);
  EXPECT_DOUBLE_EQ(r.accuracy, 1.0);
  EXPECT_DOUBLE_EQ(r.fom, 1.0);
  EXPECT_DOUBLE_EQ(r.macro_f1, 1.0);
}

TEST(Metrics, ConstantClassifier) {
  const std::vector<std::string> labels{"a", "b", "c", "d"};
  std::vector<std::string> truth, pred;
  for (int i = 0; i < 40; ++i) {
    truth.push_back(labels[i % 4]);
    pred.push_back("b");
  }
  const auto r = zest::compute_metrics(labels, truth, pred);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.25);
  EXPECT_DOUBLE_EQ(r.per_class[1].recall, 1.0);
  EXPECT_DOUBLE_EQ(r.per_class[1].precision, 0.25);
  EXPECT_DOUBLE_EQ(r.per_class[0].precision, 0.0);  // never predicted
  EXPECT_DOUBLE_EQ(r.macro_recall, 0.25);
}

// truth A A A B, prediction A A B A:
//   confusion [[2,1],[1,0]]; P_A = R_A = 2/3, P_B = R_B = 0.
TEST(Metrics, HandBuiltCase) {
  const auto r = zest::compute_metrics({"A", "B"}, {"A", "A", "A", "B"}, {"A", "A", "B", "A"});
  EXPECT_EQ(r.confusion, (std::vector<std::vector<std::size_t>>{{2, 1}, {1, 0}}));
  EXPECT_DOUBLE_EQ(r.accuracy, 0.5);
  EXPECT_NEAR(r.per_class[0].precision, 2.0 / 3, 1e-12);
  EXPECT_NEAR(r.per_class[0].f1, 2.0 / 3, 1e-12);
  EXPECT_DOUBLE_EQ(r.per_class[1].f1, 0.0);
  EXPECT_NEAR(r.macro_precision, 1.0 / 3, 1e-12);
  EXPECT_NEAR(r.macro_recall, 1.0 / 3, 1e-12);
  EXPECT_NEAR(r.fom, 1.0 / 3, 1e-12);
  EXPECT_EQ(r.per_class[0].support, 3u);
}

TEST(Metrics, LabelChecks) {
  EXPECT_THROW(zest::compute_metrics({"A"}, {"A"}, {"B"}), zest::LabelMismatch);
  EXPECT_THROW(zest::compute_metrics({"A"}, {"C"}, {"A"}), zest::LabelMismatch);
}

TEST(Report, JsonAndTable) {
  auto r = zest::compute_metrics({"A", "B"}, {"A", "B"}, {"A", "A"});
  r.method = "toy";
  const auto j = nlohmann::json::parse(r.to_json());
  EXPECT_EQ(j.at("method"), "toy");
  EXPECT_DOUBLE_EQ(j.at("accuracy").get<double>(), 0.5);
  const auto table = zest::format_report_table({r, r});
  EXPECT_NE(table.find("toy"), std::string::npos);
  EXPECT_EQ(nlohmann::json::parse(zest::reports_to_json({r, r})).size(), 2u);
}

TEST(Evaluate, RunsPredictorConcurrently) {
  zest::LabeledDataset test;
  for (int i = 0; i < 100; ++i) test.records.push_back({std::to_string(i), i % 2 ? "odd" : "even"});
  auto predict = [](std::string_view t) {
    return (t.back() - '0') % 2 ? std::string("odd") : std::string("even");
  };
  const auto r = zest::evaluate(predict, {"even", "odd"}, test, 4);
  EXPECT_DOUBLE_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.total, 100u);
  EXPECT_THROW(zest::evaluate(predict, {"even"}, test), zest::LabelMismatch);
}

TEST(Histogram, BucketsAndBounds) {
  auto h = zest::make_histogram(0.01, {"in", "out"});
  EXPECT_LE(h.bucket_count, 101u);
  EXPECT_EQ(h.bucket_of(0.0), 0u);
  EXPECT_EQ(h.bucket_of(0.015), 1u);
  EXPECT_EQ(h.bucket_of(1.0), h.bucket_count - 1);
  EXPECT_EQ(h.bucket_of(-0.5), 0u);
  EXPECT_THROW(zest::make_histogram(0.0, {"x"}), std::invalid_argument);
}

TEST(Histogram, ModelScores) {
  zest::SynthSpec spec;
  spec.kind = zest::SynthKind::disjoint_script;
  const auto ds = zest::synth_corpus(spec, 200, 2);
  const auto m = zest::ZestModel::train(ds.examples_per_class(), {}, {2, 2048, 4.0});
  const auto h = zest::score_histogram(m, ds, 0.01, zest::HistogramGrouping::in_out_class, 2);
  ASSERT_EQ(h.groups.size(), 2u);
  EXPECT_LE(h.bucket_count, 101u);
  EXPECT_EQ(h.group_total(0), 200u);
  EXPECT_EQ(h.group_total(1), 200u);
  const auto p = zest::score_histogram(m, ds, 0.05, zest::HistogramGrouping::per_label);
  EXPECT_EQ(p.groups, ds.labels());
  EXPECT_EQ(p.group_total(0) + p.group_total(1), 200u);
  EXPECT_NE(h.to_csv().find("bucket_low"), std::string::npos);
}

TEST(Ablation, GridNamesAndRun) {
  const auto grid = zest::ablation_grid({1, 2}, {false, true}, {2, 2048, 4.0});
  ASSERT_EQ(grid.size(), 4u);
  EXPECT_FALSE(grid[0].prep.pad_words);
  EXPECT_EQ(grid[3].schedule.count, 2u);
  zest::SynthSpec spec;
  spec.kind = zest::SynthKind::disjoint_vocab;
  spec.classes = 3;
  const auto ds = zest::synth_corpus(spec, 300, 1);
  const auto rows = zest::ablation_run(ds, zest::SplitSpec{0.2, 1, true}, grid);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& row : rows) {
    EXPECT_EQ(row.report.total, 60u);
    EXPECT_GT(row.report.accuracy, 0.8) << row.config.name;
  }
}

TEST(Bench, AllMethodsRun) {
  zest::SynthSpec spec;
  spec.kind = zest::SynthKind::disjoint_vocab;
  spec.classes = 3;
  const auto [train, test] = zest::split(zest::synth_corpus(spec, 300, 2), {0.2, 3, true});
  zest::BenchOptions opt;
  opt.schedule = {2, 2048, 4.0};
  for (const std::string m : {"zest", "concat:zstd", "concat:deflate", "ngram", "nb", "ensemble"}) {
    const auto r = zest::run_method(m, train, test, opt);
    EXPECT_EQ(r.method, m);
    EXPECT_GT(r.accuracy, 0.8) << m;
    EXPECT_GT(r.model_bytes, 0u) << m;
  }
  EXPECT_THROW(zest::run_method("gzip-magic", train, test, opt), std::invalid_argument);
  EXPECT_THROW(zest::run_method("concat:bzip2", train, test, opt), zest::UnsupportedCodec);
}

}  // namespace
