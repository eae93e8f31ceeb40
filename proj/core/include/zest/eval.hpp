#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "zest/compression.hpp"
#include "zest/datasets.hpp"
#include "zest/model.hpp"
#include "zest/text_prep.hpp"

namespace zest {

struct ClassMetrics {
  std::string label;
  double precision = 0.0;  // 0 when the class is never predicted
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvaluationReport {
  std::string method;
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> confusion;  // [truth][prediction]
  std::size_t total = 0;
  double accuracy = 0.0;
  std::vector<ClassMetrics> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double fom = 0.0;  // (macro_precision + macro_recall) / 2
  double train_seconds = 0.0;
  double score_seconds = 0.0;
  std::size_t model_bytes = 0;

  double total_seconds() const { return train_seconds + score_seconds; }
  std::string to_json() const;
  std::string to_table() const;
};

// Metrics from aligned truth/prediction lists. Throws LabelMismatch when
// either list names a label outside `labels`.
EvaluationReport compute_metrics(const std::vector<std::string>& labels,
                                 const std::vector<std::string>& truths,
                                 const std::vector<std::string>& predictions);

using Predictor = std::function<std::string(std::string_view)>;

// Runs `predict` over the test records (concurrently when threads != 1) and
// records the scoring wall time. Throws LabelMismatch when a test label is
// not one of `model_labels`.
EvaluationReport evaluate(const Predictor& predict, const std::vector<std::string>& model_labels,
                          const LabeledDataset& test, std::size_t threads = 1);

// One row per method, aligned columns.
std::string format_report_table(const std::vector<EvaluationReport>& reports);
std::string reports_to_json(const std::vector<EvaluationReport>& reports);

// ---------------------------------------------------------------------------

struct AblationConfig {
  std::string name;
  TelescopeSchedule schedule;
  PrepConfig prep;
};

struct AblationRow {
  AblationConfig config;
  EvaluationReport report;
};

// Trains and evaluates one Zest model per configuration on the same split.
std::vector<AblationRow> ablation_run(const LabeledDataset& train, const LabeledDataset& test,
                                      const std::vector<AblationConfig>& configs,
                                      const CodecParams& params = {},
                                      const TrainOptions& options = {});
std::vector<AblationRow> ablation_run(const LabeledDataset& dataset, const SplitSpec& split_spec,
                                      const std::vector<AblationConfig>& configs,
                                      const CodecParams& params = {},
                                      const TrainOptions& options = {});

// Cartesian product of dictionary counts and padding on/off.
std::vector<AblationConfig> ablation_grid(const std::vector<std::size_t>& dict_counts,
                                          const std::vector<bool>& padding,
                                          const TelescopeSchedule& base = {},
                                          const PrepConfig& prep = {});

// ---------------------------------------------------------------------------

enum class HistogramGrouping {
  in_out_class,  // every (record, class) pair; group by whether class == truth
  per_label,     // each record's affinity to its own label, grouped by label
};

struct ScoreHistogram {
  double bucket_width = 0.01;
  std::size_t bucket_count = 0;  // buckets cover [0, bucket_count * width)
  std::vector<std::string> groups;
  std::vector<std::vector<std::size_t>> counts;  // [group][bucket]

  std::size_t bucket_of(double value) const;
  std::size_t group_total(std::size_t group) const;
  // Rows of bucket_low,bucket_high,group,count for every bucket of every group.
  std::string to_csv() const;
};

ScoreHistogram make_histogram(double bucket_width, std::vector<std::string> groups);

ScoreHistogram score_histogram(const ZestModel& model, const LabeledDataset& dataset,
                               double bucket_width = 0.01,
                               HistogramGrouping grouping = HistogramGrouping::in_out_class,
                               std::size_t threads = 1);

// ---------------------------------------------------------------------------
// Method comparison: zest, concat:<codec>, ngram, nb, ensemble (zest + nb).

struct BenchOptions {
  PrepConfig prep;                                    // zest
  PrepConfig baseline_prep{true, false, 10};          // ngram / nb / concat
  TelescopeSchedule schedule;
  CodecParams params;                                 // zest codec; level reused by concat
  TrainerParams trainer;
  double nb_alpha = 1.0;
  std::size_t ngram_n = 3;
  std::size_t threads = 1;
};

// Throws UnsupportedCodec / std::invalid_argument for unknown methods.
EvaluationReport run_method(std::string_view method, const LabeledDataset& train,
                            const LabeledDataset& test, const BenchOptions& options);

}  // namespace zest
