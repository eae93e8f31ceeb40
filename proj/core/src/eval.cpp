#include "zest/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "zest/baselines.hpp"
#include "zest/errors.hpp"
#include "zest/parallel.hpp"

namespace zest {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t label_index(const std::vector<std::string>& labels, const std::string& label) {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw LabelMismatch("label '" + label + "' is not known to the model");
  return static_cast<std::size_t>(it - labels.begin());
}

json report_json(const EvaluationReport& r) {
  json per_class = json::array();
  for (const auto& m : r.per_class) {
    per_class.push_back({{"label", m.label},
                         {"precision", m.precision},
                         {"recall", m.recall},
                         {"f1", m.f1},
                         {"support", m.support}});
  }
  return {{"method", r.method},
          {"labels", r.labels},
          {"total", r.total},
          {"accuracy", r.accuracy},
          {"macro_precision", r.macro_precision},
          {"macro_recall", r.macro_recall},
          {"macro_f1", r.macro_f1},
          {"fom", r.fom},
          {"per_class", per_class},
          {"confusion_matrix", r.confusion},
          {"train_seconds", r.train_seconds},
          {"score_seconds", r.score_seconds},
          {"model_bytes", r.model_bytes}};
}

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string pad_left(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

}  // namespace

EvaluationReport compute_metrics(const std::vector<std::string>& labels,
                                 const std::vector<std::string>& truths,
                                 const std::vector<std::string>& predictions) {
  if (truths.size() != predictions.size()) {
    throw std::invalid_argument("truths and predictions differ in length");
  }
  const std::size_t k = labels.size();
  EvaluationReport r;
  r.labels = labels;
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < truths.size(); ++i) {
    ++r.confusion[label_index(labels, truths[i])][label_index(labels, predictions[i])];
  }
  r.total = truths.size();

  std::size_t trace = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t row = 0, col = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row += r.confusion[c][j];
      col += r.confusion[j][c];
    }
    const std::size_t tp = r.confusion[c][c];
    trace += tp;
    ClassMetrics m;
    m.label = labels[c];
    m.support = row;
    m.precision = col == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(col);
    m.recall = row == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(row);
    m.f1 = m.precision + m.recall == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    r.macro_precision += m.precision;
    r.macro_recall += m.recall;
    r.macro_f1 += m.f1;
    r.per_class.push_back(std::move(m));
  }
  if (k > 0) {
    r.macro_precision /= static_cast<double>(k);
    r.macro_recall /= static_cast<double>(k);
    r.macro_f1 /= static_cast<double>(k);
  }
  r.fom = (r.macro_precision + r.macro_recall) / 2.0;
  r.accuracy = r.total == 0 ? 0.0 : static_cast<double>(trace) / static_cast<double>(r.total);
  return r;
}

EvaluationReport evaluate(const Predictor& predict, const std::vector<std::string>& model_labels,
                          const LabeledDataset& test, std::size_t threads) {
  std::vector<std::string> truths;
  truths.reserve(test.size());
  for (const auto& rec : test.records) {
    label_index(model_labels, rec.label);
    truths.push_back(rec.label);
  }
  std::vector<std::string> predictions(test.size());
  const auto t0 = Clock::now();
  parallel_for(test.size(), threads,
               [&](std::size_t i) { predictions[i] = predict(test.records[i].text); });
  const double elapsed = seconds_since(t0);
  EvaluationReport r = compute_metrics(model_labels, truths, predictions);
  r.score_seconds = elapsed;
  return r;
}

std::string EvaluationReport::to_json() const { return report_json(*this).dump(2); }

std::string EvaluationReport::to_table() const {
  std::ostringstream out;
  out << "method:          " << method << "\n"
      << "records:         " << total << "\n"
      << "accuracy:        " << fixed(accuracy, 4) << "\n"
      << "macro precision: " << fixed(macro_precision, 4) << "\n"
      << "macro recall:    " << fixed(macro_recall, 4) << "\n"
      << "macro F1:        " << fixed(macro_f1, 4) << "\n"
      << "FOM:             " << fixed(fom, 4) << "\n"
      << "train seconds:   " << fixed(train_seconds, 3) << "\n"
      << "score seconds:   " << fixed(score_seconds, 3) << "\n"
      << "model bytes:     " << model_bytes << "\n\n";

  std::size_t w = 9;
  for (const auto& l : labels) w = std::max(w, l.size() + 2);
  out << pad_right("label", w) << pad_left("precision", 11) << pad_left("recall", 9)
      << pad_left("f1", 9) << pad_left("support", 9) << "\n";
  for (const auto& m : per_class) {
    out << pad_right(m.label, w) << pad_left(fixed(m.precision, 4), 11)
        << pad_left(fixed(m.recall, 4), 9) << pad_left(fixed(m.f1, 4), 9)
        << pad_left(std::to_string(m.support), 9) << "\n";
  }

  out << "\nconfusion (rows = truth, columns = prediction)\n" << pad_right("", w);
  for (const auto& l : labels) out << pad_left(l, std::max<std::size_t>(l.size() + 1, 7));
  out << "\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << pad_right(labels[i], w);
    for (std::size_t j = 0; j < labels.size(); ++j) {
      out << pad_left(std::to_string(confusion[i][j]),
                      std::max<std::size_t>(labels[j].size() + 1, 7));
    }
    out << "\n";
  }
  return out.str();
}

std::string format_report_table(const std::vector<EvaluationReport>& reports) {
  std::size_t w = 8;
  for (const auto& r : reports) w = std::max(w, r.method.size() + 2);
  std::ostringstream out;
  out << pad_right("method", w) << pad_left("accuracy", 10) << pad_left("macroP", 9)
      << pad_left("macroR", 9) << pad_left("macroF1", 9) << pad_left("FOM", 9)
      << pad_left("train_s", 10) << pad_left("score_s", 10) << pad_left("total_s", 10)
      << pad_left("size_MB", 10) << "\n";
  for (const auto& r : reports) {
    out << pad_right(r.method, w) << pad_left(fixed(r.accuracy, 4), 10)
        << pad_left(fixed(r.macro_precision, 4), 9) << pad_left(fixed(r.macro_recall, 4), 9)
        << pad_left(fixed(r.macro_f1, 4), 9) << pad_left(fixed(r.fom, 4), 9)
        << pad_left(fixed(r.train_seconds, 3), 10) << pad_left(fixed(r.score_seconds, 3), 10)
        << pad_left(fixed(r.total_seconds(), 3), 10)
        << pad_left(fixed(static_cast<double>(r.model_bytes) / 1e6, 3), 10) << "\n";
  }
  return out.str();
}

std::string reports_to_json(const std::vector<EvaluationReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(report_json(r));
  return arr.dump(2);
}

// ---------------------------------------------------------------------------

std::vector<AblationRow> ablation_run(const LabeledDataset& train, const LabeledDataset& test,
                                      const std::vector<AblationConfig>& configs,
                                      const CodecParams& params, const TrainOptions& options) {
  const ExamplesPerClass examples = train.examples_per_class();
  const std::size_t threads = options.threads;
  std::vector<AblationRow> rows;
  for (const auto& cfg : configs) {
    const auto t0 = Clock::now();
    const ZestModel model = ZestModel::train(examples, cfg.prep, cfg.schedule, params, options);
    const double train_s = seconds_since(t0);
    EvaluationReport r = evaluate(
        [&](std::string_view t) { return model.classify(t); }, model.labels(), test, threads);
    r.method = cfg.name;
    r.train_seconds = train_s;
    r.model_bytes = model.serialize().size();
    rows.push_back({cfg, std::move(r)});
  }
  return rows;
}

std::vector<AblationRow> ablation_run(const LabeledDataset& dataset, const SplitSpec& split_spec,
                                      const std::vector<AblationConfig>& configs,
                                      const CodecParams& params, const TrainOptions& options) {
  const auto [train, test] = split(dataset, split_spec);
  return ablation_run(train, test, configs, params, options);
}

std::vector<AblationConfig> ablation_grid(const std::vector<std::size_t>& dict_counts,
                                          const std::vector<bool>& padding,
                                          const TelescopeSchedule& base, const PrepConfig& prep) {
  std::vector<AblationConfig> out;
  for (bool pad : padding) {
    for (std::size_t k : dict_counts) {
      AblationConfig cfg;
      cfg.schedule = base;
      cfg.schedule.count = k;
      cfg.prep = prep;
      cfg.prep.pad_words = pad;
      cfg.name = "zest " + std::to_string(k) + "D" + (pad ? " pad" : " nopad");
      out.push_back(std::move(cfg));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

ScoreHistogram make_histogram(double bucket_width, std::vector<std::string> groups) {
  if (!(bucket_width > 0.0 && bucket_width <= 1.0)) {
    throw std::invalid_argument("bucket width must be in (0, 1]");
  }
  ScoreHistogram h;
  h.bucket_width = bucket_width;
  h.bucket_count = static_cast<std::size_t>(std::floor(1.0 / bucket_width + 1e-9)) + 1;
  h.groups = std::move(groups);
  h.counts.assign(h.groups.size(), std::vector<std::size_t>(h.bucket_count, 0));
  return h;
}

std::size_t ScoreHistogram::bucket_of(double value) const {
  if (!(value > 0.0)) return 0;
  const auto b = static_cast<std::size_t>(std::floor(value / bucket_width + 1e-9));
  return std::min(b, bucket_count - 1);
}

std::size_t ScoreHistogram::group_total(std::size_t group) const {
  std::size_t n = 0;
  for (auto c : counts.at(group)) n += c;
  return n;
}

std::string ScoreHistogram::to_csv() const {
  std::ostringstream out;
  out << "bucket_low,bucket_high,group,count\n";
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t b = 0; b < bucket_count; ++b) {
      out << fixed(static_cast<double>(b) * bucket_width, 4) << ','
          << fixed(static_cast<double>(b + 1) * bucket_width, 4) << ',';
      const bool quote = groups[g].find_first_of(",\"\n") != std::string::npos;
      if (quote) {
        out << '"';
        for (char c : groups[g]) out << (c == '"' ? "\"\"" : std::string(1, c));
        out << '"';
      } else {
        out << groups[g];
      }
      out << ',' << counts[g][b] << '\n';
    }
  }
  return out.str();
}

ScoreHistogram score_histogram(const ZestModel& model, const LabeledDataset& dataset,
                               double bucket_width, HistogramGrouping grouping,
                               std::size_t threads) {
  const auto labels = model.labels();
  for (const auto& rec : dataset.records) label_index(labels, rec.label);

  std::vector<ScoreVector> scores(dataset.size());
  parallel_for(dataset.size(), threads,
               [&](std::size_t i) { scores[i] = model.score(dataset.records[i].text); });

  if (grouping == HistogramGrouping::in_out_class) {
    ScoreHistogram h = make_histogram(bucket_width, {"in-class", "out-of-class"});
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const std::size_t truth = label_index(labels, dataset.records[i].label);
      for (std::size_t c = 0; c < labels.size(); ++c) {
        ++h.counts[c == truth ? 0 : 1][h.bucket_of(scores[i].adjusted[c])];
      }
    }
    return h;
  }
  ScoreHistogram h = make_histogram(bucket_width, labels);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const std::size_t truth = label_index(labels, dataset.records[i].label);
    ++h.counts[truth][h.bucket_of(scores[i].adjusted[truth])];
  }
  return h;
}

// ---------------------------------------------------------------------------

EvaluationReport run_method(std::string_view method, const LabeledDataset& train,
                            const LabeledDataset& test, const BenchOptions& options) {
  const ExamplesPerClass examples = train.examples_per_class();
  const std::size_t threads = options.threads;
  EvaluationReport r;
  auto t0 = Clock::now();

  if (method == "zest") {
    const ZestModel model = ZestModel::train(examples, options.prep, options.schedule,
                                             options.params, TrainOptions{threads, options.trainer});
    const double train_s = seconds_since(t0);
    r = evaluate([&](std::string_view t) { return model.classify(t); }, model.labels(), test,
                 threads);
    r.train_seconds = train_s;
    r.model_bytes = model.serialize().size();
  } else if (method.rfind("concat:", 0) == 0) {
    CodecParams params = options.params;
    params.codec = parse_codec(method.substr(7));
    if (params.codec == CodecId::zstd_dict) params.codec = CodecId::zstd_plain;
    const ConcatScorer scorer = ConcatScorer::build(examples, params, options.baseline_prep);
    const double train_s = seconds_since(t0);
    r = evaluate([&](std::string_view t) { return scorer.classify(t); }, scorer.labels(), test,
                 threads);
    r.train_seconds = train_s;
    r.model_bytes = scorer.serialize().size();
  } else if (method == "ngram") {
    const NGramModel model = NGramModel::train(examples, options.ngram_n, options.baseline_prep);
    const double train_s = seconds_since(t0);
    r = evaluate([&](std::string_view t) { return model.classify(t); }, model.labels(), test,
                 threads);
    r.train_seconds = train_s;
    r.model_bytes = model.serialize().size();
  } else if (method == "nb") {
    const NaiveBayes nb = NaiveBayes::train(examples, options.nb_alpha, options.baseline_prep);
    const double train_s = seconds_since(t0);
    r = evaluate([&](std::string_view t) { return nb.classify(t); }, nb.labels(), test, threads);
    r.train_seconds = train_s;
    r.model_bytes = nb.serialize().size();
  } else if (method == "ensemble") {
    const ZestModel model = ZestModel::train(examples, options.prep, options.schedule,
                                             options.params, TrainOptions{threads, options.trainer});
    const NaiveBayes nb = NaiveBayes::train(examples, options.nb_alpha, options.baseline_prep);
    const double train_s = seconds_since(t0);
    r = evaluate(
        [&](std::string_view t) {
          const auto post = nb.posterior(t);
          std::vector<std::pair<std::string, double>> external;
          for (std::size_t c = 0; c < post.size(); ++c) external.emplace_back(nb.labels()[c], post[c]);
          const auto mixed = model.ensemble_score(t, external);
          std::size_t best = 0;
          for (std::size_t c = 1; c < mixed.size(); ++c) {
            if (mixed[c].second > mixed[best].second) best = c;
          }
          return mixed[best].first;
        },
        model.labels(), test, threads);
    r.train_seconds = train_s;
    r.model_bytes = model.serialize().size() + nb.serialize().size();
  } else {
    throw std::invalid_argument("unknown method '" + std::string(method) + "'");
  }
  r.method = std::string(method);
  return r;
}

}  // namespace zest
