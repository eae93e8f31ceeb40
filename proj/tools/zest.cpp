// zest: train, apply and evaluate compression-based text affinity models.
//
// Exit codes: 0 success, 1 usage error (bad flags or flag combinations,
// rejected before any work), 2 data or model error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "zest/baselines.hpp"
#include "zest/container.hpp"
#include "zest/datasets.hpp"
#include "zest/errors.hpp"
#include "zest/eval.hpp"
#include "zest/model.hpp"
#include "zest/parallel.hpp"
#include "zest/synth.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  // input
  std::string data;
  std::string format;  // empty: infer
  std::string text_column = "text";
  std::string label_column = "label";
  bool replace_invalid = false;
  std::string synth;
  std::size_t synth_size = 3000;
  std::size_t synth_classes = 6;
  std::string subset = "all";

  // model
  std::string model;
  bool no_normalize = false;
  bool no_pad = false;
  std::size_t pad_length = 10;
  std::vector<std::size_t> dicts;
  std::size_t base_size = 16 * 1024;
  double growth = 4.0;
  int level = 3;
  std::string codec;
  unsigned trainer_k = 200;

  // split
  double test_fraction = 0.2;
  std::uint64_t seed = 0;

  // output
  bool json = false;
  std::string histogram;
  double bucket_width = 0.01;
  std::string grouping = "in-out";
  std::string target_label;
  std::string methods = "zest,concat:zstd,ngram,nb,ensemble";
  std::size_t threads = 0;
};

// ---------------------------------------------------------------------------
// Flag groups

void add_input_flags(CLI::App& cmd, Config& c, bool labeled) {
  cmd.add_option("--data", c.data, "Input file, directory, or - for standard input");
  cmd.add_option("--format", c.format, "csv | jsonl | dir | lines (default: from the path)")
      ->check(CLI::IsMember({"csv", "jsonl", "dir", "lines"}));
  cmd.add_option("--text-column", c.text_column, "CSV column / JSON field holding the text")
      ->capture_default_str();
  if (labeled) {
    cmd.add_option("--label-column", c.label_column, "CSV column / JSON field holding the label")
        ->capture_default_str();
  }
  cmd.add_flag("--replace-invalid", c.replace_invalid,
               "Replace ill-formed UTF-8 with U+FFFD instead of failing");
  cmd.add_option("--synth", c.synth, "Synthetic corpus instead of --data")
      ->check(CLI::IsMember({"disjoint-script", "shared-head", "disjoint-vocab"}));
  cmd.add_option("--synth-size", c.synth_size, "Synthetic corpus documents")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd.add_option("--synth-classes", c.synth_classes, "Synthetic corpus classes")
      ->capture_default_str()
      ->check(CLI::Range(2, 1000));
}

void add_subset_flags(CLI::App& cmd, Config& c) {
  cmd.add_option("--subset", c.subset, "Use the train or test half of the seeded split, or all")
      ->capture_default_str()
      ->check(CLI::IsMember({"all", "train", "test"}));
}

void add_split_flags(CLI::App& cmd, Config& c, bool fraction = true) {
  if (fraction) {
    cmd.add_option("--test-fraction", c.test_fraction, "Held-out fraction per label")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
  }
  cmd.add_option("--seed", c.seed, "Seed for the split and synthetic corpora")
      ->capture_default_str();
}

void add_training_flags(CLI::App& cmd, Config& c, bool multi_dicts) {
  cmd.add_flag("--no-normalize", c.no_normalize, "Skip punctuation removal and lowercasing");
  cmd.add_flag("--no-pad", c.no_pad, "Skip word padding");
  cmd.add_option("--pad-length", c.pad_length, "Padded word length in code points")
      ->capture_default_str()
      ->check(CLI::Range(1, 1000));
  auto* d = cmd.add_option("--dicts", c.dicts,
                           multi_dicts ? "Dictionary counts to compare, e.g. 1,2,4"
                                       : "Dictionaries per class");
  d->delimiter(',')->check(CLI::Range(1, 16));
  if (!multi_dicts) d->expected(1);
  cmd.add_option("--base-size", c.base_size, "Smallest dictionary size in bytes")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{256}, std::size_t{1} << 31));
  cmd.add_option("--growth", c.growth, "Size ratio between consecutive dictionaries")
      ->capture_default_str()
      ->check(CLI::Range(1.0001, 1024.0));
  cmd.add_option("--level", c.level, "Compression level")
      ->capture_default_str()
      ->check(CLI::Range(1, 19));
  cmd.add_option("--trainer-k", c.trainer_k,
                 "Dictionary trainer segment size (0 = search, much slower)")
      ->capture_default_str();
}

void add_threads_flag(CLI::App& cmd, Config& c) {
  cmd.add_option("--threads", c.threads, "Worker threads (0 = logical CPUs)")
      ->capture_default_str();
}

// ---------------------------------------------------------------------------
// Input

zest::RecordFormat record_format(const Config& c) {
  if (c.format == "csv") return zest::RecordFormat::csv;
  if (c.format == "jsonl") return zest::RecordFormat::jsonl;
  if (c.format == "lines") return zest::RecordFormat::lines;
  const auto ext = fs::path(c.data).extension().string();
  if (ext == ".csv") return zest::RecordFormat::csv;
  if (ext == ".jsonl" || ext == ".ndjson") return zest::RecordFormat::jsonl;
  return zest::RecordFormat::lines;
}

bool is_dir_input(const Config& c) {
  return c.format == "dir" || (c.format.empty() && c.data != "-" && fs::is_directory(c.data));
}

void check_input(const Config& c, bool labeled) {
  if (c.data.empty() == c.synth.empty()) throw UsageError("give exactly one of --data or --synth");
  if (!c.synth.empty() && c.format.size()) throw UsageError("--format applies to --data only");
  if (labeled && !c.data.empty() && !is_dir_input(c) &&
      record_format(c) == zest::RecordFormat::lines) {
    throw UsageError("plain-line input has no labels; use --format csv, jsonl or dir");
  }
  if (c.subset != "all" && (c.test_fraction <= 0.0 || c.test_fraction >= 1.0)) {
    throw UsageError("--test-fraction must be strictly between 0 and 1");
  }
}

zest::LabeledDataset synth_dataset(const Config& c) {
  zest::SynthSpec spec;
  spec.kind = zest::parse_synth_kind(c.synth);
  spec.classes = c.synth_classes;
  return zest::synth_corpus(spec, c.synth_size, c.seed);
}

zest::LabeledDataset apply_subset(zest::LabeledDataset ds, const Config& c) {
  if (c.subset == "all") return ds;
  auto halves = zest::split(ds, {c.test_fraction, c.seed, true});
  return c.subset == "train" ? std::move(halves.first) : std::move(halves.second);
}

zest::LabeledDataset load_labeled(const Config& c) {
  if (!c.synth.empty()) return apply_subset(synth_dataset(c), c);
  const auto bad = c.replace_invalid ? zest::InvalidUtf8::replace : zest::InvalidUtf8::reject;
  if (is_dir_input(c)) return apply_subset(zest::load_dir_per_class(c.data, bad), c);
  zest::ReaderOptions opt{record_format(c), c.text_column, c.label_column, bad};
  zest::FileRecordReader reader(c.data, opt);
  zest::LabeledDataset ds;
  ds.source = c.data;
  while (auto r = reader.next()) ds.records.push_back(std::move(*r));
  if (ds.records.empty()) throw zest::EmptyDataset("no records in '" + c.data + "'");
  return apply_subset(std::move(ds), c);
}

// Unlabeled texts, pulled in batches so large inputs stream.
class TextSource {
 public:
  explicit TextSource(const Config& c) {
    if (!c.synth.empty()) {
      memory_ = synth_dataset(c).texts();
      return;
    }
    const auto bad = c.replace_invalid ? zest::InvalidUtf8::replace : zest::InvalidUtf8::reject;
    if (is_dir_input(c)) {
      memory_ = zest::load_dir_per_class(c.data, bad).texts();
      return;
    }
    reader_.emplace(c.data, zest::ReaderOptions{record_format(c), c.text_column, "", bad});
  }

  // Next batch of up to `max` texts; empty at end of input.
  std::vector<std::string> next(std::size_t max) {
    std::vector<std::string> out;
    while (out.size() < max) {
      if (reader_) {
        auto r = reader_->next();
        if (!r) break;
        out.push_back(std::move(r->text));
      } else {
        if (pos_ == memory_.size()) break;
        out.push_back(std::move(memory_[pos_++]));
      }
    }
    return out;
  }

 private:
  std::optional<zest::FileRecordReader> reader_;
  std::vector<std::string> memory_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Settings

zest::PrepConfig prep_of(const Config& c) {
  return zest::PrepConfig{!c.no_normalize, !c.no_pad, c.pad_length};
}

zest::TelescopeSchedule schedule_of(const Config& c) {
  zest::TelescopeSchedule s;
  if (!c.dicts.empty()) s.count = c.dicts.front();
  s.base_size = c.base_size;
  s.growth = c.growth;
  s.validate();
  return s;
}

zest::CodecParams params_of(const Config& c) {
  zest::CodecParams p;
  p.level = c.level;
  return p;
}

zest::TrainOptions train_options_of(const Config& c) {
  zest::TrainOptions o;
  o.threads = c.threads;
  o.trainer.k = c.trainer_k;
  return o;
}

void check_schedule(const Config& c) {
  try {
    zest::TelescopeSchedule s{1, c.base_size, c.growth};
    for (std::size_t k : c.dicts.empty() ? std::vector<std::size_t>{4} : c.dicts) {
      s.count = k;
      s.validate();
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void check_codec(const Config& c) {
  if (c.codec.empty()) return;
  if (c.codec != "zstd" && c.codec != "zstd_dict") {
    throw UsageError("--codec '" + c.codec + "' has no dictionary mode; only zstd is supported");
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_train(const Config& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ds = load_labeled(c);
  const auto model = zest::ZestModel::train(ds.examples_per_class(), prep_of(c), schedule_of(c),
                                            params_of(c), train_options_of(c));
  model.save(c.model);
  const double secs = seconds_since(t0);

  if (c.json) {
    json classes = json::array();
    for (const auto& cls : model.classes()) {
      classes.push_back({{"label", cls.label},
                         {"examples", cls.example_count},
                         {"prepared_bytes", cls.example_bytes}});
    }
    json j{{"model", c.model},
           {"records", ds.size()},
           {"classes", classes},
           {"dictionary_sizes", model.schedule().sizes()},
           {"dictionary_bytes", model.dictionary_bytes()},
           {"seconds", secs}};
    std::cout << j.dump() << '\n';
  } else {
    std::cout << "trained " << model.classes().size() << " classes on " << ds.size()
              << " records in " << fixed(secs, 2) << " s\n";
    for (const auto& cls : model.classes()) {
      std::cout << "  " << cls.label << ": " << cls.example_count << " examples, "
                << cls.example_bytes << " prepared bytes\n";
    }
    std::cout << "dictionary bytes: " << model.dictionary_bytes() << "\nwrote " << c.model << '\n';
  }
  return 0;
}

// Scores batches in parallel and emits results in input order.
template <typename Result, typename Score, typename Emit>
void stream_scores(const Config& c, Score&& score, Emit&& emit) {
  const std::size_t threads = c.threads == 0 ? zest::default_thread_count() : c.threads;
  TextSource source(c);
  std::size_t index = 0;
  for (;;) {
    const auto batch = source.next(256 * threads);
    if (batch.empty()) break;
    std::vector<Result> results(batch.size());
    zest::parallel_for(batch.size(), threads, [&](std::size_t i) { results[i] = score(batch[i]); });
    for (std::size_t i = 0; i < batch.size(); ++i) emit(index++, results[i]);
    std::cout.flush();
  }
}

int cmd_predict(const Config& c) {
  const auto model = zest::ZestModel::load(c.model);
  stream_scores<std::string>(
      c, [&](const std::string& t) { return model.classify(t); },
      [&](std::size_t i, const std::string& label) {
        if (c.json) {
          std::cout << json{{"index", i}, {"label", label}}.dump() << '\n';
        } else {
          std::cout << label << '\n';
        }
      });
  return 0;
}

int cmd_score(const Config& c) {
  const auto model = zest::ZestModel::load(c.model);
  const auto labels = model.labels();
  if (!c.json) {
    std::cout << "index,argmax";
    for (const auto& l : labels) std::cout << ',' << csv_field("raw:" + l);
    for (const auto& l : labels) std::cout << ',' << csv_field("adjusted:" + l);
    std::cout << '\n';
  }
  stream_scores<zest::ScoreVector>(
      c, [&](const std::string& t) { return model.score(t); },
      [&](std::size_t i, const zest::ScoreVector& sv) {
        if (c.json) {
          json raw = json::object(), adj = json::object();
          for (std::size_t k = 0; k < labels.size(); ++k) {
            raw[labels[k]] = sv.raw[k];
            adj[labels[k]] = sv.adjusted[k];
          }
          std::cout << json{{"index", i}, {"argmax", sv.argmax()}, {"raw", raw}, {"adjusted", adj}}
                           .dump()
                    << '\n';
        } else {
          std::cout << i << ',' << csv_field(sv.argmax());
          for (double v : sv.raw) std::cout << ',' << fixed(v);
          for (double v : sv.adjusted) std::cout << ',' << fixed(v);
          std::cout << '\n';
        }
      });
  return 0;
}

int cmd_rank(const Config& c) {
  const auto model = zest::ZestModel::load(c.model);
  model.class_index(c.target_label);  // unknown label fails before reading input
  TextSource source(c);
  std::vector<std::string> texts;
  for (auto batch = source.next(4096); !batch.empty(); batch = source.next(4096)) {
    for (auto& t : batch) texts.push_back(std::move(t));
  }
  const auto ranked = model.rank(texts, c.target_label, c.threads);
  for (const auto& r : ranked) {
    if (c.json) {
      std::cout << json{{"index", r.index}, {"affinity", r.affinity}, {"text", texts[r.index]}}
                       .dump()
                << '\n';
    } else {
      std::string flat = texts[r.index];
      for (char& ch : flat) {
        if (ch == '\t' || ch == '\n' || ch == '\r') ch = ' ';
      }
      std::cout << r.index << '\t' << fixed(r.affinity) << '\t' << flat << '\n';
    }
  }
  return 0;
}

int cmd_evaluate(const Config& c) {
  const auto model = zest::ZestModel::load(c.model);
  const auto ds = load_labeled(c);
  auto report = zest::evaluate([&](std::string_view t) { return model.classify(t); },
                               model.labels(), ds, c.threads);
  report.method = "zest";
  report.model_bytes = model.serialize().size();
  if (!c.histogram.empty()) {
    const auto grouping = c.grouping == "per-label" ? zest::HistogramGrouping::per_label
                                                     : zest::HistogramGrouping::in_out_class;
    const auto h = zest::score_histogram(model, ds, c.bucket_width, grouping, c.threads);
    zest::write_file_atomic(c.histogram, h.to_csv());
  }
  std::cout << (c.json ? report.to_json() + "\n" : report.to_table());
  return 0;
}

int cmd_ablate(const Config& c) {
  const auto ds = load_labeled(c);
  const auto counts = c.dicts.empty() ? std::vector<std::size_t>{1, 2, 4} : c.dicts;
  zest::TelescopeSchedule base{1, c.base_size, c.growth};
  const auto configs = zest::ablation_grid(counts, {false, true}, base, prep_of(c));
  const auto rows = zest::ablation_run(ds, zest::SplitSpec{c.test_fraction, c.seed, true}, configs,
                                       params_of(c), train_options_of(c));
  std::vector<zest::EvaluationReport> reports;
  for (const auto& r : rows) reports.push_back(r.report);
  std::cout << (c.json ? zest::reports_to_json(reports) + "\n" : zest::format_report_table(reports));
  return 0;
}

std::vector<std::string> split_methods(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string m; std::getline(in, m, ',');) {
    if (!m.empty()) out.push_back(m);
  }
  return out;
}

void check_methods(const Config& c) {
  const auto methods = split_methods(c.methods);
  if (methods.empty()) throw UsageError("--methods is empty");
  for (const auto& m : methods) {
    if (m == "zest" || m == "ngram" || m == "nb" || m == "ensemble") continue;
    if (m.rfind("concat:", 0) == 0) {
      try {
        const auto id = zest::parse_codec(m.substr(7));
        if (!zest::codec_supported(id)) throw UsageError("codec in '" + m + "' is not built in");
      } catch (const zest::UnsupportedCodec& e) {
        throw UsageError(e.what());
      }
      continue;
    }
    throw UsageError("unknown method '" + m + "'");
  }
}

int cmd_bench(const Config& c) {
  const auto ds = load_labeled(c);
  const auto [train, test] = zest::split(ds, {c.test_fraction, c.seed, true});
  zest::BenchOptions opt;
  opt.prep = prep_of(c);
  opt.schedule = schedule_of(c);
  opt.params = params_of(c);
  opt.trainer.k = c.trainer_k;
  opt.threads = c.threads;
  std::vector<zest::EvaluationReport> reports;
  for (const auto& m : split_methods(c.methods)) {
    reports.push_back(zest::run_method(m, train, test, opt));
  }
  std::cout << (c.json ? zest::reports_to_json(reports) + "\n" : zest::format_report_table(reports));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compression-based text affinity scoring and classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "zest 0.1.0");
  Config c;

  auto* train = app.add_subcommand("train", "Train a model from labeled examples");
  add_input_flags(*train, c, true);
  add_subset_flags(*train, c);
  add_split_flags(*train, c);
  add_training_flags(*train, c, false);
  train->add_option("--codec", c.codec, "Dictionary codec (zstd)");
  train->add_option("--model", c.model, "Output model path")->required();
  train->add_flag("--json", c.json, "Machine-readable summary");
  add_threads_flag(*train, c);

  auto* predict = app.add_subcommand("predict", "Print the predicted label of every record");
  auto* score = app.add_subcommand("score", "Print raw and adjusted affinities of every record");
  auto* rank = app.add_subcommand("rank", "Sort records by affinity to a label");
  for (auto* cmd : {predict, score, rank}) {
    cmd->add_option("--model", c.model, "Model file")->required();
    add_input_flags(*cmd, c, false);
    add_split_flags(*cmd, c, false);
    cmd->add_flag("--json", c.json, "JSON lines output");
    add_threads_flag(*cmd, c);
  }
  rank->add_option("--target-label", c.target_label, "Label to rank against")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Score a model on labeled data");
  evaluate->add_option("--model", c.model, "Model file")->required();
  add_input_flags(*evaluate, c, true);
  add_subset_flags(*evaluate, c);
  add_split_flags(*evaluate, c);
  evaluate->add_flag("--json", c.json, "JSON report");
  evaluate->add_option("--histogram", c.histogram, "Write an affinity histogram CSV here");
  evaluate->add_option("--bucket-width", c.bucket_width, "Histogram bucket width")
      ->capture_default_str()
      ->check(CLI::Range(1e-6, 1.0));
  evaluate->add_option("--grouping", c.grouping, "Histogram grouping: in-out | per-label")
      ->capture_default_str()
      ->check(CLI::IsMember({"in-out", "per-label"}));
  add_threads_flag(*evaluate, c);

  auto* ablate = app.add_subcommand("ablate", "Compare dictionary counts with padding on and off");
  add_input_flags(*ablate, c, true);
  add_split_flags(*ablate, c);
  add_training_flags(*ablate, c, true);
  ablate->add_flag("--json", c.json, "JSON output");
  add_threads_flag(*ablate, c);

  auto* bench = app.add_subcommand("bench", "Compare zest with baseline classifiers");
  add_input_flags(*bench, c, true);
  add_split_flags(*bench, c);
  add_training_flags(*bench, c, false);
  bench->add_option("--methods", c.methods, "zest, concat:<codec>, ngram, nb, ensemble")
      ->capture_default_str();
  bench->add_flag("--json", c.json, "JSON output");
  add_threads_flag(*bench, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    auto* cmd = app.get_subcommands().front();
    const bool labeled = cmd == train || cmd == evaluate || cmd == ablate || cmd == bench;
    check_input(c, labeled);
    if (cmd == train || cmd == ablate || cmd == bench) check_schedule(c);
    if (cmd == train) check_codec(c);
    if (cmd == bench) check_methods(c);
    if (!c.histogram.empty() && c.json && c.histogram == "-") {
      throw UsageError("--histogram - would mix with --json output");
    }
    if (cmd->get_option_no_throw("--bucket-width") && cmd->count("--bucket-width") &&
        c.histogram.empty()) {
      throw UsageError("--bucket-width needs --histogram");
    }

    if (cmd == train) return cmd_train(c);
    if (cmd == predict) return cmd_predict(c);
    if (cmd == score) return cmd_score(c);
    if (cmd == rank) return cmd_rank(c);
    if (cmd == evaluate) return cmd_evaluate(c);
    if (cmd == ablate) return cmd_ablate(c);
    return cmd_bench(c);
  } catch (const UsageError& e) {
    std::cerr << "zest: " << e.what() << "\nRun with --help for usage.\n";
    return 1;
  } catch (const zest::Error& e) {
    std::cout.flush();
    std::cerr << "zest: error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "zest: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "zest: error: " << e.what() << '\n';
    return 2;
  }
}
