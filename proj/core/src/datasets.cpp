#include "zest/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "zest/errors.hpp"
#include "zest/text_prep.hpp"

namespace zest {

std::vector<std::string> LabeledDataset::labels() const {
  std::vector<std::string> out;
  for (const auto& r : records) {
    if (std::find(out.begin(), out.end(), r.label) == out.end()) out.push_back(r.label);
  }
  return out;
}

ExamplesPerClass LabeledDataset::examples_per_class() const {
  ExamplesPerClass out;
  std::map<std::string, std::size_t, std::less<>> index;
  for (const auto& r : records) {
    auto [it, inserted] = index.try_emplace(r.label, out.size());
    if (inserted) out.emplace_back(r.label, std::vector<std::string>{});
    out[it->second].second.push_back(r.text);
  }
  return out;
}

std::vector<std::string> LabeledDataset::texts() const {
  std::vector<std::string> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.text);
  return out;
}

// ---------------------------------------------------------------------------

struct RecordReader::Impl {
  std::istream& in;
  std::string source;
  ReaderOptions opt;
  std::size_t line_no = 0;       // lines consumed so far
  std::size_t record_line = 0;   // first line of the last record
  bool first_line = true;
  std::optional<std::size_t> text_col, label_col;  // csv
  std::size_t header_width = 0;

  Impl(std::istream& s, std::string src, ReaderOptions o)
      : in(s), source(std::move(src)), opt(std::move(o)) {}

  bool read_line(std::string& out) {
    if (!std::getline(in, out)) return false;
    ++line_no;
    if (first_line) {
      first_line = false;
      if (out.rfind("\xEF\xBB\xBF", 0) == 0) out.erase(0, 3);
    }
    if (!out.empty() && out.back() == '\r') out.pop_back();
    std::replace(out.begin(), out.end(), '\r', '\n');
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(source, record_line, what);
  }

  std::string checked(std::string s) const {
    if (is_valid_utf8(s)) return s;
    if (opt.invalid_utf8 == InvalidUtf8::replace) return replace_invalid_utf8(s);
    fail("invalid UTF-8");
  }

  std::optional<std::vector<std::string>> csv_record() {
    std::string line;
    if (!read_line(line)) return std::nullopt;
    record_line = line_no;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool after_quote = false;
    std::size_t i = 0;
    for (;;) {
      if (i == line.size()) {
        if (quoted) {
          if (!read_line(line)) fail("unterminated quoted field");
          field.push_back('\n');
          i = 0;
          continue;
        }
        fields.push_back(std::move(field));
        return fields;
      }
      const char c = line[i++];
      if (quoted) {
        if (c == '"') {
          if (i < line.size() && line[i] == '"') {
            field.push_back('"');
            ++i;
          } else {
            quoted = false;
            after_quote = true;
          }
        } else {
          field.push_back(c);
        }
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        after_quote = false;
      } else if (c == '"' && field.empty() && !after_quote) {
        quoted = true;
      } else if (after_quote) {
        fail("unexpected character after closing quote");
      } else {
        field.push_back(c);
      }
    }
  }

  std::optional<Record> next_csv() {
    if (!text_col) {
      auto header = csv_record();
      if (!header) return std::nullopt;
      header_width = header->size();
      for (std::size_t i = 0; i < header->size(); ++i) {
        if ((*header)[i] == opt.text_field) text_col = i;
        if (!opt.label_field.empty() && (*header)[i] == opt.label_field) label_col = i;
      }
      if (!text_col) fail("no column named '" + opt.text_field + "'");
      if (!opt.label_field.empty() && !label_col) {
        fail("no column named '" + opt.label_field + "'");
      }
    }
    for (;;) {
      auto fields = csv_record();
      if (!fields) return std::nullopt;
      if (fields->size() == 1 && fields->front().empty()) continue;  // blank line
      if (fields->size() != header_width) {
        fail("expected " + std::to_string(header_width) + " fields, found " +
             std::to_string(fields->size()));
      }
      Record r{checked(std::move((*fields)[*text_col])), {}};
      if (label_col) {
        r.label = checked(std::move((*fields)[*label_col]));
        if (r.label.empty()) fail("empty label");
      }
      return r;
    }
  }

  std::optional<Record> next_jsonl() {
    std::string line;
    for (;;) {
      if (!read_line(line)) return std::nullopt;
      record_line = line_no;
      if (line.find_first_not_of(" \t\n") != std::string::npos) break;
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) fail("expected a JSON object");
    auto field = [&](const std::string& name) -> std::string {
      const auto it = j.find(name);
      if (it == j.end()) fail("missing field '" + name + "'");
      if (it->is_string()) return it->get<std::string>();
      if (it->is_number_integer() || it->is_boolean()) return it->dump();
      fail("field '" + name + "' must be a string");
    };
    Record r{checked(field(opt.text_field)), {}};
    if (!opt.label_field.empty()) {
      r.label = checked(field(opt.label_field));
      if (r.label.empty()) fail("empty label");
    }
    return r;
  }

  std::optional<Record> next_line() {
    std::string line;
    if (!read_line(line)) return std::nullopt;
    record_line = line_no;
    return Record{checked(std::move(line)), {}};
  }
};

RecordReader::RecordReader(std::istream& in, std::string source, ReaderOptions options)
    : impl_(std::make_unique<Impl>(in, std::move(source), std::move(options))) {}

RecordReader::~RecordReader() = default;

std::optional<Record> RecordReader::next() {
  switch (impl_->opt.format) {
    case RecordFormat::csv:
      return impl_->next_csv();
    case RecordFormat::jsonl:
      return impl_->next_jsonl();
    case RecordFormat::lines:
      return impl_->next_line();
  }
  return std::nullopt;
}

std::size_t RecordReader::line() const noexcept { return impl_->record_line; }

FileRecordReader::FileRecordReader(const std::filesystem::path& path, ReaderOptions options) {
  std::istream* in = &std::cin;
  if (path != "-") {
    auto f = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*f) throw IoError("cannot open '" + path.string() + "'");
    owned_ = std::move(f);
    in = owned_.get();
  }
  reader_ = std::make_unique<RecordReader>(*in, path.string(), std::move(options));
}

FileRecordReader::~FileRecordReader() = default;

namespace {

LabeledDataset load_stream(const std::filesystem::path& path, ReaderOptions options) {
  FileRecordReader reader(path, std::move(options));
  LabeledDataset ds;
  ds.source = path.string();
  while (auto r = reader.next()) ds.records.push_back(std::move(*r));
  if (ds.records.empty()) throw EmptyDataset("no records in '" + path.string() + "'");
  return ds;
}

}  // namespace

LabeledDataset load_csv(const std::filesystem::path& path, const std::string& text_column,
                        const std::string& label_column, InvalidUtf8 invalid_utf8) {
  return load_stream(path, {RecordFormat::csv, text_column, label_column, invalid_utf8});
}

LabeledDataset load_jsonl(const std::filesystem::path& path, const std::string& text_field,
                          const std::string& label_field, InvalidUtf8 invalid_utf8) {
  return load_stream(path, {RecordFormat::jsonl, text_field, label_field, invalid_utf8});
}

LabeledDataset load_dir_per_class(const std::filesystem::path& root, InvalidUtf8 invalid_utf8) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError("'" + root.string() + "' is not a directory");

  std::vector<fs::path> classes;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) classes.push_back(entry.path());
  }
  std::sort(classes.begin(), classes.end());

  LabeledDataset ds;
  ds.source = root.string();
  for (const auto& dir : classes) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    const std::string label = dir.filename().string();
    for (const auto& file : files) {
      std::ifstream in(file, std::ios::binary);
      if (!in) throw IoError("cannot open '" + file.string() + "'");
      std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
      if (text.rfind("\xEF\xBB\xBF", 0) == 0) text.erase(0, 3);
      std::string lf;
      lf.reserve(text.size());
      for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r') {
          lf.push_back('\n');
          if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        } else {
          lf.push_back(text[i]);
        }
      }
      if (!is_valid_utf8(lf)) {
        if (invalid_utf8 == InvalidUtf8::reject) throw ParseError(file.string(), 1, "invalid UTF-8");
        lf = replace_invalid_utf8(lf);
      }
      ds.records.push_back({std::move(lf), label});
    }
  }
  if (ds.records.empty()) throw EmptyDataset("no documents under '" + root.string() + "'");
  return ds;
}

// ---------------------------------------------------------------------------

void SplitSpec::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test fraction must be in (0, 1)");
  }
}

void seeded_shuffle(std::vector<std::size_t>& items, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& dataset,
                                                const SplitSpec& spec) {
  spec.validate();
  std::vector<bool> is_test(dataset.size(), false);

  auto take = [&](std::vector<std::size_t> idx, std::uint64_t seed) {
    seeded_shuffle(idx, seed);
    const auto n_test = static_cast<std::size_t>(
        std::llround(spec.test_fraction * static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < n_test && i < idx.size(); ++i) is_test[idx[i]] = true;
  };

  if (spec.stratified) {
    std::map<std::string, std::vector<std::size_t>, std::less<>> groups;
    for (std::size_t i = 0; i < dataset.size(); ++i) groups[dataset.records[i].label].push_back(i);
    std::uint64_t salt = 0;
    for (auto& [label, idx] : groups) take(std::move(idx), spec.seed + 0x9E3779B97F4A7C15ULL * ++salt);
  } else {
    std::vector<std::size_t> idx(dataset.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    take(std::move(idx), spec.seed);
  }

  LabeledDataset train, test;
  train.source = dataset.source + "#train";
  test.source = dataset.source + "#test";
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    (is_test[i] ? test : train).records.push_back(dataset.records[i]);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace zest
