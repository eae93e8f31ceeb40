#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zest/model.hpp"

namespace zest {

struct Record {
  std::string text;
  std::string label;  // empty for unlabeled input
};

struct LabeledDataset {
  std::vector<Record> records;
  std::string source;

  std::size_t size() const noexcept { return records.size(); }
  // Distinct labels in order of first appearance.
  std::vector<std::string> labels() const;
  // Texts grouped by label, classes in order of first appearance.
  ExamplesPerClass examples_per_class() const;
  std::vector<std::string> texts() const;
};

enum class RecordFormat { lines, csv, jsonl };

// What to do with byte sequences that are not valid UTF-8.
enum class InvalidUtf8 { reject, replace };

struct ReaderOptions {
  RecordFormat format = RecordFormat::lines;
  std::string text_field = "text";
  std::string label_field;  // empty: records are unlabeled
  InvalidUtf8 invalid_utf8 = InvalidUtf8::reject;
};

// Pulls records one at a time from a stream. Strips a leading byte-order
// mark and maps CRLF/CR to LF. Throws ParseError naming the line.
class RecordReader {
 public:
  RecordReader(std::istream& in, std::string source, ReaderOptions options);
  ~RecordReader();
  RecordReader(const RecordReader&) = delete;
  RecordReader& operator=(const RecordReader&) = delete;

  std::optional<Record> next();
  // 1-based line on which the most recent record started.
  std::size_t line() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Opens `path` (or standard input for "-") and reads records lazily.
class FileRecordReader {
 public:
  FileRecordReader(const std::filesystem::path& path, ReaderOptions options);
  ~FileRecordReader();
  std::optional<Record> next() { return reader_->next(); }

 private:
  std::unique_ptr<std::istream> owned_;
  std::unique_ptr<RecordReader> reader_;
};

// RFC 4180 CSV with a header row.
LabeledDataset load_csv(const std::filesystem::path& path, const std::string& text_column,
                        const std::string& label_column,
                        InvalidUtf8 invalid_utf8 = InvalidUtf8::reject);
LabeledDataset load_jsonl(const std::filesystem::path& path, const std::string& text_field,
                          const std::string& label_field,
                          InvalidUtf8 invalid_utf8 = InvalidUtf8::reject);
// One subdirectory per label, one file per document; both sorted by name.
LabeledDataset load_dir_per_class(const std::filesystem::path& root,
                                  InvalidUtf8 invalid_utf8 = InvalidUtf8::reject);

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  bool stratified = true;

  void validate() const;
};

// Deterministic partition. Both halves keep the input record order.
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& dataset,
                                                const SplitSpec& spec);

// Fisher-Yates with a fixed draw rule so shuffles are identical on every
// standard library.
void seeded_shuffle(std::vector<std::size_t>& items, std::uint64_t seed);

}  // namespace zest
