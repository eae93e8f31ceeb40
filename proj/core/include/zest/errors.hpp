#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace zest {

// Base for every error raised by the library. The CLI maps these to exit
// code 2 (data/model errors); std::invalid_argument signals misuse.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingFailed : public Error {
 public:
  using Error::Error;
};

class UnsupportedCodec : public Error {
 public:
  using Error::Error;
};

class EmptyClass : public Error {
 public:
  explicit EmptyClass(std::string label)
      : Error("class '" + label + "' has no non-empty examples"), label_(std::move(label)) {}
  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

class UnknownLabel : public Error {
 public:
  explicit UnknownLabel(const std::string& label) : Error("unknown label '" + label + "'") {}
};

class LabelMismatch : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyDataset : public Error {
 public:
  using Error::Error;
};

}  // namespace zest
