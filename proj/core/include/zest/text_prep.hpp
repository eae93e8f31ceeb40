#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace zest {

// Text preparation applied identically to dictionary-training examples and
// to scored texts. Lowercasing is bound to `normalize`.
struct PrepConfig {
  bool normalize = true;
  bool pad_words = true;
  std::size_t pad_length = 10;

  // Throws std::invalid_argument when pad_length == 0.
  void validate() const;

  static PrepConfig none() { return {false, false, 10}; }

  friend bool operator==(const PrepConfig&, const PrepConfig&) = default;
};

// True when `text` is well-formed UTF-8 (no overlongs, surrogates or
// code points above U+10FFFF).
bool is_valid_utf8(std::string_view text);
// Copy of `text` with every ill-formed sequence replaced by U+FFFD.
std::string replace_invalid_utf8(std::string_view text);

// Removes Unicode punctuation (general category P*), lowercases with the
// simple case mapping, collapses whitespace runs to one ASCII space and trims
// both ends. Symbols (S*) and digits are kept. Idempotent.
//
// Input must be valid UTF-8; ill-formed sequences are replaced by U+FFFD.
std::string normalize_text(std::string_view text);

// Extends every whitespace-delimited token shorter than `pad_length` code
// points by cyclic self-repetition to exactly `pad_length` code points.
// Longer tokens are left alone. Tokens are re-joined with single spaces.
std::string pad_words(std::string_view text, std::size_t pad_length);

// normalize_text then pad_words, each gated by its flag.
std::string prepare(std::string_view text, const PrepConfig& config);

}  // namespace zest
