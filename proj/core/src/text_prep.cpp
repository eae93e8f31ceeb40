#include "zest/text_prep.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <stdexcept>
#include <vector>

namespace zest {
namespace {

constexpr UChar32 kReplacement = 0xFFFD;

// Decodes UTF-8 into code points, substituting U+FFFD for ill-formed input.
std::vector<UChar32> decode(std::string_view text) {
  std::vector<UChar32> out;
  out.reserve(text.size());
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    out.push_back(c < 0 ? kReplacement : c);
  }
  return out;
}

void append(std::string& out, UChar32 c) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, c, error);
  if (error) {
    n = 0;
    U8_APPEND_UNSAFE(buf, n, kReplacement);
  }
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

bool is_space(UChar32 c) { return u_isUWhiteSpace(c) != 0; }

bool is_punctuation(UChar32 c) { return (U_GET_GC_MASK(c) & U_GC_P_MASK) != 0; }

}  // namespace

void PrepConfig::validate() const {
  if (pad_length == 0) throw std::invalid_argument("pad_length must be >= 1");
}

bool is_valid_utf8(std::string_view text) {
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) return false;
  }
  return true;
}

std::string replace_invalid_utf8(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (UChar32 c : decode(text)) append(out, c);
  return out;
}

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (UChar32 c : decode(text)) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (is_punctuation(c)) continue;
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    append(out, u_tolower(c));
  }
  return out;
}

std::string pad_words(std::string_view text, std::size_t pad_length) {
  if (pad_length == 0) throw std::invalid_argument("pad_length must be >= 1");
  const std::vector<UChar32> cps = decode(text);
  std::string out;
  out.reserve(text.size() * 2);
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && is_space(cps[i])) ++i;
    if (i == cps.size()) break;
    const std::size_t begin = i;
    while (i < cps.size() && !is_space(cps[i])) ++i;
    const std::size_t len = i - begin;

    if (!out.empty()) out.push_back(' ');
    const std::size_t target = len < pad_length ? pad_length : len;
    for (std::size_t j = 0; j < target; ++j) append(out, cps[begin + j % len]);
  }
  return out;
}

std::string prepare(std::string_view text, const PrepConfig& config) {
  if (!config.normalize && !config.pad_words) return std::string(text);
  std::string out = config.normalize ? normalize_text(text) : std::string(text);
  if (config.pad_words) out = pad_words(out, config.pad_length);
  return out;
}

}  // namespace zest
