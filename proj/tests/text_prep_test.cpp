#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "zest/text_prep.hpp"

namespace {

using zest::normalize_text;
using zest::pad_words;
using zest::prepare;
using zest::PrepConfig;

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

std::size_t code_points(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

std::set<std::string> code_point_set(const std::string& s) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t len = 1;
    while (i + len < s.size() && (static_cast<unsigned char>(s[i + len]) & 0xC0) == 0x80) ++len;
    out.insert(s.substr(i, len));
    i += len;
  }
  return out;
}

TEST(NormalizeText, StripsPunctuationAndLowercases) {
  EXPECT_EQ(normalize_text("Hello, World!"), "hello world");
  EXPECT_EQ(normalize_text("ΑΒΓ δεζ"), "αβγ δεζ");
  EXPECT_EQ(normalize_text("  many\t\n  spaces  "), "many spaces");
  EXPECT_EQ(normalize_text("«Привет», мир!"), "привет мир");
}

TEST(NormalizeText, KeepsSymbolsAndDigits) {
  EXPECT_EQ(normalize_text("Price: $5 + 3€"), "price $5 + 3€");
}

TEST(NormalizeText, EmptyAndPunctuationOnly) {
  EXPECT_EQ(normalize_text(""), "");
  EXPECT_EQ(normalize_text("?!., --"), "");
}

TEST(NormalizeText, ReplacesInvalidUtf8) {
  const std::string bad = std::string("ab") + '\xFF' + "c";
  EXPECT_FALSE(zest::is_valid_utf8(bad));
  const std::string out = normalize_text(bad);
  EXPECT_TRUE(zest::is_valid_utf8(out));
  EXPECT_EQ(out, "ab\xEF\xBF\xBD" "c");
}

TEST(Utf8, Validation) {
  EXPECT_TRUE(zest::is_valid_utf8("plain ascii"));
  EXPECT_TRUE(zest::is_valid_utf8("αβγ 😀"));
  EXPECT_FALSE(zest::is_valid_utf8("\xC0\xAF"));          // overlong
  EXPECT_FALSE(zest::is_valid_utf8("\xED\xA0\x80"));      // surrogate
  EXPECT_FALSE(zest::is_valid_utf8("\xF4\x90\x80\x80"));  // above U+10FFFF
  EXPECT_FALSE(zest::is_valid_utf8("\xE2\x82"));          // truncated
}

TEST(PadWords, CyclicRepetition) {
  EXPECT_EQ(pad_words("hello", 10), "hellohello");
  EXPECT_EQ(pad_words("ab cd", 5), "ababa cdcdc");
  EXPECT_EQ(pad_words("abc", 7), "abcabca");
  EXPECT_EQ(pad_words("αβ", 5), "αβαβα");
}

TEST(PadWords, LongTokensUntouched) {
  EXPECT_EQ(pad_words("internationalization a", 4), "internationalization aaaa");
}

TEST(PadWords, ZeroLengthRejected) {
  EXPECT_THROW(pad_words("x", 0), std::invalid_argument);
  PrepConfig cfg;
  cfg.pad_length = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Prepare, NormalizeThenPad) {
  EXPECT_EQ(prepare("Hi, there!", PrepConfig{}), "hihihihihi therethere");
  EXPECT_EQ(prepare("Hi, there!", PrepConfig{true, false, 10}), "hi there");
  EXPECT_EQ(prepare("Hi, there!", PrepConfig::none()), "Hi, there!");
  EXPECT_EQ(prepare("", PrepConfig{}), "");
}

TEST(Prepare, PaddingWithoutNormalizationKeepsPunctuation) {
  EXPECT_EQ(prepare("Hi, there!", PrepConfig{false, true, 4}), "Hi,H there!");
}

class PrepProperty : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(PrepProperty, NormalizeIsIdempotent) {
  std::mt19937_64 rng(GetParam());
  for (int i = 0; i < 200; ++i) {
    const std::string s = zest::testing::random_text(rng, 60);
    const std::string once = normalize_text(s);
    EXPECT_EQ(normalize_text(once), once) << s;
  }
}

TEST_P(PrepProperty, PaddingPreservesTokensAndCharacters) {
  std::mt19937_64 rng(GetParam());
  for (int i = 0; i < 200; ++i) {
    const std::string s = normalize_text(zest::testing::random_text(rng, 60));
    const std::size_t L = 1 + rng() % 12;
    const std::string padded = pad_words(s, L);
    const auto before = tokens(s);
    const auto after = tokens(padded);
    ASSERT_EQ(before.size(), after.size()) << s;
    for (std::size_t t = 0; t < before.size(); ++t) {
      EXPECT_GE(code_points(after[t]), L);
      EXPECT_EQ(code_points(after[t]), std::max(L, code_points(before[t])));
      EXPECT_EQ(code_point_set(after[t]), code_point_set(before[t]));
      EXPECT_EQ(after[t].rfind(before[t].substr(0, std::min(before[t].size(), after[t].size())), 0),
                0u);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, PrepProperty, ::testing::Values(1u, 2u, 3u));

}  // namespace
