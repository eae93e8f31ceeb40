#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "zest/baselines.hpp"
#include "zest/errors.hpp"

namespace {

// Reference: all length-n windows over the code-point sequence.
std::set<std::u32string> brute_ngrams(const std::u32string& s, std::size_t n) {
  std::set<std::u32string> out;
  for (std::size_t i = 0; i + n <= s.size(); ++i) out.insert(s.substr(i, n));
  return out;
}

std::string to_utf8(const std::u32string& s) {
  std::string out;
  for (char32_t c : s) zest::testing::append_utf8(out, c);
  return out;
}

TEST(NGram, HandExample) {
  zest::NGramProfile p;
  p.n = 3;
  p.add("abcd");
  EXPECT_DOUBLE_EQ(zest::ngram_affinity("abcx", p), 0.5);
  EXPECT_DOUBLE_EQ(zest::ngram_affinity("ab", p), 0.0);
  EXPECT_EQ(zest::char_ngrams("αβγδ", 3), (std::vector<std::string>{"αβγ", "βγδ"}));
  EXPECT_EQ(zest::char_ngrams("aaaa", 2), (std::vector<std::string>{"aa"}));
}

TEST(NGram, MatchesBruteForceEnumeration) {
  static constexpr char32_t alphabet[] = {U'a', U'b', U'c', U' ', U'ж', U'λ'};
  std::mt19937_64 rng(99);
  auto gen = [&] {
    std::u32string s(rng() % 12, U'a');
    for (auto& c : s) c = alphabet[rng() % std::size(alphabet)];
    return s;
  };
  for (int i = 0; i < 1000; ++i) {
    const std::u32string profile_text = gen();
    const std::u32string text = gen();
    const std::size_t n = 1 + rng() % 4;
    zest::NGramProfile p;
    p.n = n;
    p.add(to_utf8(profile_text));
    const auto have = brute_ngrams(profile_text, n);
    const auto want = brute_ngrams(text, n);
    double expected = 0.0;
    if (!want.empty()) {
      std::size_t hit = 0;
      for (const auto& g : want) hit += have.count(g);
      expected = static_cast<double>(hit) / static_cast<double>(want.size());
    }
    EXPECT_DOUBLE_EQ(zest::ngram_affinity(to_utf8(text), p), expected);
  }
}

TEST(NGram, ModelClassifiesAndRoundTrips) {
  zest::ExamplesPerClass ex{{"en", {"the cat sat on the mat", "a dog ran in the park"}},
                            {"gr", {"η γάτα κάθεται", "ο σκύλος τρέχει"}}};
  const auto m = zest::NGramModel::train(ex, 3);
  EXPECT_EQ(m.classify("the cat ran"), "en");
  EXPECT_EQ(m.classify("η γάτα τρέχει"), "gr");
  const auto back = zest::NGramModel::deserialize(m.serialize());
  EXPECT_EQ(back.labels(), m.labels());
  EXPECT_EQ(back.score("the cat").raw, m.score("the cat").raw);
}

// Two classes, ten-token vocabulary, alpha = 1:
//   A: "a b c", "a a d", "b e"  -> a3 b2 c1 d1 e1, 8 tokens
//   B: "f g h", "f i j", "c f"  -> f3 g1 h1 i1 j1 c1, 8 tokens
// P(t|A) = (n_A(t) + 1) / 18, same for B. Equal priors.
//   "a a f": A ∝ 4*4*1 = 16, B ∝ 1*1*4 = 4  -> P(A) = 0.8
//   "c":     A ∝ 2,          B ∝ 2          -> P(A) = 0.5
//   "b b b": A ∝ 27,         B ∝ 1          -> P(A) = 27/28
zest::NaiveBayes toy_nb() {
  zest::ExamplesPerClass ex{{"A", {"a b c", "a a d", "b e"}}, {"B", {"f g h", "f i j", "c f"}}};
  return zest::NaiveBayes::train(ex, 1.0);
}

TEST(NaiveBayes, HandComputedPosteriors) {
  const auto nb = toy_nb();
  EXPECT_EQ(nb.vocabulary_size(), 10u);
  EXPECT_NEAR(nb.log_prior(0), std::log(0.5), 1e-12);
  EXPECT_NEAR(nb.log_likelihood(0, "a"), std::log(4.0 / 18), 1e-12);
  EXPECT_NEAR(nb.log_likelihood(1, "a"), std::log(1.0 / 18), 1e-12);
  EXPECT_NEAR(nb.posterior("a a f")[0], 0.8, 1e-9);
  EXPECT_NEAR(nb.posterior("c")[0], 0.5, 1e-9);
  EXPECT_NEAR(nb.posterior("b b b")[0], 27.0 / 28, 1e-9);
  EXPECT_NEAR(nb.posterior("A, a; F!")[0], 0.8, 1e-9);  // prepared to "a a f"
  EXPECT_EQ(nb.classify("f g"), "B");
}

TEST(NaiveBayes, UnknownTokensIgnored) {
  const auto nb = toy_nb();
  EXPECT_NEAR(nb.posterior("a a f zzz yyy")[0], 0.8, 1e-9);
  EXPECT_NEAR(nb.posterior("zzz")[0], 0.5, 1e-9);
  EXPECT_EQ(nb.classify("zzz"), "A");
  EXPECT_THROW(nb.log_likelihood(0, "zzz"), std::out_of_range);
}

TEST(NaiveBayes, PriorsFollowDocumentCounts) {
  zest::ExamplesPerClass ex{{"A", {"x", "x", "x"}}, {"B", {"y"}}};
  const auto nb = zest::NaiveBayes::train(ex, 1.0);
  EXPECT_NEAR(nb.log_prior(0), std::log(0.75), 1e-12);
  EXPECT_NEAR(nb.log_prior(1), std::log(0.25), 1e-12);
}

TEST(NaiveBayes, ValidationAndRoundTrip) {
  zest::ExamplesPerClass ex{{"A", {"x"}}, {"B", {"!!"}}};
  EXPECT_THROW(zest::NaiveBayes::train(ex, 1.0), zest::EmptyClass);
  EXPECT_THROW(zest::NaiveBayes::train({{"A", {"x"}}}, 0.0), std::invalid_argument);
  const auto nb = toy_nb();
  const auto back = zest::NaiveBayes::deserialize(nb.serialize());
  EXPECT_EQ(back.labels(), nb.labels());
  EXPECT_EQ(back.vocabulary_size(), nb.vocabulary_size());
  EXPECT_EQ(back.log_posterior("a b f g"), nb.log_posterior("a b f g"));
  EXPECT_EQ(back.serialize(), nb.serialize());
}

TEST(Concat, EmptyTextAndBounds) {
  zest::ExamplesPerClass ex{{"en", {"the cat sat on the mat", "the dog sat on the log"}},
                            {"gr", {"η γάτα κάθεται στο χαλί", "ο σκύλος τρέχει στο πάρκο"}}};
  for (auto codec : {zest::CodecId::zstd_plain, zest::CodecId::deflate, zest::CodecId::lzma}) {
    const auto s = zest::ConcatScorer::build(ex, zest::CodecParams{codec, 6, true});
    EXPECT_EQ(s.concat_score("", 0), 0);
    EXPECT_EQ(s.concat_score("?!", 1), 0);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 30; ++i) {
      const std::string t = zest::testing::random_text(rng, 50);
      for (std::size_t c = 0; c < 2; ++c) EXPECT_GE(s.concat_score(t, c), -16);
    }
    EXPECT_EQ(s.classify("the cat sat on the log"), "en") << zest::codec_name(codec);
  }
}

TEST(Concat, RoundTrip) {
  zest::ExamplesPerClass ex{{"a", {"one two three"}}, {"b", {"uno dos tres"}}};
  const auto s = zest::ConcatScorer::build(ex, zest::CodecParams{zest::CodecId::zstd_plain, 3, true});
  const auto back = zest::ConcatScorer::deserialize(s.serialize());
  EXPECT_EQ(back.labels(), s.labels());
  EXPECT_EQ(back.scores("two tres"), s.scores("two tres"));
  EXPECT_THROW(zest::ConcatScorer::deserialize(s.serialize().substr(3)), zest::FormatError);
}

}  // namespace
