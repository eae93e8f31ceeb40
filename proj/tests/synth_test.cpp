#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>
#include <string>

#include "zest/synth.hpp"
#include "zest/text_prep.hpp"

namespace {

using Counts = std::map<std::string, std::size_t>;

std::map<std::string, Counts> token_counts(const zest::LabeledDataset& ds) {
  std::map<std::string, Counts> out;
  for (const auto& r : ds.records) {
    std::istringstream in(zest::normalize_text(r.text));
    for (std::string t; in >> t;) ++out[r.label][t];
  }
  return out;
}

TEST(Synth, KindNames) {
  for (auto k : {zest::SynthKind::disjoint_script, zest::SynthKind::shared_head,
                 zest::SynthKind::disjoint_vocab})
    EXPECT_EQ(zest::parse_synth_kind(zest::synth_kind_name(k)), k);
  EXPECT_THROW(zest::parse_synth_kind("news"), std::invalid_argument);
}

TEST(Synth, DeterministicAndInterleaved) {
  zest::SynthSpec spec;
  spec.classes = 3;
  const auto a = zest::synth_corpus(spec, 301, 4);
  const auto b = zest::synth_corpus(spec, 301, 4);
  const auto c = zest::synth_corpus(spec, 301, 5);
  ASSERT_EQ(a.size(), 301u);
  EXPECT_EQ(a.texts(), b.texts());
  EXPECT_NE(a.texts(), c.texts());
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(a.records[i].label, "c" + std::to_string(i % 3));
}

TEST(Synth, DocumentLengthsWithinBounds) {
  zest::SynthSpec spec;
  spec.kind = zest::SynthKind::disjoint_vocab;
  spec.min_words = 5;
  spec.max_words = 9;
  for (const auto& r : zest::synth_corpus(spec, 120, 2).records) {
    std::istringstream in(zest::normalize_text(r.text));
    std::size_t n = 0;
    for (std::string t; in >> t;) ++n;
    EXPECT_GE(n, 5u);
    EXPECT_LE(n, 9u);
    EXPECT_EQ(r.text.back(), '.');
  }
}

TEST(Synth, DisjointScriptUsesSeparateAlphabets) {
  zest::SynthSpec spec;
  spec.kind = zest::SynthKind::disjoint_script;
  const auto ds = zest::synth_corpus(spec, 200, 1);
  EXPECT_EQ(ds.labels(), (std::vector<std::string>{"greek", "cyrillic"}));
  for (const auto& r : ds.records) {
    const std::string t = zest::normalize_text(r.text);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto b = static_cast<unsigned char>(t[i]);
      if (b < 0x80) {
        EXPECT_EQ(b, ' ');
      } else if ((b & 0xC0) == 0xC0) {
        // Greek lead bytes are 0xCE/0xCF, Cyrillic 0xD0/0xD1.
        if (r.label == "greek")
          EXPECT_TRUE(b == 0xCE || b == 0xCF);
        else
          EXPECT_TRUE(b == 0xD0 || b == 0xD1);
      }
    }
  }
}

TEST(Synth, DisjointVocabularies) {
  zest::SynthSpec spec;
  spec.kind = zest::SynthKind::disjoint_vocab;
  spec.classes = 4;
  const auto counts = token_counts(zest::synth_corpus(spec, 400, 3));
  ASSERT_EQ(counts.size(), 4u);
  std::set<std::string> seen;
  for (const auto& [label, c] : counts)
    for (const auto& [tok, n] : c) EXPECT_TRUE(seen.insert(tok).second) << tok;
}

TEST(Synth, SharedHeadConstraints) {
  zest::SynthSpec spec;
  spec.classes = 4;
  const auto ds = zest::synth_corpus(spec, 2000, 6);
  const auto counts = token_counts(ds);
  ASSERT_EQ(counts.size(), 4u);

  // Head = tokens present in every class; everything else is class-private.
  std::map<std::string, std::size_t> presence;
  for (const auto& [label, c] : counts)
    for (const auto& [tok, n] : c) ++presence[tok];
  std::set<std::string> head;
  for (const auto& [tok, p] : presence) {
    EXPECT_TRUE(p == 1 || p == 4) << tok;
    if (p == 4) head.insert(tok);
  }
  EXPECT_EQ(head.size(), spec.head_size);

  for (const auto& [label, c] : counts) {
    std::size_t total = 0, head_total = 0, min_head = SIZE_MAX, max_tail = 0;
    for (const auto& [tok, n] : c) {
      total += n;
      if (head.count(tok)) {
        head_total += n;
        min_head = std::min(min_head, n);
      } else {
        max_tail = std::max(max_tail, n);
      }
    }
    EXPECT_NEAR(static_cast<double>(head_total) / static_cast<double>(total), spec.head_share,
                1e-3);
    EXPECT_GT(min_head, max_tail) << label;
  }

  // Same head proportions in every class (quotas are exact up to rounding).
  const auto& first = counts.begin()->second;
  std::size_t first_total = 0;
  for (const auto& [t, n] : first) first_total += n;
  for (const auto& [label, c] : counts) {
    std::size_t total = 0;
    for (const auto& [t, n] : c) total += n;
    for (const auto& tok : head) {
      const double a = static_cast<double>(first.at(tok)) / static_cast<double>(first_total);
      const double b = static_cast<double>(c.at(tok)) / static_cast<double>(total);
      EXPECT_NEAR(a, b, 2.0 / static_cast<double>(std::min(total, first_total)));
    }
  }
}

TEST(Synth, RejectsUnusableSpecs) {
  zest::SynthSpec spec;
  spec.tail_size = 5;  // tail tokens would recur more often than rare head tokens
  EXPECT_THROW(zest::synth_corpus(spec, 600, 1), std::invalid_argument);
  spec = {};
  spec.min_words = 0;
  EXPECT_THROW(zest::synth_corpus(spec, 10, 1), std::invalid_argument);
  spec = {};
  spec.classes = 1;
  EXPECT_THROW(zest::synth_corpus(spec, 10, 1), std::invalid_argument);
}

}  // namespace
