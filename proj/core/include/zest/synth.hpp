#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "zest/datasets.hpp"

namespace zest {

enum class SynthKind {
  // Two classes: Greek-letter vs Cyrillic-letter word salad.
  disjoint_script,
  // Every class shares the same 100 head tokens with the same frequencies;
  // classes differ only in a long tail of class-specific rare tokens.
  shared_head,
  // Latin-letter classes with pairwise disjoint vocabularies.
  disjoint_vocab,
};

std::string_view synth_kind_name(SynthKind kind);
// Throws std::invalid_argument for unknown names.
SynthKind parse_synth_kind(std::string_view name);

struct SynthSpec {
  SynthKind kind = SynthKind::shared_head;
  std::size_t classes = 6;           // ignored for disjoint_script (always 2)
  std::size_t min_words = 20;
  std::size_t max_words = 40;
  std::size_t head_size = 100;       // shared_head
  double head_share = 0.75;          // shared_head: fraction of tokens from the head
  std::size_t tail_size = 0;         // shared_head: rare tokens per class; 0 = each recurs ~twice
  std::size_t vocab_size = 400;      // disjoint_script / disjoint_vocab: words per class
};

// Deterministic in (spec, size, seed). Documents are interleaved across
// classes (class i gets every classes-th document) so class sizes differ by
// at most one. Throws std::invalid_argument when the spec is unusable,
// including shared_head corpora too small for every head token to outrank
// every tail token within each class.
LabeledDataset synth_corpus(const SynthSpec& spec, std::size_t size, std::uint64_t seed);

}  // namespace zest
