#include "zest/synth.hpp"

#include <unicode/utf8.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace zest {
namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 gen_;
};

void append_cp(std::string& out, char32_t c) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  U8_APPEND_UNSAFE(buf, n, static_cast<UChar32>(c));
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

// Latin consonant-vowel syllables, optionally closed by a consonant.
std::string latin_word(Rng& rng, std::size_t syllables) {
  static constexpr std::string_view kCons = "bcdfghjklmnprstvwz";
  static constexpr std::string_view kVow = "aeiou";
  std::string w;
  for (std::size_t s = 0; s < syllables; ++s) {
    w.push_back(kCons[rng.below(kCons.size())]);
    w.push_back(kVow[rng.below(kVow.size())]);
  }
  if (rng.below(2) == 0) w.push_back(kCons[rng.below(kCons.size())]);
  return w;
}

std::string script_word(Rng& rng, char32_t first, std::size_t letters, char32_t skip) {
  std::string w;
  const std::size_t len = rng.between(2, 9);
  for (std::size_t i = 0; i < len; ++i) {
    char32_t c;
    do {
      c = first + static_cast<char32_t>(rng.below(letters));
    } while (c == skip);
    append_cp(w, c);
  }
  return w;
}

// Draws `count` distinct words from `make`, excluding everything in `taken`.
template <typename Make>
std::vector<std::string> distinct_words(std::size_t count, std::unordered_set<std::string>& taken,
                                        Make&& make) {
  std::vector<std::string> out;
  out.reserve(count);
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > count * 1000 + 1000) throw std::invalid_argument("vocabulary space exhausted");
    std::string w = make();
    if (taken.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

std::vector<double> zipf_cdf(std::size_t n) {
  std::vector<double> cdf(n);
  double acc = 0.0;
  for (std::size_t r = 0; r < n; ++r) cdf[r] = (acc += 1.0 / static_cast<double>(r + 1));
  for (double& c : cdf) c /= acc;
  return cdf;
}

std::size_t zipf_draw(Rng& rng, const std::vector<double>& cdf) {
  const double u = rng.unit();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

// Sentence casing on the first letter plus sparse commas and a final period.
std::string punctuate(const std::vector<std::string_view>& words, Rng& rng, bool upper_shift) {
  std::string doc;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) doc.push_back(' ');
    std::string w(words[i]);
    if (i == 0 && upper_shift && !w.empty()) {
      const auto* s = reinterpret_cast<const uint8_t*>(w.data());
      int32_t pos = 0;
      UChar32 c;
      U8_NEXT_UNSAFE(s, pos, c);
      std::string head;
      append_cp(head, static_cast<char32_t>(c - 0x20));
      w = head + w.substr(static_cast<std::size_t>(pos));
    }
    doc += w;
    if (i + 1 < words.size() && rng.below(8) == 0) doc.push_back(',');
  }
  doc.push_back('.');
  return doc;
}

std::vector<std::size_t> class_sizes(std::size_t size, std::size_t classes) {
  std::vector<std::size_t> out(classes, size / classes);
  for (std::size_t c = 0; c < size % classes; ++c) ++out[c];
  return out;
}

LabeledDataset interleave(std::vector<std::vector<std::string>> docs,
                          const std::vector<std::string>& labels, std::string source) {
  LabeledDataset ds;
  ds.source = std::move(source);
  std::vector<std::size_t> next(docs.size(), 0);
  for (bool more = true; more;) {
    more = false;
    for (std::size_t c = 0; c < docs.size(); ++c) {
      if (next[c] < docs[c].size()) {
        ds.records.push_back({std::move(docs[c][next[c]++]), labels[c]});
        more = true;
      }
    }
  }
  return ds;
}

LabeledDataset vocab_salad(const SynthSpec& spec, std::size_t classes, std::size_t size, Rng& rng,
                           const std::vector<std::vector<std::string>>& vocab,
                           const std::vector<std::string>& labels, std::string source) {
  const auto cdf = zipf_cdf(spec.vocab_size);
  const auto sizes = class_sizes(size, classes);
  std::vector<std::vector<std::string>> docs(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t d = 0; d < sizes[c]; ++d) {
      std::vector<std::string_view> words(rng.between(spec.min_words, spec.max_words));
      for (auto& w : words) w = vocab[c][zipf_draw(rng, cdf)];
      docs[c].push_back(punctuate(words, rng, true));
    }
  }
  return interleave(std::move(docs), labels, std::move(source));
}

LabeledDataset disjoint_script(const SynthSpec& spec, std::size_t size, Rng& rng) {
  std::unordered_set<std::string> taken;
  std::vector<std::vector<std::string>> vocab;
  // Greek α..ω without final sigma, Cyrillic а..я.
  vocab.push_back(distinct_words(spec.vocab_size, taken,
                                 [&] { return script_word(rng, U'α', 25, U'ς'); }));
  vocab.push_back(distinct_words(spec.vocab_size, taken,
                                 [&] { return script_word(rng, U'а', 32, 0); }));
  return vocab_salad(spec, 2, size, rng, vocab, {"greek", "cyrillic"}, "synth:disjoint-script");
}

LabeledDataset disjoint_vocab(const SynthSpec& spec, std::size_t size, Rng& rng) {
  std::unordered_set<std::string> taken;
  std::vector<std::vector<std::string>> vocab;
  std::vector<std::string> labels;
  for (std::size_t c = 0; c < spec.classes; ++c) {
    vocab.push_back(
        distinct_words(spec.vocab_size, taken, [&] { return latin_word(rng, rng.between(1, 4)); }));
    labels.push_back("c" + std::to_string(c));
  }
  return vocab_salad(spec, spec.classes, size, rng, vocab, labels, "synth:disjoint-vocab");
}

LabeledDataset shared_head(const SynthSpec& spec, std::size_t size, Rng& rng) {
  if (!(spec.head_share > 0.0 && spec.head_share < 1.0)) {
    throw std::invalid_argument("head_share must be in (0, 1)");
  }
  const auto sizes = class_sizes(size, spec.classes);
  std::size_t tail_size = spec.tail_size;
  if (tail_size == 0) {
    const double mean_words = static_cast<double>(spec.min_words + spec.max_words) / 2.0;
    const double tail_tokens =
        static_cast<double>(sizes.back()) * mean_words * (1.0 - spec.head_share);
    tail_size = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(tail_tokens / 2.0)));
  }

  std::unordered_set<std::string> taken;
  // Frequent words are short, rare ones longer, as in natural text.
  const auto head =
      distinct_words(spec.head_size, taken, [&] { return latin_word(rng, rng.between(1, 2)); });
  std::vector<std::vector<std::string>> tails;
  std::vector<std::string> labels;
  for (std::size_t c = 0; c < spec.classes; ++c) {
    tails.push_back(
        distinct_words(tail_size, taken, [&] { return latin_word(rng, rng.between(2, 4)); }));
    labels.push_back("c" + std::to_string(c));
  }

  std::vector<double> weights(spec.head_size);
  double weight_sum = 0.0;
  for (std::size_t r = 0; r < spec.head_size; ++r) {
    weight_sum += weights[r] = 1.0 / static_cast<double>(r + 1);
  }

  std::vector<std::vector<std::string>> docs(spec.classes);
  for (std::size_t c = 0; c < spec.classes; ++c) {
    std::vector<std::size_t> lengths(sizes[c]);
    std::size_t total = 0;
    for (auto& l : lengths) total += l = rng.between(spec.min_words, spec.max_words);

    // Head quotas by largest remainder so every class sees the same
    // head distribution.
    const auto head_total =
        static_cast<std::size_t>(std::llround(spec.head_share * static_cast<double>(total)));
    std::vector<std::size_t> quota(spec.head_size);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t r = 0; r < spec.head_size; ++r) {
      const double exact = static_cast<double>(head_total) * weights[r] / weight_sum;
      quota[r] = static_cast<std::size_t>(exact);
      assigned += quota[r];
      remainders.emplace_back(-(exact - static_cast<double>(quota[r])), r);
    }
    std::sort(remainders.begin(), remainders.end());
    for (std::size_t i = 0; assigned < head_total; ++i, ++assigned) ++quota[remainders[i].second];

    std::vector<std::string_view> tokens;
    tokens.reserve(total);
    for (std::size_t r = 0; r < spec.head_size; ++r) tokens.insert(tokens.end(), quota[r], head[r]);

    // Tail tokens cycle through reshuffled passes over the class vocabulary,
    // which caps every tail count at ceil(tail_total / tail_size).
    const std::size_t tail_total = total - head_total;
    std::vector<std::size_t> order(tail_size);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = 0; i < tail_total; ++i) {
      if (i % tail_size == 0) rng.shuffle(order);
      tokens.push_back(tails[c][order[i % tail_size]]);
    }

    const std::size_t min_head = *std::min_element(quota.begin(), quota.end());
    const std::size_t max_tail = (tail_total + tail_size - 1) / tail_size;
    if (min_head <= max_tail) {
      throw std::invalid_argument(
          "shared-head corpus too small: head tokens would not outrank the tail");
    }

    rng.shuffle(tokens);
    std::size_t pos = 0;
    for (std::size_t len : lengths) {
      std::vector<std::string_view> words(tokens.begin() + static_cast<std::ptrdiff_t>(pos),
                                          tokens.begin() + static_cast<std::ptrdiff_t>(pos + len));
      pos += len;
      docs[c].push_back(punctuate(words, rng, true));
    }
  }
  return interleave(std::move(docs), labels, "synth:shared-head");
}

}  // namespace

std::string_view synth_kind_name(SynthKind kind) {
  switch (kind) {
    case SynthKind::disjoint_script:
      return "disjoint-script";
    case SynthKind::shared_head:
      return "shared-head";
    case SynthKind::disjoint_vocab:
      return "disjoint-vocab";
  }
  return "?";
}

SynthKind parse_synth_kind(std::string_view name) {
  for (auto k : {SynthKind::disjoint_script, SynthKind::shared_head, SynthKind::disjoint_vocab}) {
    if (synth_kind_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown synthetic corpus '" + std::string(name) + "'");
}

LabeledDataset synth_corpus(const SynthSpec& spec, std::size_t size, std::uint64_t seed) {
  if (spec.min_words == 0 || spec.max_words < spec.min_words) {
    throw std::invalid_argument("need 1 <= min_words <= max_words");
  }
  if (spec.kind != SynthKind::disjoint_script && spec.classes < 2) {
    throw std::invalid_argument("synthetic corpora need at least 2 classes");
  }
  if (spec.vocab_size == 0 || spec.head_size == 0) {
    throw std::invalid_argument("vocabulary sizes must be positive");
  }
  Rng rng(seed);
  switch (spec.kind) {
    case SynthKind::disjoint_script:
      return disjoint_script(spec, size, rng);
    case SynthKind::shared_head:
      return shared_head(spec, size, rng);
    case SynthKind::disjoint_vocab:
      return disjoint_vocab(spec, size, rng);
  }
  throw std::invalid_argument("unknown synthetic corpus kind");
}

}  // namespace zest
