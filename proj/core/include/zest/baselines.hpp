#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "zest/compression.hpp"
#include "zest/model.hpp"
#include "zest/text_prep.hpp"

namespace zest {

// ---------------------------------------------------------------------------
// Character n-gram affinity ("percentage of matched n-grams").

// Distinct code-point n-grams of `text` in first-occurrence order. Empty when
// the text is shorter than n code points.
std::vector<std::string> char_ngrams(std::string_view text, std::size_t n);

struct NGramProfile {
  std::string label;
  std::size_t n = 3;
  std::unordered_set<std::string> grams;

  void add(std::string_view prepared);
};

// Fraction of the distinct n-grams of `prepared` found in the profile; 0 when
// the text yields no n-grams.
double ngram_affinity(std::string_view prepared, const NGramProfile& profile);

class NGramModel {
 public:
  static constexpr std::string_view kMagic = "ZNGR";
  static constexpr std::uint32_t kFormatVersion = 1;

  static NGramModel train(const ExamplesPerClass& examples, std::size_t n = 3,
                          const PrepConfig& prep = {});

  const std::vector<NGramProfile>& profiles() const noexcept { return profiles_; }
  const PrepConfig& prep() const noexcept { return prep_; }
  std::vector<std::string> labels() const;

  ScoreVector score(std::string_view text) const;
  const std::string& classify(std::string_view text) const;

  std::string serialize() const;
  static NGramModel deserialize(std::string_view bytes);
  void save(const std::filesystem::path& path) const;
  static NGramModel load(const std::filesystem::path& path);

 private:
  std::vector<NGramProfile> profiles_;
  PrepConfig prep_;
};

// ---------------------------------------------------------------------------
// Multinomial Naive Bayes over whitespace tokens of prepared text.

class NaiveBayes {
 public:
  static constexpr std::string_view kMagic = "ZNBW";
  static constexpr std::uint32_t kFormatVersion = 1;

  // alpha > 0 is the additive smoothing constant. Throws EmptyClass when a
  // class has no tokens after preparation.
  static NaiveBayes train(const ExamplesPerClass& examples, double alpha = 1.0,
                          const PrepConfig& prep = {true, false, 10});

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  double alpha() const noexcept { return alpha_; }
  std::size_t vocabulary_size() const noexcept { return vocab_.size(); }
  const PrepConfig& prep() const noexcept { return prep_; }

  double log_prior(std::size_t c) const { return log_prior_.at(c); }
  // log P(token | class); tokens outside the vocabulary have no likelihood
  // and throw std::out_of_range.
  double log_likelihood(std::size_t c, std::string_view token) const;

  // log P(c) + sum over known tokens of count * log P(t | c), unnormalised.
  std::vector<double> joint_log_likelihood(std::string_view text) const;
  // Normalised log posteriors (log-sum-exp over classes).
  std::vector<double> log_posterior(std::string_view text) const;
  std::vector<double> posterior(std::string_view text) const;
  const std::string& classify(std::string_view text) const;

  std::string serialize() const;
  static NaiveBayes deserialize(std::string_view bytes);
  void save(const std::filesystem::path& path) const;
  static NaiveBayes load(const std::filesystem::path& path);

 private:
  void finalize();

  std::vector<std::string> labels_;
  double alpha_ = 1.0;
  PrepConfig prep_;
  std::unordered_map<std::string, std::uint32_t> vocab_;
  std::vector<std::uint64_t> doc_counts_;                   // per class
  std::vector<std::vector<std::uint64_t>> token_counts_;    // [class][token]
  std::vector<double> log_prior_;
  std::vector<std::vector<double>> log_likelihood_;         // [class][token]
};

// ---------------------------------------------------------------------------
// Concatenation scoring: marginal compressed size of appending a text to the
// class corpus. Lower is better.

class ConcatScorer {
 public:
  static constexpr std::string_view kMagic = "ZCAT";
  static constexpr std::uint32_t kFormatVersion = 1;

  // Corpora are the prepared examples joined by '\n' in training order.
  static ConcatScorer build(const ExamplesPerClass& examples, const CodecParams& params,
                            const PrepConfig& prep = {true, false, 10});

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const CodecParams& params() const noexcept { return params_; }
  const PrepConfig& prep() const noexcept { return prep_; }
  std::size_t corpus_bytes() const;

  // |C(corpus + '\n' + t)| - |C(corpus)| for t = prepare(text); 0 for empty t.
  long long concat_score(std::string_view text, std::size_t class_index) const;
  std::vector<long long> scores(std::string_view text) const;
  // argmin over classes, first class wins ties.
  const std::string& classify(std::string_view text) const;

  std::string serialize() const;
  static ConcatScorer deserialize(std::string_view bytes);
  void save(const std::filesystem::path& path) const;
  static ConcatScorer load(const std::filesystem::path& path);

 private:
  std::vector<std::string> labels_;
  std::vector<std::string> corpora_;
  std::vector<std::size_t> base_sizes_;
  CodecParams params_;
  PrepConfig prep_;
};

}  // namespace zest
