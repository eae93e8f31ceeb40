#include "zest/baselines.hpp"

#include <unicode/utf8.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "json.hpp"
#include "zest/container.hpp"
#include "zest/errors.hpp"

namespace zest {

using nlohmann::json;

namespace {

json prep_to_json(const PrepConfig& p) {
  return {{"normalize", p.normalize}, {"pad_words", p.pad_words}, {"pad_length", p.pad_length}};
}

PrepConfig prep_from_json(const json& j) {
  PrepConfig p{j.at("normalize").get<bool>(), j.at("pad_words").get<bool>(),
               j.at("pad_length").get<std::size_t>()};
  p.validate();
  return p;
}

std::vector<std::string_view> split_tokens(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  while (i < text.size()) {
    while (i < text.size() && is_ws(text[i])) ++i;
    const std::size_t begin = i;
    while (i < text.size() && !is_ws(text[i])) ++i;
    if (i > begin) out.push_back(text.substr(begin, i - begin));
  }
  return out;
}

std::vector<std::string> checked_labels(const ExamplesPerClass& examples) {
  if (examples.empty()) throw std::invalid_argument("no classes to train");
  std::vector<std::string> labels;
  for (const auto& [label, texts] : examples) {
    if (std::find(labels.begin(), labels.end(), label) != labels.end()) {
      throw std::invalid_argument("duplicate label '" + label + "'");
    }
    labels.push_back(label);
  }
  return labels;
}

template <typename Fn>
auto wrap_format_errors(Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad model metadata: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("bad model configuration: ") + e.what());
  } catch (const UnsupportedCodec& e) {
    throw FormatError(std::string("bad codec: ") + e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<std::string> char_ngrams(std::string_view text, std::size_t n) {
  if (n == 0) throw std::invalid_argument("n-gram order must be >= 1");
  std::vector<std::size_t> offsets;
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    offsets.push_back(static_cast<std::size_t>(i));
    U8_FWD_1(s, i, length);
  }
  offsets.push_back(text.size());

  std::vector<std::string> out;
  std::unordered_set<std::string_view> seen;
  for (std::size_t k = 0; k + n < offsets.size(); ++k) {
    const std::string_view gram = text.substr(offsets[k], offsets[k + n] - offsets[k]);
    if (seen.insert(gram).second) out.emplace_back(gram);
  }
  return out;
}

void NGramProfile::add(std::string_view prepared) {
  for (auto& g : char_ngrams(prepared, n)) grams.insert(std::move(g));
}

double ngram_affinity(std::string_view prepared, const NGramProfile& profile) {
  const auto grams = char_ngrams(prepared, profile.n);
  if (grams.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& g : grams) hits += profile.grams.count(g);
  return static_cast<double>(hits) / static_cast<double>(grams.size());
}

NGramModel NGramModel::train(const ExamplesPerClass& examples, std::size_t n,
                             const PrepConfig& prep) {
  prep.validate();
  if (n == 0) throw std::invalid_argument("n-gram order must be >= 1");
  checked_labels(examples);
  NGramModel m;
  m.prep_ = prep;
  for (const auto& [label, texts] : examples) {
    NGramProfile p{label, n, {}};
    for (const auto& t : texts) p.add(prepare(t, prep));
    if (p.grams.empty()) throw EmptyClass(label);
    m.profiles_.push_back(std::move(p));
  }
  return m;
}

std::vector<std::string> NGramModel::labels() const {
  std::vector<std::string> out;
  for (const auto& p : profiles_) out.push_back(p.label);
  return out;
}

ScoreVector NGramModel::score(std::string_view text) const {
  const std::string prepared = prepare(text, prep_);
  std::vector<double> raw;
  raw.reserve(profiles_.size());
  for (const auto& p : profiles_) raw.push_back(ngram_affinity(prepared, p));
  return make_score_vector(labels(), std::move(raw));
}

const std::string& NGramModel::classify(std::string_view text) const {
  return profiles_[score(text).argmax_index].label;
}

std::string NGramModel::serialize() const {
  json meta;
  meta["prep"] = prep_to_json(prep_);
  meta["n"] = profiles_.empty() ? 3 : profiles_.front().n;
  meta["labels"] = labels();
  std::string body;
  for (const auto& p : profiles_) {
    std::vector<std::string_view> sorted(p.grams.begin(), p.grams.end());
    std::sort(sorted.begin(), sorted.end());
    put_u32(body, static_cast<std::uint32_t>(sorted.size()));
    for (auto g : sorted) {
      put_u32(body, static_cast<std::uint32_t>(g.size()));
      body += g;
    }
  }
  return encode_container({std::string(kMagic), kFormatVersion, meta.dump(), std::move(body)});
}

NGramModel NGramModel::deserialize(std::string_view bytes) {
  const Container c = decode_container(bytes, kMagic, kFormatVersion);
  return wrap_format_errors([&] {
    const json meta = json::parse(c.metadata);
    NGramModel m;
    m.prep_ = prep_from_json(meta.at("prep"));
    const auto n = meta.at("n").get<std::size_t>();
    ByteReader r(c.body);
    for (const auto& label : meta.at("labels")) {
      NGramProfile p{label.get<std::string>(), n, {}};
      const std::uint32_t count = r.u32();
      for (std::uint32_t i = 0; i < count; ++i) p.grams.emplace(r.bytes(r.u32()));
      m.profiles_.push_back(std::move(p));
    }
    if (!r.done()) throw FormatError("trailing bytes in model body");
    return m;
  });
}

void NGramModel::save(const std::filesystem::path& path) const {
  write_file_atomic(path, serialize());
}

NGramModel NGramModel::load(const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

// ---------------------------------------------------------------------------

NaiveBayes NaiveBayes::train(const ExamplesPerClass& examples, double alpha,
                             const PrepConfig& prep) {
  prep.validate();
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("smoothing alpha must be > 0");
  }
  NaiveBayes nb;
  nb.labels_ = checked_labels(examples);
  nb.alpha_ = alpha;
  nb.prep_ = prep;

  const std::size_t n_classes = examples.size();
  std::vector<std::unordered_map<std::uint32_t, std::uint64_t>> sparse(n_classes);
  nb.doc_counts_.assign(n_classes, 0);
  for (std::size_t c = 0; c < n_classes; ++c) {
    bool any = false;
    for (const auto& text : examples[c].second) {
      const std::string prepared = prepare(text, prep);
      ++nb.doc_counts_[c];
      for (auto tok : split_tokens(prepared)) {
        auto [it, inserted] =
            nb.vocab_.try_emplace(std::string(tok), static_cast<std::uint32_t>(nb.vocab_.size()));
        ++sparse[c][it->second];
        any = true;
      }
    }
    if (!any) throw EmptyClass(examples[c].first);
  }
  nb.token_counts_.assign(n_classes, std::vector<std::uint64_t>(nb.vocab_.size(), 0));
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (const auto& [t, n] : sparse[c]) nb.token_counts_[c][t] = n;
  }
  nb.finalize();
  return nb;
}

void NaiveBayes::finalize() {
  const std::size_t n_classes = labels_.size();
  const double vocab = static_cast<double>(vocab_.size());
  std::uint64_t total_docs = 0;
  for (auto d : doc_counts_) total_docs += d;

  log_prior_.assign(n_classes, 0.0);
  log_likelihood_.assign(n_classes, std::vector<double>(vocab_.size(), 0.0));
  for (std::size_t c = 0; c < n_classes; ++c) {
    log_prior_[c] = std::log(static_cast<double>(doc_counts_[c])) -
                    std::log(static_cast<double>(total_docs));
    std::uint64_t class_tokens = 0;
    for (auto n : token_counts_[c]) class_tokens += n;
    const double denom = std::log(static_cast<double>(class_tokens) + alpha_ * vocab);
    for (std::size_t t = 0; t < vocab_.size(); ++t) {
      log_likelihood_[c][t] = std::log(static_cast<double>(token_counts_[c][t]) + alpha_) - denom;
    }
  }
}

double NaiveBayes::log_likelihood(std::size_t c, std::string_view token) const {
  const auto it = vocab_.find(std::string(token));
  if (it == vocab_.end()) throw std::out_of_range("token not in vocabulary");
  return log_likelihood_.at(c)[it->second];
}

std::vector<double> NaiveBayes::joint_log_likelihood(std::string_view text) const {
  const std::string prepared = prepare(text, prep_);
  std::vector<double> out = log_prior_;
  std::string key;
  for (auto tok : split_tokens(prepared)) {
    key.assign(tok);
    const auto it = vocab_.find(key);
    if (it == vocab_.end()) continue;
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += log_likelihood_[c][it->second];
  }
  return out;
}

std::vector<double> NaiveBayes::log_posterior(std::string_view text) const {
  std::vector<double> jll = joint_log_likelihood(text);
  const double hi = *std::max_element(jll.begin(), jll.end());
  double sum = 0.0;
  for (double v : jll) sum += std::exp(v - hi);
  const double lse = hi + std::log(sum);
  for (double& v : jll) v -= lse;
  return jll;
}

std::vector<double> NaiveBayes::posterior(std::string_view text) const {
  std::vector<double> lp = log_posterior(text);
  for (double& v : lp) v = std::exp(v);
  return lp;
}

const std::string& NaiveBayes::classify(std::string_view text) const {
  const auto jll = joint_log_likelihood(text);
  return labels_[static_cast<std::size_t>(std::max_element(jll.begin(), jll.end()) - jll.begin())];
}

std::string NaiveBayes::serialize() const {
  std::vector<std::pair<std::string_view, std::uint32_t>> sorted(vocab_.begin(), vocab_.end());
  std::sort(sorted.begin(), sorted.end());

  json meta;
  meta["prep"] = prep_to_json(prep_);
  meta["alpha"] = alpha_;
  meta["labels"] = labels_;
  meta["doc_counts"] = doc_counts_;
  meta["vocabulary_size"] = sorted.size();

  std::string body;
  for (auto [tok, idx] : sorted) {
    put_u32(body, static_cast<std::uint32_t>(tok.size()));
    body += tok;
  }
  for (std::size_t c = 0; c < labels_.size(); ++c) {
    std::uint32_t nnz = 0;
    for (auto [tok, idx] : sorted) nnz += token_counts_[c][idx] > 0 ? 1 : 0;
    put_u32(body, nnz);
    for (std::uint32_t pos = 0; pos < sorted.size(); ++pos) {
      const std::uint64_t n = token_counts_[c][sorted[pos].second];
      if (n == 0) continue;
      if (n > UINT32_MAX) throw Error("token count exceeds container range");
      put_u32(body, pos);
      put_u32(body, static_cast<std::uint32_t>(n));
    }
  }
  return encode_container({std::string(kMagic), kFormatVersion, meta.dump(), std::move(body)});
}

NaiveBayes NaiveBayes::deserialize(std::string_view bytes) {
  const Container c = decode_container(bytes, kMagic, kFormatVersion);
  return wrap_format_errors([&] {
    const json meta = json::parse(c.metadata);
    NaiveBayes nb;
    nb.prep_ = prep_from_json(meta.at("prep"));
    nb.alpha_ = meta.at("alpha").get<double>();
    if (!(nb.alpha_ > 0.0)) throw FormatError("smoothing alpha must be > 0");
    nb.labels_ = meta.at("labels").get<std::vector<std::string>>();
    nb.doc_counts_ = meta.at("doc_counts").get<std::vector<std::uint64_t>>();
    if (nb.doc_counts_.size() != nb.labels_.size() || nb.labels_.empty()) {
      throw FormatError("label/doc-count mismatch");
    }
    const auto vocab = meta.at("vocabulary_size").get<std::size_t>();
    ByteReader r(c.body);
    for (std::uint32_t i = 0; i < vocab; ++i) {
      if (!nb.vocab_.try_emplace(std::string(r.bytes(r.u32())), i).second) {
        throw FormatError("duplicate vocabulary entry");
      }
    }
    nb.token_counts_.assign(nb.labels_.size(), std::vector<std::uint64_t>(vocab, 0));
    for (auto& counts : nb.token_counts_) {
      const std::uint32_t nnz = r.u32();
      for (std::uint32_t i = 0; i < nnz; ++i) {
        const std::uint32_t pos = r.u32();
        if (pos >= vocab) throw FormatError("token index out of range");
        counts[pos] = r.u32();
      }
    }
    if (!r.done()) throw FormatError("trailing bytes in model body");
    nb.finalize();
    return nb;
  });
}

void NaiveBayes::save(const std::filesystem::path& path) const {
  write_file_atomic(path, serialize());
}

NaiveBayes NaiveBayes::load(const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

// ---------------------------------------------------------------------------

ConcatScorer ConcatScorer::build(const ExamplesPerClass& examples, const CodecParams& params,
                                 const PrepConfig& prep) {
  prep.validate();
  params.validate();
  if (!codec_supported(params.codec)) {
    throw UnsupportedCodec("codec '" + std::string(codec_name(params.codec)) +
                           "' is not available");
  }
  ConcatScorer s;
  s.labels_ = checked_labels(examples);
  s.params_ = params;
  s.prep_ = prep;
  for (const auto& [label, texts] : examples) {
    std::string corpus;
    for (const auto& t : texts) {
      std::string p = prepare(t, prep);
      if (p.empty()) continue;
      if (!corpus.empty()) corpus.push_back('\n');
      corpus += p;
    }
    if (corpus.empty()) throw EmptyClass(label);
    s.base_sizes_.push_back(compressed_size(corpus, nullptr, params));
    s.corpora_.push_back(std::move(corpus));
  }
  return s;
}

std::size_t ConcatScorer::corpus_bytes() const {
  std::size_t n = 0;
  for (const auto& c : corpora_) n += c.size();
  return n;
}

long long ConcatScorer::concat_score(std::string_view text, std::size_t class_index) const {
  const std::string prepared = prepare(text, prep_);
  if (prepared.empty()) return 0;
  const std::string& corpus = corpora_.at(class_index);
  std::string joined;
  joined.reserve(corpus.size() + 1 + prepared.size());
  joined += corpus;
  joined.push_back('\n');
  joined += prepared;
  return static_cast<long long>(compressed_size(joined, nullptr, params_)) -
         static_cast<long long>(base_sizes_[class_index]);
}

std::vector<long long> ConcatScorer::scores(std::string_view text) const {
  std::vector<long long> out;
  out.reserve(labels_.size());
  for (std::size_t c = 0; c < labels_.size(); ++c) out.push_back(concat_score(text, c));
  return out;
}

const std::string& ConcatScorer::classify(std::string_view text) const {
  const auto s = scores(text);
  return labels_[static_cast<std::size_t>(std::min_element(s.begin(), s.end()) - s.begin())];
}

std::string ConcatScorer::serialize() const {
  json meta;
  meta["prep"] = prep_to_json(prep_);
  meta["codec"] = {{"codec", std::string(codec_name(params_.codec))},
                   {"level", params_.level},
                   {"minimize_headers", params_.minimize_headers}};
  meta["labels"] = labels_;
  meta["corpus_order"] = "training";
  std::string body;
  for (const auto& c : corpora_) {
    put_u32(body, static_cast<std::uint32_t>(c.size()));
    body += c;
  }
  return encode_container({std::string(kMagic), kFormatVersion, meta.dump(), std::move(body)});
}

ConcatScorer ConcatScorer::deserialize(std::string_view bytes) {
  const Container c = decode_container(bytes, kMagic, kFormatVersion);
  return wrap_format_errors([&] {
    const json meta = json::parse(c.metadata);
    ConcatScorer s;
    s.prep_ = prep_from_json(meta.at("prep"));
    const auto& cp = meta.at("codec");
    s.params_ = {parse_codec(cp.at("codec").get<std::string>()), cp.at("level").get<int>(),
                 cp.at("minimize_headers").get<bool>()};
    s.params_.validate();
    s.labels_ = meta.at("labels").get<std::vector<std::string>>();
    if (s.labels_.empty()) throw FormatError("model has no classes");
    ByteReader r(c.body);
    for (std::size_t i = 0; i < s.labels_.size(); ++i) {
      s.corpora_.emplace_back(r.bytes(r.u32()));
      s.base_sizes_.push_back(compressed_size(s.corpora_.back(), nullptr, s.params_));
    }
    if (!r.done()) throw FormatError("trailing bytes in model body");
    return s;
  });
}

void ConcatScorer::save(const std::filesystem::path& path) const {
  write_file_atomic(path, serialize());
}

ConcatScorer ConcatScorer::load(const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

}  // namespace zest
