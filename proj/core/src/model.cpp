#include "zest/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "zest/container.hpp"
#include "zest/errors.hpp"
#include "zest/parallel.hpp"

namespace zest {

using nlohmann::json;

void TelescopeSchedule::validate() const {
  if (count == 0) throw std::invalid_argument("telescope count must be >= 1");
  if (base_size < 256) throw std::invalid_argument("telescope base size must be >= 256");
  if (!(growth > 1.0) || !std::isfinite(growth)) {
    throw std::invalid_argument("telescope growth must be > 1");
  }
  const auto s = sizes();
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] <= s[i - 1]) throw std::invalid_argument("telescope sizes must strictly increase");
  }
  if (s.back() > (std::size_t{1} << 31)) {
    throw std::invalid_argument("largest dictionary must not exceed 2 GiB");
  }
}

std::vector<std::size_t> TelescopeSchedule::sizes() const {
  std::vector<std::size_t> out;
  out.reserve(count);
  double size = static_cast<double>(base_size);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(static_cast<std::size_t>(std::llround(size)));
    size *= growth;
  }
  return out;
}

std::vector<std::size_t> ClassModel::baselines() const {
  std::vector<std::size_t> out;
  out.reserve(dictionaries.size());
  for (const auto& d : dictionaries) out.push_back(d.empty_compressed_size());
  return out;
}

namespace {

std::size_t index_of(const std::vector<std::string>& labels, std::string_view label) {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw UnknownLabel(std::string(label));
  return static_cast<std::size_t>(it - labels.begin());
}

}  // namespace

double ScoreVector::raw_for(std::string_view label) const { return raw[index_of(labels, label)]; }

double ScoreVector::adjusted_for(std::string_view label) const {
  return adjusted[index_of(labels, label)];
}

ScoreVector make_score_vector(std::vector<std::string> labels, std::vector<double> raw) {
  if (labels.size() != raw.size() || raw.empty()) {
    throw std::invalid_argument("score vector needs one value per label");
  }
  ScoreVector sv;
  sv.labels = std::move(labels);
  sv.raw = std::move(raw);
  const double lo = *std::min_element(sv.raw.begin(), sv.raw.end());
  sv.adjusted.reserve(sv.raw.size());
  for (double r : sv.raw) sv.adjusted.push_back(r - lo);
  // max_element returns the first maximal element.
  sv.argmax_index = static_cast<std::size_t>(
      std::max_element(sv.adjusted.begin(), sv.adjusted.end()) - sv.adjusted.begin());
  return sv;
}

double affinity_prepared(std::string_view prepared, const ClassModel& cls,
                         const CodecParams& params) {
  if (prepared.empty() || cls.dictionaries.empty()) return 0.0;
  const double len = static_cast<double>(prepared.size());
  double ratio_sum = 0.0;
  for (const auto& dict : cls.dictionaries) {
    const double net = static_cast<double>(net_compressed_size(prepared, dict, params));
    ratio_sum += std::min(1.0, net / len);
  }
  return 1.0 - ratio_sum / static_cast<double>(cls.dictionaries.size());
}

double affinity(std::string_view text, const ClassModel& cls, const PrepConfig& prep,
                const CodecParams& params) {
  return affinity_prepared(prepare(text, prep), cls, params);
}

std::vector<double> normalize_scores(std::span<const double> scores) {
  std::vector<double> out(scores.begin(), scores.end());
  if (out.empty()) return out;
  const double sum = std::accumulate(out.begin(), out.end(), 0.0);
  if (!(sum > 0.0)) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
    return out;
  }
  for (double& v : out) v /= sum;
  return out;
}

std::vector<double> average_scores(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw LabelMismatch("score lists differ in length");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] + b[i]) / 2.0;
  return out;
}

ZestModel ZestModel::train(const ExamplesPerClass& examples, const PrepConfig& prep,
                           const TelescopeSchedule& schedule, const CodecParams& params,
                           const TrainOptions& options) {
  prep.validate();
  schedule.validate();
  params.validate();
  if (!codec_has_dictionary_mode(params.codec)) {
    throw UnsupportedCodec("zest models need a codec with dictionary mode");
  }
  if (examples.empty()) throw std::invalid_argument("no classes to train");
  std::set<std::string_view> seen;
  for (const auto& [label, texts] : examples) {
    if (!seen.insert(label).second) throw std::invalid_argument("duplicate label '" + label + "'");
  }

  const std::size_t n_classes = examples.size();
  std::vector<std::vector<std::string>> prepared(n_classes);
  parallel_for(n_classes, options.threads, [&](std::size_t c) {
    auto& out = prepared[c];
    for (const auto& text : examples[c].second) {
      std::string p = prepare(text, prep);
      if (!p.empty()) out.push_back(std::move(p));
    }
  });
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (prepared[c].empty()) throw EmptyClass(examples[c].first);
  }

  const auto sizes = schedule.sizes();
  const std::size_t k = sizes.size();
  std::vector<std::optional<Dictionary>> dicts(n_classes * k);
  parallel_for(dicts.size(), options.threads, [&](std::size_t task) {
    const std::size_t c = task / k;
    try {
      dicts[task].emplace(train_dictionary(prepared[c], sizes[task % k], params, options.trainer));
    } catch (const TrainingFailed& e) {
      throw TrainingFailed("class '" + examples[c].first + "': " + e.what());
    }
  });

  ZestModel model;
  model.prep_ = prep;
  model.schedule_ = schedule;
  model.params_ = params;
  model.trainer_ = options.trainer;
  model.classes_.reserve(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    ClassModel cls;
    cls.label = examples[c].first;
    cls.example_count = examples[c].second.size();
    for (const auto& p : prepared[c]) cls.example_bytes += p.size();
    for (std::size_t i = 0; i < k; ++i) cls.dictionaries.push_back(std::move(*dicts[c * k + i]));
    model.classes_.push_back(std::move(cls));
  }
  return model;
}

std::vector<std::string> ZestModel::labels() const {
  std::vector<std::string> out;
  out.reserve(classes_.size());
  for (const auto& c : classes_) out.push_back(c.label);
  return out;
}

std::size_t ZestModel::class_index(std::string_view label) const {
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i].label == label) return i;
  }
  throw UnknownLabel(std::string(label));
}

double ZestModel::affinity(std::string_view text, std::size_t class_index) const {
  return zest::affinity(text, classes_.at(class_index), prep_, params_);
}

ScoreVector ZestModel::score(std::string_view text) const {
  const std::string prepared = prepare(text, prep_);
  std::vector<double> raw;
  raw.reserve(classes_.size());
  for (const auto& cls : classes_) raw.push_back(affinity_prepared(prepared, cls, params_));
  return make_score_vector(labels(), std::move(raw));
}

const std::string& ZestModel::classify(std::string_view text) const {
  return classes_[score(text).argmax_index].label;
}

std::vector<RankedText> ZestModel::rank(std::span<const std::string> texts,
                                        std::string_view target_label,
                                        std::size_t threads) const {
  const std::size_t target = class_index(target_label);
  std::vector<RankedText> out(texts.size());
  parallel_for(texts.size(), threads, [&](std::size_t i) {
    out[i] = RankedText{i, score(texts[i]).adjusted[target]};
  });
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedText& a, const RankedText& b) { return a.affinity > b.affinity; });
  return out;
}

std::vector<std::pair<std::string, double>> ZestModel::ensemble_score(
    std::string_view text, std::span<const std::pair<std::string, double>> external) const {
  if (external.size() != classes_.size()) {
    throw LabelMismatch("external scores must cover exactly the model's labels");
  }
  std::vector<double> ext(classes_.size(), 0.0);
  std::vector<bool> covered(classes_.size(), false);
  for (const auto& [label, p] : external) {
    std::size_t i = 0;
    try {
      i = class_index(label);
    } catch (const UnknownLabel&) {
      throw LabelMismatch("external label '" + label + "' is not in the model");
    }
    if (covered[i]) throw LabelMismatch("duplicate external label '" + label + "'");
    covered[i] = true;
    ext[i] = p;
  }
  const ScoreVector sv = score(text);
  const auto mean = average_scores(normalize_scores(sv.adjusted), ext);
  std::vector<std::pair<std::string, double>> out;
  out.reserve(mean.size());
  for (std::size_t i = 0; i < mean.size(); ++i) out.emplace_back(classes_[i].label, mean[i]);
  return out;
}

std::size_t ZestModel::dictionary_bytes() const {
  std::size_t total = 0;
  for (const auto& c : classes_) {
    for (const auto& d : c.dictionaries) total += d.payload().size();
  }
  return total;
}

std::string ZestModel::serialize() const {
  json meta;
  meta["prep"] = {{"normalize", prep_.normalize},
                  {"pad_words", prep_.pad_words},
                  {"pad_length", prep_.pad_length}};
  meta["schedule"] = {{"count", schedule_.count},
                      {"base_size", schedule_.base_size},
                      {"growth", schedule_.growth}};
  meta["codec"] = {{"codec", std::string(codec_name(params_.codec))},
                   {"level", params_.level},
                   {"minimize_headers", params_.minimize_headers}};
  meta["trainer"] = {{"algorithm", "fastcover"},
                     {"k", trainer_.k},
                     {"d", trainer_.d},
                     {"steps", trainer_.steps},
                     {"split_point", trainer_.split_point},
                     {"f", trainer_.f},
                     {"accel", trainer_.accel}};
  json classes = json::array();
  std::string body;
  for (const auto& c : classes_) {
    json dicts = json::array();
    for (const auto& d : c.dictionaries) {
      dicts.push_back({{"target_size", d.target_size()},
                       {"trained_on_bytes", d.trained_on_bytes()},
                       {"fallback", d.fallback()}});
      put_u32(body, static_cast<std::uint32_t>(d.payload().size()));
      body += d.payload();
      put_u32(body, static_cast<std::uint32_t>(d.empty_compressed_size()));
    }
    classes.push_back({{"label", c.label},
                       {"example_count", c.example_count},
                       {"example_bytes", c.example_bytes},
                       {"dictionaries", std::move(dicts)}});
  }
  meta["classes"] = std::move(classes);
  return encode_container({std::string(kMagic), kFormatVersion, meta.dump(), std::move(body)});
}

ZestModel ZestModel::deserialize(std::string_view bytes) {
  const Container c = decode_container(bytes, kMagic, kFormatVersion);
  ZestModel m;
  try {
    const json meta = json::parse(c.metadata);
    const auto& p = meta.at("prep");
    m.prep_ = {p.at("normalize").get<bool>(), p.at("pad_words").get<bool>(),
               p.at("pad_length").get<std::size_t>()};
    const auto& s = meta.at("schedule");
    m.schedule_ = {s.at("count").get<std::size_t>(), s.at("base_size").get<std::size_t>(),
                   s.at("growth").get<double>()};
    const auto& cp = meta.at("codec");
    m.params_ = {parse_codec(cp.at("codec").get<std::string>()), cp.at("level").get<int>(),
                 cp.at("minimize_headers").get<bool>()};
    const auto& t = meta.at("trainer");
    m.trainer_ = {t.at("k").get<unsigned>(), t.at("d").get<unsigned>(), t.at("steps").get<unsigned>(),
                  t.at("split_point").get<double>(), t.at("f").get<unsigned>(),
                  t.at("accel").get<unsigned>()};
    m.prep_.validate();
    m.schedule_.validate();
    m.params_.validate();

    ByteReader reader(c.body);
    for (const auto& jc : meta.at("classes")) {
      ClassModel cls;
      cls.label = jc.at("label").get<std::string>();
      cls.example_count = jc.at("example_count").get<std::size_t>();
      cls.example_bytes = jc.at("example_bytes").get<std::size_t>();
      const auto& jd = jc.at("dictionaries");
      if (jd.size() != m.schedule_.count) throw FormatError("dictionary count mismatch");
      for (const auto& d : jd) {
        const std::uint32_t len = reader.u32();
        std::string payload(reader.bytes(len));
        const std::uint32_t empty = reader.u32();
        Dictionary dict(d.at("target_size").get<std::size_t>(), std::move(payload),
                        d.at("trained_on_bytes").get<std::size_t>(), d.at("fallback").get<bool>(),
                        m.params_);
        if (dict.empty_compressed_size() != empty) {
          throw FormatError("stored empty-string baseline does not match dictionary");
        }
        cls.dictionaries.push_back(std::move(dict));
      }
      m.classes_.push_back(std::move(cls));
    }
    if (!reader.done()) throw FormatError("trailing bytes in model body");
    if (m.classes_.empty()) throw FormatError("model has no classes");
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad model metadata: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("bad model configuration: ") + e.what());
  } catch (const TrainingFailed& e) {
    throw FormatError(std::string("bad dictionary payload: ") + e.what());
  } catch (const UnsupportedCodec& e) {
    throw FormatError(std::string("bad codec: ") + e.what());
  }
  return m;
}

void ZestModel::save(const std::filesystem::path& path) const {
  write_file_atomic(path, serialize());
}

ZestModel ZestModel::load(const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

}  // namespace zest
