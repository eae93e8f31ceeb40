#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zest/compression.hpp"
#include "zest/text_prep.hpp"

namespace zest {

// Geometric dictionary sizes base_size * growth^i for i in [0, count).
struct TelescopeSchedule {
  std::size_t count = 4;
  std::size_t base_size = 16 * 1024;
  double growth = 4.0;

  // Throws std::invalid_argument unless count >= 1, base_size >= 256 and
  // growth > 1 (sizes must be strictly increasing).
  void validate() const;
  std::vector<std::size_t> sizes() const;

  friend bool operator==(const TelescopeSchedule&, const TelescopeSchedule&) = default;
};

// Per-class training examples in class insertion order.
using ExamplesPerClass = std::vector<std::pair<std::string, std::vector<std::string>>>;

struct ClassModel {
  std::string label;
  std::vector<Dictionary> dictionaries;  // ascending target size
  std::size_t example_count = 0;
  std::size_t example_bytes = 0;  // prepared bytes

  // Empty-string baselines, parallel to `dictionaries`.
  std::vector<std::size_t> baselines() const;
};

// Per-class affinities in model class order.
struct ScoreVector {
  std::vector<std::string> labels;
  std::vector<double> raw;
  std::vector<double> adjusted;  // raw - min(raw)
  std::size_t argmax_index = 0;

  const std::string& argmax() const { return labels.at(argmax_index); }
  double raw_for(std::string_view label) const;
  double adjusted_for(std::string_view label) const;
};

// Min-subtraction and argmax (first maximal class wins).
ScoreVector make_score_vector(std::vector<std::string> labels, std::vector<double> raw);

// 1 - mean_i min(1, net_size_i / |t|) for t = prepare(text); 0 for empty t.
double affinity(std::string_view text, const ClassModel& cls, const PrepConfig& prep,
                const CodecParams& params);
// Same, for text that has already been through prepare().
double affinity_prepared(std::string_view prepared, const ClassModel& cls,
                         const CodecParams& params);

struct RankedText {
  std::size_t index;
  double affinity;  // adjusted affinity toward the target label
};

struct TrainOptions {
  std::size_t threads = 1;  // dictionaries trained in parallel; output is identical
  TrainerParams trainer;
};

class ZestModel {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;
  static constexpr std::string_view kMagic = "ZEST";

  // Trains `schedule.count` dictionaries per class on the full prepared
  // example set. Throws EmptyClass, TrainingFailed (with the label),
  // std::invalid_argument on bad configuration or duplicate labels.
  static ZestModel train(const ExamplesPerClass& examples, const PrepConfig& prep = {},
                         const TelescopeSchedule& schedule = {}, const CodecParams& params = {},
                         const TrainOptions& options = {});

  const std::vector<ClassModel>& classes() const noexcept { return classes_; }
  const PrepConfig& prep() const noexcept { return prep_; }
  const TelescopeSchedule& schedule() const noexcept { return schedule_; }
  const CodecParams& params() const noexcept { return params_; }
  const TrainerParams& trainer() const noexcept { return trainer_; }
  std::vector<std::string> labels() const;
  // Throws UnknownLabel.
  std::size_t class_index(std::string_view label) const;

  double affinity(std::string_view text, std::size_t class_index) const;
  ScoreVector score(std::string_view text) const;
  const std::string& classify(std::string_view text) const;

  // Descending adjusted affinity toward `target_label`; stable.
  std::vector<RankedText> rank(std::span<const std::string> texts, std::string_view target_label,
                               std::size_t threads = 1) const;

  // Mean of the sum-normalised adjusted Zest scores and `external`
  // probabilities, in model class order. `external` must cover exactly the
  // model's labels (any order); throws LabelMismatch otherwise.
  std::vector<std::pair<std::string, double>> ensemble_score(
      std::string_view text, std::span<const std::pair<std::string, double>> external) const;

  // Total dictionary payload bytes.
  std::size_t dictionary_bytes() const;

  std::string serialize() const;
  static ZestModel deserialize(std::string_view bytes);
  void save(const std::filesystem::path& path) const;
  static ZestModel load(const std::filesystem::path& path);

 private:
  std::vector<ClassModel> classes_;
  PrepConfig prep_;
  TelescopeSchedule schedule_;
  CodecParams params_;
  TrainerParams trainer_;
};

// Sum-normalise non-negative scores; uniform when they sum to zero.
std::vector<double> normalize_scores(std::span<const double> scores);

// Per-label mean of two aligned score lists.
std::vector<double> average_scores(std::span<const double> a, std::span<const double> b);

}  // namespace zest
