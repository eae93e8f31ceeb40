#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "test_util.hpp"
#include "zest/container.hpp"
#include "zest/errors.hpp"
#include "zest/model.hpp"
#include "zest/synth.hpp"

namespace {

using zest::ZestModel;

const zest::TelescopeSchedule kSmall{2, 2048, 4.0};

zest::ExamplesPerClass script_examples(std::size_t size = 300, std::uint64_t seed = 1) {
  zest::SynthSpec spec;
  spec.kind = zest::SynthKind::disjoint_script;
  return zest::synth_corpus(spec, size, seed).examples_per_class();
}

const ZestModel& shared_model() {
  static const ZestModel model = ZestModel::train(script_examples(), {}, kSmall);
  return model;
}

TEST(Schedule, DefaultSizes) {
  const zest::TelescopeSchedule s;
  EXPECT_EQ(s.sizes(), (std::vector<std::size_t>{16384, 65536, 262144, 1048576}));
  EXPECT_EQ((zest::TelescopeSchedule{3, 1000, 2.5}.sizes()),
            (std::vector<std::size_t>{1000, 2500, 6250}));
}

TEST(Schedule, Validation) {
  EXPECT_THROW((zest::TelescopeSchedule{0, 16384, 4.0}.validate()), std::invalid_argument);
  EXPECT_THROW((zest::TelescopeSchedule{2, 100, 4.0}.validate()), std::invalid_argument);
  EXPECT_THROW((zest::TelescopeSchedule{2, 16384, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((zest::TelescopeSchedule{3, 256, 1.001}.validate()), std::invalid_argument);
}

TEST(ScoreVector, MinSubtraction) {
  const auto sv = zest::make_score_vector({"A", "B"}, {0.6, 0.4});
  EXPECT_NEAR(sv.adjusted_for("A"), 0.2, 1e-12);
  EXPECT_DOUBLE_EQ(sv.adjusted_for("B"), 0.0);
  EXPECT_EQ(sv.argmax(), "A");
  EXPECT_DOUBLE_EQ(sv.raw_for("B"), 0.4);
  EXPECT_THROW(sv.raw_for("C"), zest::UnknownLabel);
}

TEST(ScoreVector, TiesPickFirstClass) {
  EXPECT_EQ(zest::make_score_vector({"x", "y", "z"}, {0.3, 0.5, 0.5}).argmax(), "y");
  EXPECT_EQ(zest::make_score_vector({"x", "y"}, {0.0, 0.0}).argmax(), "x");
}

TEST(Ensemble, NormalizeAndAverage) {
  const std::vector<double> zest_scores{1.0, 0.0};
  const std::vector<double> external{0.5, 0.5};
  const auto avg = zest::average_scores(zest::normalize_scores(zest_scores), external);
  ASSERT_EQ(avg.size(), 2u);
  EXPECT_DOUBLE_EQ(avg[0], 0.75);
  EXPECT_DOUBLE_EQ(avg[1], 0.25);
  const std::vector<double> zeros{0.0, 0.0, 0.0};
  for (double v : zest::normalize_scores(zeros)) EXPECT_DOUBLE_EQ(v, 1.0 / 3);
}

TEST(Ensemble, ModelLabelChecks) {
  const auto& m = shared_model();
  const std::vector<std::pair<std::string, double>> ok{{"cyrillic", 0.5}, {"greek", 0.5}};
  const auto out = m.ensemble_score("αβγ δεζ", ok);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_NEAR(out[0].second + out[1].second, 1.0, 1e-12);
  const std::vector<std::pair<std::string, double>> missing{{"greek", 1.0}};
  EXPECT_THROW(m.ensemble_score("x", missing), zest::LabelMismatch);
  const std::vector<std::pair<std::string, double>> extra{
      {"greek", 0.4}, {"cyrillic", 0.4}, {"latin", 0.2}};
  EXPECT_THROW(m.ensemble_score("x", extra), zest::LabelMismatch);
}

TEST(Train, EmptyClassRejected) {
  zest::ExamplesPerClass ex{{"a", {"alpha beta gamma"}}, {"b", {"", "  ", "?!"}}};
  try {
    ZestModel::train(ex, {}, kSmall);
    FAIL() << "expected EmptyClass";
  } catch (const zest::EmptyClass& e) {
    EXPECT_EQ(e.label(), "b");
  }
}

TEST(Train, DuplicateLabelsRejected) {
  zest::ExamplesPerClass ex{{"a", {"one"}}, {"a", {"two"}}};
  EXPECT_THROW(ZestModel::train(ex, {}, kSmall), std::invalid_argument);
}

TEST(Train, ModelShape) {
  const auto& m = shared_model();
  EXPECT_EQ(m.labels(), (std::vector<std::string>{"greek", "cyrillic"}));
  for (const auto& c : m.classes()) {
    ASSERT_EQ(c.dictionaries.size(), 2u);
    EXPECT_LT(c.dictionaries[0].target_size(), c.dictionaries[1].target_size());
    EXPECT_EQ(c.example_count, 150u);
    for (const auto& d : c.dictionaries) EXPECT_LE(d.payload().size(), d.target_size());
  }
  EXPECT_THROW(m.class_index("latin"), zest::UnknownLabel);
}

TEST(Train, DeterministicAcrossThreadCounts) {
  const auto ex = script_examples(200, 3);
  const auto a = ZestModel::train(ex, {}, kSmall, {}, zest::TrainOptions{1, {}});
  const auto b = ZestModel::train(ex, {}, kSmall, {}, zest::TrainOptions{4, {}});
  EXPECT_EQ(a.serialize(), b.serialize());
}

TEST(Affinity, RangeAndEmptyText) {
  const auto& m = shared_model();
  EXPECT_DOUBLE_EQ(m.affinity("", 0), 0.0);
  EXPECT_DOUBLE_EQ(m.affinity("?!", 0), 0.0);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    const std::string t = zest::testing::random_text(rng, 80);
    for (std::size_t c = 0; c < 2; ++c) {
      const double a = m.affinity(t, c);
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, 1.0);
    }
    const auto sv = m.score(t);
    double mn = 1.0;
    for (double v : sv.adjusted) mn = std::min(mn, v);
    EXPECT_DOUBLE_EQ(mn, 0.0);
  }
}

TEST(Affinity, SeparatesScripts) {
  const auto& m = shared_model();
  EXPECT_EQ(m.classify("Καλημέρα σας φίλοι μου, τι κάνετε σήμερα"), "greek");
  EXPECT_EQ(m.classify("Доброе утро друзья, как у вас дела сегодня"), "cyrillic");
}

TEST(Rank, StableAndComplete) {
  const auto& m = shared_model();
  EXPECT_TRUE(m.rank({}, "greek").empty());
  const std::vector<std::string> texts{"Доброе утро", "Καλημέρα σας", "Доброе утро",
                                       "Καλημέρα σας", "?"};
  const auto r = m.rank(texts, "greek", 2);
  ASSERT_EQ(r.size(), texts.size());
  EXPECT_TRUE(r[0].index == 1 && r[1].index == 3);
  for (std::size_t i = 1; i < r.size(); ++i) {
    EXPECT_GE(r[i - 1].affinity, r[i].affinity);
    if (r[i - 1].affinity == r[i].affinity) {
      EXPECT_LT(r[i - 1].index, r[i].index);
    }
  }
  EXPECT_THROW(m.rank(texts, "latin"), zest::UnknownLabel);
}

TEST(Serialize, RoundTripPreservesScores) {
  const auto& m = shared_model();
  zest::testing::TempDir dir;
  const auto path = dir / "m.zest";
  m.save(path);
  const auto loaded = ZestModel::load(path);
  EXPECT_EQ(loaded.labels(), m.labels());
  EXPECT_EQ(loaded.prep(), m.prep());
  EXPECT_EQ(loaded.schedule(), m.schedule());
  EXPECT_EQ(loaded.params(), m.params());
  EXPECT_EQ(loaded.trainer(), m.trainer());
  EXPECT_EQ(loaded.serialize(), m.serialize());
  for (const std::string t : {"Καλημέρα σας", "Доброе утро", "mixed αβγ где"}) {
    const auto a = m.score(t);
    const auto b = loaded.score(t);
    EXPECT_EQ(a.raw, b.raw);
  }
}

TEST(Serialize, CorruptFilesRejected) {
  const auto bytes = shared_model().serialize();
  EXPECT_THROW(ZestModel::deserialize(bytes.substr(0, bytes.size() / 2)), zest::FormatError);
  EXPECT_THROW(ZestModel::deserialize(""), zest::FormatError);
  std::string wrong = bytes;
  wrong.replace(0, 4, "ZNGR");
  EXPECT_THROW(ZestModel::deserialize(wrong), zest::FormatError);

  // A well-framed file whose stored baseline disagrees with the dictionary.
  auto c = zest::decode_container(bytes, "ZEST", 1);
  c.body[c.body.size() - 4] ^= 0x01;
  EXPECT_THROW(ZestModel::deserialize(zest::encode_container(c)), zest::FormatError);
  zest::testing::TempDir dir;
  EXPECT_THROW(ZestModel::load(dir / "absent.zest"), zest::IoError);
}

}  // namespace
