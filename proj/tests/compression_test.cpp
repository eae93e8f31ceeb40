#include <gtest/gtest.h>

#include <thread>

#include "json.hpp"
#include <random>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "zest/compression.hpp"
#include "zest/container.hpp"
#include "zest/errors.hpp"

namespace {

using zest::CodecId;
using zest::CodecParams;
using zest::compressed_size;
using zest::Dictionary;

CodecParams zstd_params(int level = 3, bool minimize = true) {
  return CodecParams{CodecId::zstd_dict, level, minimize};
}

std::vector<std::string> corpus(const std::string& alphabet_words, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> words;
  std::string cur;
  for (std::size_t i = 0; i <= alphabet_words.size(); ++i) {
    if (i == alphabet_words.size() || alphabet_words[i] == ' ') {
      if (!cur.empty()) words.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(alphabet_words[i]);
    }
  }
  std::vector<std::string> docs;
  for (int d = 0; d < n; ++d) {
    std::string doc;
    const int len = 10 + static_cast<int>(rng() % 20);
    for (int w = 0; w < len; ++w) {
      if (w) doc += ' ';
      doc += words[rng() % words.size()];
    }
    docs.push_back(doc);
  }
  return docs;
}

const std::string kGreekWords =
    "και του της την από για που στο στην είναι με δεν θα να ότι αυτό ένα μια λόγος χρόνος "
    "άνθρωπος πόλη θάλασσα ουρανός ήλιος φως νερό γη σπίτι δρόμος";
const std::string kCyrillicWords =
    "и в не на что он с как это по но из за так все она да ты вы мы время человек город "
    "море небо солнце свет вода земля дом дорога";

TEST(Golden, CompressedSizesMatchReferenceCompressor) {
  const auto dir = zest::testing::data_dir() / "golden";
  const auto doc = nlohmann::json::parse(zest::read_file(dir / "golden.json"));
  ASSERT_EQ(doc.at("zstd_version"), "1.5.7");
  ASSERT_FALSE(doc.at("cases").empty());
  for (const auto& c : doc.at("cases")) {
    const std::string input = zest::read_file(dir / c.at("input").get<std::string>());
    const CodecParams params{c.at("dictionary").is_null() ? CodecId::zstd_plain : CodecId::zstd_dict,
                             c.at("level").get<int>(), c.at("minimize_headers").get<bool>()};
    std::size_t got = 0;
    if (c.at("dictionary").is_null()) {
      got = compressed_size(input, nullptr, params);
    } else {
      std::string payload = zest::read_file(dir / c.at("dictionary").get<std::string>());
      const std::size_t n = payload.size();
      const Dictionary dict(n, std::move(payload), 0, false, params);
      got = compressed_size(input, &dict, params);
    }
    EXPECT_EQ(got, c.at("expected_size").get<std::size_t>()) << c.dump();
  }
}

TEST(Codec, ParseNamesAndAliases) {
  EXPECT_EQ(zest::parse_codec("zstd"), CodecId::zstd_plain);
  EXPECT_EQ(zest::parse_codec("zstd_dict"), CodecId::zstd_dict);
  EXPECT_EQ(zest::parse_codec("gzip"), CodecId::deflate);
  EXPECT_EQ(zest::parse_codec("xz"), CodecId::lzma);
  EXPECT_THROW(zest::parse_codec("brotli"), zest::UnsupportedCodec);
  EXPECT_FALSE(zest::codec_supported(CodecId::bzip2));
  EXPECT_THROW(compressed_size("x", nullptr, CodecParams{CodecId::bzip2, 3, true}),
               zest::UnsupportedCodec);
}

TEST(Codec, LevelValidation) {
  EXPECT_THROW(zstd_params(0).validate(), std::invalid_argument);
  EXPECT_THROW(zstd_params(20).validate(), std::invalid_argument);
  EXPECT_NO_THROW(zstd_params(19).validate());
}

TEST(Codec, DictionaryRejectedForPlainCodecs) {
  const std::vector<std::string> samples = corpus(kGreekWords, 50, 1);
  const auto dict = zest::train_dictionary(samples, 4096, zstd_params());
  EXPECT_THROW(compressed_size("abc", &dict, CodecParams{CodecId::deflate, 3, true}),
               zest::UnsupportedCodec);
  EXPECT_THROW(zest::train_dictionary(samples, 4096, CodecParams{CodecId::lzma, 3, true}),
               zest::UnsupportedCodec);
}

TEST(Codec, AllSupportedCodecsCompress) {
  const std::string text(2000, 'a');
  for (CodecId id : {CodecId::zstd_plain, CodecId::deflate, CodecId::lzma}) {
    for (bool minimize : {true, false}) {
      const CodecParams p{id, 6, minimize};
      const auto n = compressed_size(text, nullptr, p);
      EXPECT_GT(n, 0u);
      EXPECT_LT(n, 200u) << zest::codec_name(id);
    }
    EXPECT_LE(compressed_size(text, nullptr, CodecParams{id, 6, true}),
              compressed_size(text, nullptr, CodecParams{id, 6, false}));
  }
}

TEST(Train, EmptySamplesFail) {
  EXPECT_THROW(zest::train_dictionary({}, 4096, zstd_params()), zest::TrainingFailed);
  const std::vector<std::string> blanks = {"", ""};
  EXPECT_THROW(zest::train_dictionary(blanks, 4096, zstd_params()), zest::TrainingFailed);
}

TEST(Train, DegenerateSamplesFallBackToRawContent) {
  const std::vector<std::string> samples(5, "aaaa");
  const auto dict = zest::train_dictionary(samples, 4096, zstd_params());
  EXPECT_TRUE(dict.fallback());
  EXPECT_EQ(dict.payload(), std::string(20, 'a'));

  const std::vector<std::string> ordered = {"first", "second", "third"};
  const auto d2 = zest::train_dictionary(ordered, 8, zstd_params());
  EXPECT_TRUE(d2.fallback());
  EXPECT_EQ(d2.payload(), "thirdsec");  // most recent first, truncated
}

TEST(Train, DeterministicPayload) {
  const auto samples = corpus(kGreekWords, 300, 5);
  const auto a = zest::train_dictionary(samples, 8192, zstd_params());
  const auto b = zest::train_dictionary(samples, 8192, zstd_params());
  EXPECT_FALSE(a.fallback());
  EXPECT_EQ(a.payload(), b.payload());
  EXPECT_LE(a.payload().size(), 8192u);
  EXPECT_EQ(a.empty_compressed_size(), compressed_size("", &a, zstd_params()));
}

TEST(Sizes, RepeatedTextCompressesToLessThanDouble) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const std::string s = zest::testing::random_text(rng, 400);
    if (s.size() <= 64) continue;
    const auto p = CodecParams{CodecId::zstd_plain, 3, true};
    EXPECT_GE(compressed_size(s, nullptr, p) * 2, compressed_size(s + s, nullptr, p));
  }
}

TEST(Sizes, RedundantTextBeatsRandomBytes) {
  std::mt19937_64 rng(3);
  const std::string random = zest::testing::random_bytes(rng, 35);
  const auto p = CodecParams{CodecId::zstd_plain, 3, true};
  EXPECT_LT(compressed_size("hello world hello world hello world", nullptr, p),
            compressed_size(random, nullptr, p));
}

TEST(Sizes, NetSizeNonNegativeAndRandomBytesIncompressible) {
  const auto samples = corpus(kGreekWords, 300, 9);
  const auto dict = zest::train_dictionary(samples, 16384, zstd_params());
  std::mt19937_64 rng(21);
  for (int i = 0; i < 50; ++i) {
    const std::string r = zest::testing::random_bytes(rng, 100);
    const auto net = zest::net_compressed_size(r, dict, zstd_params());
    EXPECT_GE(net, 90u);
    EXPECT_LE(net, 130u);
  }
  EXPECT_EQ(zest::net_compressed_size("", dict, zstd_params()), 0u);
}

TEST(Sizes, DictionaryFavoursItsOwnScript) {
  const auto greek = corpus(kGreekWords, 400, 1);
  const auto cyr = corpus(kCyrillicWords, 400, 2);
  const auto p = zstd_params();
  const auto dg = zest::train_dictionary(greek, 16384, p);
  const auto dc = zest::train_dictionary(cyr, 16384, p);
  const auto held_g = corpus(kGreekWords, 20, 100);
  const auto held_c = corpus(kCyrillicWords, 20, 200);
  for (const auto& s : held_g)
    EXPECT_LT(zest::net_compressed_size(s, dg, p), zest::net_compressed_size(s, dc, p));
  for (const auto& s : held_c)
    EXPECT_LT(zest::net_compressed_size(s, dc, p), zest::net_compressed_size(s, dg, p));
}

TEST(Sizes, ThreadLocalContextsAgree) {
  const auto samples = corpus(kGreekWords, 200, 4);
  const auto dict = zest::train_dictionary(samples, 8192, zstd_params());
  const auto held = corpus(kGreekWords, 64, 77);
  std::vector<std::size_t> serial;
  for (const auto& s : held) serial.push_back(compressed_size(s, &dict, zstd_params()));
  std::vector<std::size_t> threaded(held.size());
  std::vector<std::thread> pool;
  for (int t = 0; t < 4; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < held.size(); i += 4)
        threaded[i] = compressed_size(held[i], &dict, zstd_params());
    });
  for (auto& th : pool) th.join();
  EXPECT_EQ(serial, threaded);
}

}  // namespace
