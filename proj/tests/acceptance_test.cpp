// Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
// non-zero if any criterion fails.
//
// Optional local corpora (directory per class):
//   ZEST_NEWS_DIR        news-style corpus for the telescoping ablation
//   ZEST_NEWSGROUPS_DIR  20-newsgroups tree for the plain-compressor comparison

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "test_util.hpp"
#include "zest/baselines.hpp"
#include "zest/container.hpp"
#include "zest/errors.hpp"
#include "zest/eval.hpp"
#include "zest/model.hpp"
#include "zest/synth.hpp"
#include "zest/text_prep.hpp"

namespace {

constexpr std::uint64_t kSynthSeed = 7;
constexpr zest::SplitSpec kSplit{0.2, 42, true};

struct Outcome {
  enum Status { pass, fail, skip } status = pass;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    notes.push_back(std::string(ok ? "ok: " : "FAILED: ") + what);
    if (!ok) status = fail;
  }
  void note(const std::string& what) { notes.push_back(what); }
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

using Split = std::pair<zest::LabeledDataset, zest::LabeledDataset>;

Split shared_head_6x500() {
  zest::SynthSpec spec;
  spec.classes = 6;
  return zest::split(zest::synth_corpus(spec, 3000, kSynthSeed), kSplit);
}

// 10 classes, 2,000 documents: the 20-newsgroups subset when available.
Split desk_corpus(std::string& name) {
  if (const char* dir = std::getenv("ZEST_NEWSGROUPS_DIR"); dir && *dir) {
    auto all = zest::load_dir_per_class(dir, zest::InvalidUtf8::replace);
    auto labels = all.labels();
    std::sort(labels.begin(), labels.end());
    labels.resize(std::min<std::size_t>(labels.size(), 10));
    const std::set<std::string> keep(labels.begin(), labels.end());
    std::map<std::string, std::size_t> taken;
    zest::LabeledDataset subset;
    subset.source = all.source;
    for (auto& r : all.records)
      if (keep.count(r.label) && taken[r.label]++ < 200) subset.records.push_back(std::move(r));
    name = "20-newsgroups subset (" + std::to_string(subset.size()) + " docs)";
    return zest::split(subset, kSplit);
  }
  name = "shared-head synthetic, 10 classes x 200 docs";
  zest::SynthSpec spec;
  spec.classes = 10;
  return zest::split(zest::synth_corpus(spec, 2000, kSynthSeed), kSplit);
}

Split disjoint_script_corpus() {
  zest::SynthSpec spec;
  spec.kind = zest::SynthKind::disjoint_script;
  // 500 per class; a 0.2 stratified split holds out exactly 100 of each.
  return zest::split(zest::synth_corpus(spec, 1000, kSynthSeed), kSplit);
}

double accuracy_of(const zest::ZestModel& m, const zest::LabeledDataset& test) {
  return zest::evaluate([&](std::string_view t) { return m.classify(t); }, m.labels(), test, 0)
      .accuracy;
}

zest::PrepConfig prep_with_padding(bool pad) {
  zest::PrepConfig p;
  p.pad_words = pad;
  return p;
}

// ---------------------------------------------------------------------------

void telescoping_on(const std::string& name, const Split& data, Outcome& out) {
  std::vector<double> acc;
  for (std::size_t k : {1, 2, 4}) {
    zest::TelescopeSchedule s;
    s.count = k;
    const auto m = zest::ZestModel::train(data.first.examples_per_class(), {}, s, {},
                                          zest::TrainOptions{0, {}});
    acc.push_back(accuracy_of(m, data.second));
  }
  out.note(name + ": acc k=1 " + fmt(acc[0]) + ", k=2 " + fmt(acc[1]) + ", k=4 " + fmt(acc[2]));
  out.check(acc[0] <= acc[1] && acc[1] <= acc[2], name + ": accuracy non-decreasing in k");
  out.check(acc[2] - acc[0] >= 0.05, name + ": acc(k=4) - acc(k=1) >= 0.05");
}

Outcome criterion1() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  telescoping_on("shared-head 6x500", shared_head_6x500(), out);
  if (const char* dir = std::getenv("ZEST_NEWS_DIR"); dir && *dir) {
    telescoping_on(std::string("news corpus ") + dir,
                   zest::split(zest::load_dir_per_class(dir, zest::InvalidUtf8::replace), kSplit),
                   out);
  } else {
    out.note("no local news corpus (set ZEST_NEWS_DIR); synthetic corpus only");
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.check(secs <= 300.0, "runtime " + fmt(secs, 1) + " s <= 300 s");
  return out;
}

Outcome criterion2() {
  Outcome out;
  std::string desk_name;
  auto desk = desk_corpus(desk_name);
  const std::vector<std::pair<std::string, Split>> corpora = {
      {"shared-head 6x500", shared_head_6x500()},
      {desk_name, std::move(desk)},
      {"disjoint-script", disjoint_script_corpus()}};
  bool strictly_better = false;
  for (const auto& [name, data] : corpora) {
    double acc[2];
    for (bool pad : {false, true}) {
      const auto m = zest::ZestModel::train(data.first.examples_per_class(), prep_with_padding(pad),
                                            {}, {}, zest::TrainOptions{0, {}});
      acc[pad] = accuracy_of(m, data.second);
    }
    out.check(acc[1] >= acc[0] - 0.005,
              name + ": pad " + fmt(acc[1]) + " >= no-pad " + fmt(acc[0]) + " - 0.005");
    strictly_better |= acc[1] > acc[0];
  }
  out.check(strictly_better, "padding strictly better on at least one corpus");
  return out;
}

struct DeskResults {
  std::string name;
  zest::EvaluationReport zest, concat_zstd, concat_lzma;
};

const DeskResults& desk_results() {
  static const DeskResults r = [] {
    DeskResults d;
    const auto data = desk_corpus(d.name);
    zest::BenchOptions opt;  // single-threaded timings for both sides
    d.zest = zest::run_method("zest", data.first, data.second, opt);
    d.concat_zstd = zest::run_method("concat:zstd", data.first, data.second, opt);
    if (zest::codec_supported(zest::CodecId::lzma))
      d.concat_lzma = zest::run_method("concat:lzma", data.first, data.second, opt);
    return d;
  }();
  return r;
}

Outcome criterion3() {
  Outcome out;
  const auto& d = desk_results();
  out.note(d.name);
  out.check(d.zest.fom >= d.concat_zstd.fom,
            "FOM zest " + fmt(d.zest.fom) + " >= concat:zstd " + fmt(d.concat_zstd.fom));
  out.check(d.zest.total_seconds() <= d.concat_zstd.total_seconds(),
            "time zest " + fmt(d.zest.total_seconds(), 3) + " s <= concat:zstd " +
                fmt(d.concat_zstd.total_seconds(), 3) + " s");
  return out;
}

Outcome criterion4() {
  Outcome out;
  if (!zest::codec_supported(zest::CodecId::lzma)) {
    out.status = Outcome::skip;
    out.note("no LZMA-family codec built in");
    return out;
  }
  const auto& d = desk_results();
  out.check(d.zest.total_seconds() * 10.0 <= d.concat_lzma.total_seconds(),
            "time zest " + fmt(d.zest.total_seconds(), 3) + " s <= concat:lzma " +
                fmt(d.concat_lzma.total_seconds(), 3) + " s / 10");
  return out;
}

Outcome criterion5() {
  Outcome out;
  const auto [train, test] = disjoint_script_corpus();
  const auto m = zest::ZestModel::train(train.examples_per_class(), {}, {}, {},
                                        zest::TrainOptions{0, {}});
  std::map<std::string, int> held;
  for (const auto& r : test.records) ++held[r.label];
  out.check(held["greek"] == 100 && held["cyrillic"] == 100, "100 held-out sentences per class");
  const double acc = accuracy_of(m, test);
  out.check(acc >= 0.99, "accuracy " + fmt(acc) + " >= 0.99");
  double in_sum = 0, out_sum = 0;
  std::size_t in_n = 0, out_n = 0;
  for (const auto& r : test.records) {
    for (std::size_t c = 0; c < m.classes().size(); ++c) {
      const double a = m.affinity(r.text, c);
      if (m.classes()[c].label == r.label) {
        in_sum += a;
        ++in_n;
      } else {
        out_sum += a;
        ++out_n;
      }
    }
  }
  const double gap = in_sum / static_cast<double>(in_n) - out_sum / static_cast<double>(out_n);
  out.check(gap >= 0.3, "mean in-class - out-of-class affinity " + fmt(gap) + " >= 0.3");
  return out;
}

Outcome criterion6() {
  Outcome out;
  std::mt19937_64 rng(2024);

  // Min-subtraction on random score vectors.
  bool ok = true;
  for (int i = 0; i < 10000 && ok; ++i) {
    const std::size_t n = 1 + rng() % 8;
    std::vector<std::string> labels;
    std::vector<double> raw;
    for (std::size_t c = 0; c < n; ++c) {
      labels.push_back("l" + std::to_string(c));
      raw.push_back(static_cast<double>(rng() % 1000) / 1000.0);  // ties are common
    }
    const auto sv = zest::make_score_vector(labels, raw);
    const auto raw_arg = static_cast<std::size_t>(std::max_element(raw.begin(), raw.end()) - raw.begin());
    ok = *std::min_element(sv.adjusted.begin(), sv.adjusted.end()) == 0.0 &&
         sv.argmax_index == raw_arg &&
         static_cast<std::size_t>(std::max_element(sv.adjusted.begin(), sv.adjusted.end()) -
                                  sv.adjusted.begin()) == raw_arg;
  }
  out.check(ok, "min-subtraction on 10,000 random score vectors");

  // Real model: fuzzed affinities and score vectors.
  const auto [train, test] = disjoint_script_corpus();
  const auto model = zest::ZestModel::train(train.examples_per_class(), {}, {}, {},
                                            zest::TrainOptions{0, {}});
  std::vector<std::string> fuzz = {"", "a", "α", "!", " ", "\xFF"};
  for (int i = 0; i < 300; ++i) fuzz.push_back(zest::testing::random_text(rng, 200));
  for (int i = 0; i < 50; ++i) fuzz.push_back(zest::testing::random_bytes(rng, 1 + rng() % 300));
  {
    std::string big;
    while (big.size() < (1u << 20)) big += test.records[big.size() % test.size()].text + ' ';
    fuzz.push_back(big);
    fuzz.push_back(zest::testing::random_text(rng, 1u << 20));
  }
  bool in_range = true, min_zero = true;
  for (const auto& t : fuzz) {
    const auto sv = model.score(t);
    for (double a : sv.raw) in_range &= a >= 0.0 && a <= 1.0;
    min_zero &= *std::min_element(sv.adjusted.begin(), sv.adjusted.end()) == 0.0;
    const auto arg = static_cast<std::size_t>(std::max_element(sv.raw.begin(), sv.raw.end()) - sv.raw.begin());
    min_zero &= sv.argmax_index == arg;
  }
  out.check(in_range, "affinity in [0,1] on " + std::to_string(fuzz.size()) +
                          " fuzzed inputs (empty, 1-char, 1 MB)");
  out.check(min_zero, "model score vectors: min(adjusted) = 0 and argmax preserved");

  bool idem = true;
  for (int i = 0; i < 2000; ++i) {
    const auto t = zest::testing::random_text(rng, 80);
    for (const auto& cfg : {zest::PrepConfig{}, zest::PrepConfig{true, false, 10}}) {
      const auto once = zest::prepare(t, cfg);
      idem &= zest::normalize_text(once) == once;
    }
    const auto n = zest::normalize_text(t);
    idem &= zest::normalize_text(n) == n;
  }
  out.check(idem, "prepare/normalize idempotence on 2,000 random texts");

  zest::testing::TempDir dir;
  model.save(dir / "m.zest");
  const auto loaded = zest::ZestModel::load(dir / "m.zest");
  bool same = true;
  std::vector<std::string> probe;
  for (std::size_t i = 0; i < 200; ++i)
    probe.push_back(i < test.size() ? test.records[i].text : zest::testing::random_text(rng, 100));
  for (const auto& t : probe) {
    const auto a = model.score(t), b = loaded.score(t);
    same &= a.raw == b.raw && a.adjusted == b.adjusted && a.argmax_index == b.argmax_index;
  }
  out.check(same, "save/load round trip: bit-identical score vectors on 200 probes");

  const auto again = zest::ZestModel::train(train.examples_per_class(), {}, {}, {},
                                            zest::TrainOptions{1, {}});
  again.save(dir / "again.zest");
  out.check(zest::read_file(dir / "m.zest") == zest::read_file(dir / "again.zest"),
            "train determinism: byte-identical model files");
  return out;
}

Outcome criterion7() {
  Outcome out;

  // Naive Bayes, hand-computed (see baselines_test.cpp for the derivation).
  const zest::ExamplesPerClass ex{{"A", {"a b c", "a a d", "b e"}},
                                  {"B", {"f g h", "f i j", "c f"}}};
  const auto nb = zest::NaiveBayes::train(ex, 1.0);
  const std::vector<std::pair<std::string, double>> nb_cases = {
      {"a a f", 0.8}, {"c", 0.5}, {"b b b", 27.0 / 28}, {"f g", 1.0 / 9.0}};
  bool nb_ok = nb.vocabulary_size() == 10;
  for (const auto& [text, p_a] : nb_cases) {
    const auto post = nb.posterior(text);
    nb_ok &= std::abs(post[0] - p_a) <= 1e-9 * p_a && std::abs(post[1] - (1 - p_a)) <= 1e-9 * (1 - p_a);
  }
  out.check(nb_ok, "NB posteriors match 2-class/10-token hand computation to 1e-9 relative");

  // n-gram affinity against brute-force enumeration.
  std::mt19937_64 rng(77);
  static constexpr char32_t alphabet[] = {U'a', U'b', U'c', U' ', U'ж', U'λ', U'中'};
  auto gen = [&] {
    std::u32string s(rng() % 12, U'a');
    for (auto& c : s) c = alphabet[rng() % std::size(alphabet)];
    return s;
  };
  auto utf8 = [](const std::u32string& s) {
    std::string o;
    for (char32_t c : s) zest::testing::append_utf8(o, c);
    return o;
  };
  bool ng_ok = true;
  for (int i = 0; i < 1000; ++i) {
    const auto p = gen(), t = gen();
    std::set<std::u32string> have, want;
    for (std::size_t j = 0; j + 3 <= p.size(); ++j) have.insert(p.substr(j, 3));
    for (std::size_t j = 0; j + 3 <= t.size(); ++j) want.insert(t.substr(j, 3));
    std::size_t hit = 0;
    for (const auto& g : want) hit += have.count(g);
    const double expected = want.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(want.size());
    zest::NGramProfile prof;
    prof.n = 3;
    prof.add(utf8(p));
    ng_ok &= zest::ngram_affinity(utf8(t), prof) == expected;
  }
  out.check(ng_ok, "ngram_affinity matches brute force on 1,000 random strings");

  // Golden compressed sizes from the reference compressor.
  const auto gdir = zest::testing::data_dir() / "golden";
  const auto doc = nlohmann::json::parse(zest::read_file(gdir / "golden.json"));
  std::size_t matched = 0, total = 0;
  for (const auto& c : doc.at("cases")) {
    ++total;
    const std::string input = zest::read_file(gdir / c.at("input").get<std::string>());
    const bool has_dict = !c.at("dictionary").is_null();
    const zest::CodecParams params{has_dict ? zest::CodecId::zstd_dict : zest::CodecId::zstd_plain,
                                   c.at("level").get<int>(), c.at("minimize_headers").get<bool>()};
    std::size_t got;
    if (has_dict) {
      std::string payload = zest::read_file(gdir / c.at("dictionary").get<std::string>());
      const auto n = payload.size();
      const zest::Dictionary d(n, std::move(payload), 0, false, params);
      got = zest::compressed_size(input, &d, params);
    } else {
      got = zest::compressed_size(input, nullptr, params);
    }
    matched += got == c.at("expected_size").get<std::size_t>();
  }
  out.check(total > 0 && matched == total, "compressed_size matches reference on " +
                                               std::to_string(matched) + "/" +
                                               std::to_string(total) + " golden fixtures");
  return out;
}

Outcome criterion8() {
  Outcome out;
  const auto [train, test] = shared_head_6x500();
  zest::BenchOptions opt;
  opt.threads = 0;
  const auto z = zest::run_method("zest", train, test, opt);
  const auto nb = zest::run_method("nb", train, test, opt);
  const auto ens = zest::run_method("ensemble", train, test, opt);
  out.check(ens.accuracy >= std::max(z.accuracy, nb.accuracy) - 0.005,
            "ensemble " + fmt(ens.accuracy) + " >= max(zest " + fmt(z.accuracy) + ", nb " +
                fmt(nb.accuracy) + ") - 0.005");
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"telescoping ablation", criterion1},    {"word padding", criterion2},
      {"zest vs plain compressor", criterion3}, {"speed vs concat-LZMA", criterion4},
      {"disjoint-script property", criterion5}, {"invariant suite", criterion6},
      {"baseline oracles", criterion7},         {"ensemble", criterion8}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [name, run] = criteria[i];
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.status = Outcome::fail;
      o.note(std::string("exception: ") + e.what());
    }
    const char* tag = o.status == Outcome::pass ? "PASS" : o.status == Outcome::skip ? "SKIP" : "FAIL";
    std::printf("%s criterion %zu: %s\n", tag, i + 1, name.c_str());
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    failures += o.status == Outcome::fail;
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
