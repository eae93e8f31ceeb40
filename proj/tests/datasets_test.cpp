#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "test_util.hpp"
#include "zest/datasets.hpp"
#include "zest/errors.hpp"

namespace {

void write(const std::filesystem::path& p, const std::string& s) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << s;
}

std::vector<zest::Record> read_all(const std::string& data, zest::ReaderOptions opt) {
  std::istringstream in(data);
  zest::RecordReader r(in, "mem", opt);
  std::vector<zest::Record> out;
  while (auto rec = r.next()) out.push_back(*rec);
  return out;
}

TEST(Csv, HeaderPlusRecords) {
  zest::testing::TempDir dir;
  write(dir / "d.csv", "text,label\nhello world,en\n\"bonjour, monde\",fr\n");
  const auto ds = zest::load_csv(dir / "d.csv", "text", "label");
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.records[1].text, "bonjour, monde");
  EXPECT_EQ(ds.labels(), (std::vector<std::string>{"en", "fr"}));
}

TEST(Csv, QuotedNewlinesCrlfAndBom) {
  const std::string data =
      "\xEF\xBB\xBFid,label,text\r\n1,a,\"two\r\nlines\"\r\n2,b,\"say \"\"hi\"\"\"\r\n";
  const auto recs = read_all(data, {zest::RecordFormat::csv, "text", "label"});
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].text, "two\nlines");
  EXPECT_EQ(recs[1].text, "say \"hi\"");
  EXPECT_EQ(recs[1].label, "b");
}

TEST(Csv, Errors) {
  EXPECT_THROW(read_all("text\nx\n", {zest::RecordFormat::csv, "body", ""}), zest::ParseError);
  try {
    read_all("text,label\na,x\nb\n", {zest::RecordFormat::csv, "text", "label"});
    FAIL();
  } catch (const zest::ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(read_all("text,label\n\"open,x\n", {zest::RecordFormat::csv, "text", "label"}),
               zest::ParseError);
  EXPECT_THROW(read_all("text,label\na,\n", {zest::RecordFormat::csv, "text", "label"}),
               zest::ParseError);
}

TEST(Jsonl, RecordsAndMalformedLine) {
  const std::string good = "{\"text\":\"a\",\"y\":\"p\"}\n\n{\"text\":\"b\",\"y\":\"q\"}\n";
  const auto recs = read_all(good, {zest::RecordFormat::jsonl, "text", "y"});
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[1].label, "q");
  try {
    read_all("{\"text\":\"a\",\"y\":\"p\"}\n{\"text\": oops}\n",
             {zest::RecordFormat::jsonl, "text", "y"});
    FAIL();
  } catch (const zest::ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(read_all("{\"y\":\"p\"}\n", {zest::RecordFormat::jsonl, "text", "y"}),
               zest::ParseError);
  EXPECT_THROW(read_all("{\"text\":[1]}\n", {zest::RecordFormat::jsonl, "text", ""}),
               zest::ParseError);
}

TEST(Lines, UnlabeledAndInvalidUtf8) {
  const std::string data = "one\ntwo\r\nth\xFFree\n";
  EXPECT_THROW(read_all(data, {}), zest::ParseError);
  zest::ReaderOptions opt;
  opt.invalid_utf8 = zest::InvalidUtf8::replace;
  const auto recs = read_all(data, opt);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[1].text, "two");
  EXPECT_EQ(recs[2].text, "th\xEF\xBF\xBDree");
  EXPECT_TRUE(recs[0].label.empty());
}

TEST(DirPerClass, SortedLabelsAndFiles) {
  zest::testing::TempDir dir;
  write(dir / "sports" / "2.txt", "match report");
  write(dir / "sports" / "1.txt", "goal scored");
  write(dir / "politics" / "a.txt", "vote count");
  const auto ds = zest::load_dir_per_class(dir.path());
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.records[0].label, "politics");
  EXPECT_EQ(ds.records[1].text, "goal scored");
  EXPECT_EQ(ds.records[2].text, "match report");
  EXPECT_THROW(zest::load_dir_per_class(dir / "nope"), zest::IoError);
}

TEST(Files, MissingPath) {
  EXPECT_THROW(zest::load_csv("/nonexistent/x.csv", "text", "label"), zest::IoError);
}

zest::LabeledDataset fifty_fifty() {
  zest::LabeledDataset ds;
  for (int i = 0; i < 100; ++i) ds.records.push_back({"t" + std::to_string(i), i % 2 ? "b" : "a"});
  return ds;
}

TEST(Split, StratifiedCounts) {
  const auto [train, test] = zest::split(fifty_fifty(), {0.2, 7, true});
  EXPECT_EQ(train.size(), 80u);
  EXPECT_EQ(test.size(), 20u);
  std::map<std::string, int> per;
  for (const auto& r : test.records) ++per[r.label];
  EXPECT_EQ(per["a"], 10);
  EXPECT_EQ(per["b"], 10);
  // Order preserved inside each half.
  for (std::size_t i = 1; i < train.size(); ++i)
    EXPECT_LT(std::stoi(train.records[i - 1].text.substr(1)),
              std::stoi(train.records[i].text.substr(1)));
}

TEST(Split, DeterministicAndSeedSensitive) {
  const auto ds = fifty_fifty();
  const auto a = zest::split(ds, {0.2, 7, true});
  const auto b = zest::split(ds, {0.2, 7, true});
  const auto c = zest::split(ds, {0.2, 8, true});
  EXPECT_EQ(a.second.texts(), b.second.texts());
  EXPECT_NE(a.second.texts(), c.second.texts());
  const auto u = zest::split(ds, {0.3, 1, false});
  EXPECT_EQ(u.second.size(), 30u);
}

TEST(Split, Validation) {
  EXPECT_THROW((zest::SplitSpec{0.0, 0, true}.validate()), std::invalid_argument);
  EXPECT_THROW((zest::SplitSpec{1.0, 0, true}.validate()), std::invalid_argument);
  EXPECT_EQ(zest::split(zest::LabeledDataset{}, {}).second.size(), 0u);
}

TEST(Shuffle, IsAPermutation) {
  std::vector<std::size_t> v(50);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
  auto w = v;
  zest::seeded_shuffle(w, 3);
  EXPECT_NE(w, v);
  std::sort(w.begin(), w.end());
  EXPECT_EQ(w, v);
}

}  // namespace
