#include <gtest/gtest.h>

#include <string>

#include "test_util.hpp"
#include "zest/container.hpp"
#include "zest/errors.hpp"

namespace {

zest::Container sample() {
  return zest::Container{"TEST", 1, R"({"k":1})", std::string("body\0bytes", 10)};
}

TEST(Container, RoundTrip) {
  const auto bytes = zest::encode_container(sample());
  const auto c = zest::decode_container(bytes, "TEST", 1);
  EXPECT_EQ(c.magic, "TEST");
  EXPECT_EQ(c.format_version, 1u);
  EXPECT_EQ(c.metadata, R"({"k":1})");
  EXPECT_EQ(c.body, sample().body);
}

TEST(Container, LittleEndianLayout) {
  const auto bytes = zest::encode_container(sample());
  ASSERT_GE(bytes.size(), 12u);
  EXPECT_EQ(bytes.substr(0, 4), "TEST");
  EXPECT_EQ(bytes.substr(4, 4), std::string("\x01\0\0\0", 4));
  EXPECT_EQ(bytes.substr(8, 4), std::string("\x07\0\0\0", 4));
  EXPECT_EQ(bytes.size(), 4 + 4 + 4 + 7 + 10 + 4u);
}

TEST(Container, RejectsCorruption) {
  const auto bytes = zest::encode_container(sample());
  EXPECT_THROW(zest::decode_container(bytes, "ZEST", 1), zest::FormatError);
  EXPECT_THROW(zest::decode_container(bytes.substr(0, bytes.size() - 1), "TEST", 1),
               zest::FormatError);
  EXPECT_THROW(zest::decode_container(bytes.substr(0, 5), "TEST", 1), zest::FormatError);
  std::string flipped = bytes;
  flipped[14] ^= 0x20;
  EXPECT_THROW(zest::decode_container(flipped, "TEST", 1), zest::FormatError);
  auto newer = sample();
  newer.format_version = 2;
  EXPECT_THROW(zest::decode_container(zest::encode_container(newer), "TEST", 1),
               zest::FormatError);
}

TEST(Container, ByteReaderBounds) {
  std::string b;
  zest::put_u32(b, 0xA1B2C3D4u);
  b += "xy";
  zest::ByteReader r(b);
  EXPECT_EQ(r.u32(), 0xA1B2C3D4u);
  EXPECT_EQ(r.bytes(2), "xy");
  EXPECT_TRUE(r.done());
  EXPECT_THROW(r.u32(), zest::FormatError);
}

TEST(Files, AtomicWriteAndMissingRead) {
  zest::testing::TempDir dir;
  const auto path = dir / "out.bin";
  zest::write_file_atomic(path, "first");
  zest::write_file_atomic(path, "second");
  EXPECT_EQ(zest::read_file(path), "second");
  EXPECT_FALSE(std::filesystem::exists(dir / "out.bin.tmp"));
  EXPECT_THROW(zest::read_file(dir / "missing"), zest::IoError);
}

}  // namespace
