#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace zest {

// Little-endian single-file framing shared by every model type:
//
//   magic[4] | format_version u32 | metadata_length u32 | metadata (UTF-8 JSON)
//   | body | crc32 u32 over all preceding bytes
//
// The body layout is owned by the model type that writes it.
struct Container {
  std::string magic;  // exactly four bytes
  std::uint32_t format_version = 0;
  std::string metadata;
  std::string body;
};

std::string encode_container(const Container& c);

// Validates checksum, magic and version. Throws FormatError.
Container decode_container(std::string_view bytes, std::string_view expected_magic,
                           std::uint32_t max_version);

// Little-endian helpers for body layouts.
void put_u32(std::string& out, std::uint32_t v);

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}
  std::uint32_t u32();
  std::string_view bytes(std::size_t n);
  bool done() const noexcept { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

// Whole-file read; throws IoError naming the path.
std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace zest
