#include "zest/container.hpp"

#include <zlib.h>

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <iterator>
#include <system_error>

#include "zest/errors.hpp"

namespace zest {
namespace {

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for very large containers.
  constexpr std::size_t kChunk = 1u << 30;
  for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
    const std::size_t n = std::min(kChunk, bytes.size() - off);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + off), static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

std::uint32_t load_u32(std::string_view b, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[pos + i]);
  return v;
}

}  // namespace

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t ByteReader::u32() {
  if (bytes_.size() - pos_ < 4) throw FormatError("truncated model body");
  const std::uint32_t v = load_u32(bytes_, pos_);
  pos_ += 4;
  return v;
}

std::string_view ByteReader::bytes(std::size_t n) {
  if (bytes_.size() - pos_ < n) throw FormatError("truncated model body");
  const std::string_view out = bytes_.substr(pos_, n);
  pos_ += n;
  return out;
}

std::string encode_container(const Container& c) {
  if (c.magic.size() != 4) throw std::invalid_argument("container magic must be 4 bytes");
  std::string out;
  out.reserve(16 + c.metadata.size() + c.body.size());
  out += c.magic;
  put_u32(out, c.format_version);
  put_u32(out, static_cast<std::uint32_t>(c.metadata.size()));
  out += c.metadata;
  out += c.body;
  put_u32(out, crc32_of(out));
  return out;
}

Container decode_container(std::string_view bytes, std::string_view expected_magic,
                           std::uint32_t max_version) {
  if (bytes.size() < 16) throw FormatError("model file truncated");
  if (bytes.substr(0, 4) != expected_magic) {
    throw FormatError("bad magic: expected '" + std::string(expected_magic) + "'");
  }
  const std::string_view framed = bytes.substr(0, bytes.size() - 4);
  if (crc32_of(framed) != load_u32(bytes, bytes.size() - 4)) {
    throw FormatError("model checksum mismatch (file truncated or corrupted)");
  }
  Container c;
  c.magic = std::string(expected_magic);
  c.format_version = load_u32(bytes, 4);
  if (c.format_version == 0 || c.format_version > max_version) {
    throw FormatError("unsupported format version " + std::to_string(c.format_version));
  }
  const std::uint32_t meta_len = load_u32(bytes, 8);
  if (meta_len > framed.size() - 12) throw FormatError("metadata length out of range");
  c.metadata = std::string(framed.substr(12, meta_len));
  c.body = std::string(framed.substr(12 + meta_len));
  return c;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return data;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("error writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename into '" + path.string() + "'");
  }
}

}  // namespace zest
