#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace zest {

enum class CodecId : std::uint8_t {
  zstd_dict,   // Zstandard with a trained dictionary (the scoring codec)
  zstd_plain,  // Zstandard without a dictionary
  deflate,     // raw DEFLATE via zlib
  lzma,        // raw LZMA2 via liblzma
  bzip2,       // not built in; reported unsupported
};

std::string_view codec_name(CodecId id);
// Throws UnsupportedCodec for unknown names.
CodecId parse_codec(std::string_view name);
bool codec_supported(CodecId id);
bool codec_has_dictionary_mode(CodecId id);

struct CodecParams {
  CodecId codec = CodecId::zstd_dict;
  int level = 3;
  // Drop the checksum, content-size and dictionary-ID frame fields (zstd),
  // the zlib wrapper (deflate) and the .xz container (lzma).
  bool minimize_headers = true;

  // Throws std::invalid_argument when level is outside 1..19.
  void validate() const;

  friend bool operator==(const CodecParams&, const CodecParams&) = default;
};

// Settings handed to the zstd fastCover dictionary trainer. They are part of
// the model metadata so a model can say how its dictionaries were built.
struct TrainerParams {
  unsigned k = 200;  // segment size; 0 searches candidate sizes (several times slower)
  unsigned d = 8;
  unsigned steps = 4;
  double split_point = 1.0;  // train and evaluate candidates on every sample
  unsigned f = 20;
  unsigned accel = 1;

  friend bool operator==(const TrainerParams&, const TrainerParams&) = default;
};

namespace detail {
struct CDictHandle;
}

// A trained compression dictionary. Immutable; copies share the digested
// zstd dictionary, which is safe to use from many threads at once.
class Dictionary {
 public:
  // Builds the digested form for `level` and measures the empty-string
  // baseline. Throws TrainingFailed if zstd rejects the payload.
  Dictionary(std::size_t target_size, std::string payload, std::size_t trained_on_bytes,
             bool fallback, const CodecParams& params);

  std::size_t target_size() const noexcept { return target_size_; }
  const std::string& payload() const noexcept { return payload_; }
  std::size_t trained_on_bytes() const noexcept { return trained_on_bytes_; }
  bool fallback() const noexcept { return fallback_; }
  int level() const noexcept { return level_; }
  // Compressed size of "" under this dictionary (the SizeBaseline).
  std::size_t empty_compressed_size() const noexcept { return empty_size_; }

  const detail::CDictHandle& handle() const noexcept { return *cdict_; }

 private:
  std::size_t target_size_;
  std::string payload_;
  std::size_t trained_on_bytes_;
  bool fallback_;
  int level_;
  std::shared_ptr<const detail::CDictHandle> cdict_;
  std::size_t empty_size_ = 0;
};

// Trains a dictionary of at most `target_size` bytes from `samples`.
//
// When the sample-based trainer fails, falls back to a raw-content dictionary
// made of the samples concatenated most-recent-first, truncated to
// target_size bytes. Throws TrainingFailed if samples are empty or contain no
// bytes, UnsupportedCodec when params.codec has no dictionary mode.
Dictionary train_dictionary(std::span<const std::string> samples, std::size_t target_size,
                            const CodecParams& params, const TrainerParams& trainer = {});

// Byte length of the codec output for `text`. `dict` may be null. Uses a
// thread-local codec context, so concurrent calls are safe.
std::size_t compressed_size(std::string_view text, const Dictionary* dict,
                            const CodecParams& params);

// compressed_size minus the dictionary's empty-string baseline, clamped at 0.
std::size_t net_compressed_size(std::string_view text, const Dictionary& dict,
                                const CodecParams& params);

}  // namespace zest
