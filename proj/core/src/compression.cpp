#include "zest/compression.hpp"

#define ZSTD_STATIC_LINKING_ONLY
#define ZDICT_STATIC_LINKING_ONLY
#include <lzma.h>
#include <zdict.h>
#include <zlib.h>
#include <zstd.h>

#include <algorithm>
#include <array>
#include <stdexcept>

#include "zest/errors.hpp"

namespace zest {

namespace detail {

struct CDictHandle {
  explicit CDictHandle(ZSTD_CDict* d) : cdict(d) {}
  ~CDictHandle() { ZSTD_freeCDict(cdict); }
  CDictHandle(const CDictHandle&) = delete;
  CDictHandle& operator=(const CDictHandle&) = delete;

  ZSTD_CDict* cdict;
};

}  // namespace detail

namespace {

// Trained dictionaries with less content than this are degenerate (the
// trainer emits entropy tables around a few bytes on near-constant corpora).
constexpr std::size_t kMinTrainedContent = 64;

constexpr std::array<std::string_view, 5> kCodecNames = {"zstd_dict", "zstd_plain", "deflate",
                                                         "lzma", "bzip2"};

struct CCtxDeleter {
  void operator()(ZSTD_CCtx* c) const { ZSTD_freeCCtx(c); }
};

ZSTD_CCtx& thread_cctx() {
  thread_local std::unique_ptr<ZSTD_CCtx, CCtxDeleter> cctx{ZSTD_createCCtx()};
  if (!cctx) throw std::bad_alloc();
  return *cctx;
}

void check_zstd(std::size_t code, const char* what) {
  if (ZSTD_isError(code)) throw Error(std::string(what) + ": " + ZSTD_getErrorName(code));
}

// Thread-local scratch output buffer, grown on demand.
std::string& scratch(std::size_t bound) {
  thread_local std::string buf;
  if (buf.size() < bound) buf.resize(bound);
  return buf;
}

std::size_t zstd_size(std::string_view text, const ZSTD_CDict* cdict, const CodecParams& params) {
  ZSTD_CCtx& cctx = thread_cctx();
  ZSTD_CCtx_reset(&cctx, ZSTD_reset_session_and_parameters);
  check_zstd(ZSTD_CCtx_setParameter(&cctx, ZSTD_c_compressionLevel, params.level), "zstd level");
  const int flag = params.minimize_headers ? 0 : 1;
  check_zstd(ZSTD_CCtx_setParameter(&cctx, ZSTD_c_checksumFlag, flag), "zstd checksum flag");
  check_zstd(ZSTD_CCtx_setParameter(&cctx, ZSTD_c_contentSizeFlag, flag), "zstd content size");
  check_zstd(ZSTD_CCtx_setParameter(&cctx, ZSTD_c_dictIDFlag, flag), "zstd dict id flag");
  if (cdict != nullptr) check_zstd(ZSTD_CCtx_refCDict(&cctx, cdict), "zstd refCDict");

  std::string& out = scratch(ZSTD_compressBound(text.size()));
  const std::size_t n = ZSTD_compress2(&cctx, out.data(), out.size(), text.data(), text.size());
  check_zstd(n, "zstd compress");
  return n;
}

std::size_t deflate_size(std::string_view text, const CodecParams& params) {
  z_stream zs{};
  const int level = std::clamp(params.level, 1, 9);
  const int window_bits = params.minimize_headers ? -MAX_WBITS : MAX_WBITS;
  if (deflateInit2(&zs, level, Z_DEFLATED, window_bits, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error("deflateInit2 failed");
  }
  std::string& out = scratch(deflateBound(&zs, static_cast<uLong>(text.size())));
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(text.data()));
  zs.avail_in = static_cast<uInt>(text.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  const std::size_t n = zs.total_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error("deflate failed");
  return n;
}

std::size_t lzma_size(std::string_view text, const CodecParams& params) {
  const auto preset = static_cast<uint32_t>(std::clamp(params.level, 0, 9));
  std::string& out = scratch(lzma_stream_buffer_bound(text.size()) + 64);
  std::size_t pos = 0;
  lzma_ret rc;
  if (params.minimize_headers) {
    lzma_options_lzma opts;
    if (lzma_lzma_preset(&opts, preset)) throw Error("lzma preset failed");
    const std::array<lzma_filter, 2> filters = {
        lzma_filter{LZMA_FILTER_LZMA2, &opts}, lzma_filter{LZMA_VLI_UNKNOWN, nullptr}};
    rc = lzma_raw_buffer_encode(filters.data(), nullptr,
                                reinterpret_cast<const uint8_t*>(text.data()), text.size(),
                                reinterpret_cast<uint8_t*>(out.data()), &pos, out.size());
  } else {
    rc = lzma_easy_buffer_encode(preset, LZMA_CHECK_CRC64, nullptr,
                                 reinterpret_cast<const uint8_t*>(text.data()), text.size(),
                                 reinterpret_cast<uint8_t*>(out.data()), &pos, out.size());
  }
  if (rc != LZMA_OK) throw Error("lzma encode failed");
  return pos;
}

std::shared_ptr<const detail::CDictHandle> make_cdict(std::string_view payload, int level) {
  // Same construction as a precomputed python-zstandard dictionary, so sizes
  // can be checked against that binding byte for byte.
  const ZSTD_compressionParameters cparams = ZSTD_getCParams(level, 0, payload.size());
  ZSTD_CDict* d = ZSTD_createCDict_advanced(payload.data(), payload.size(), ZSTD_dlm_byCopy,
                                            ZSTD_dct_auto, cparams, ZSTD_defaultCMem);
  if (d == nullptr) throw TrainingFailed("zstd rejected dictionary payload");
  return std::make_shared<const detail::CDictHandle>(d);
}

void require_supported(CodecId id) {
  if (!codec_supported(id)) {
    throw UnsupportedCodec("codec '" + std::string(codec_name(id)) + "' is not available");
  }
}

}  // namespace

std::string_view codec_name(CodecId id) { return kCodecNames.at(static_cast<std::size_t>(id)); }

CodecId parse_codec(std::string_view name) {
  for (std::size_t i = 0; i < kCodecNames.size(); ++i) {
    if (kCodecNames[i] == name) return static_cast<CodecId>(i);
  }
  if (name == "zstd") return CodecId::zstd_plain;
  if (name == "zlib" || name == "gzip") return CodecId::deflate;
  if (name == "xz" || name == "lzma2") return CodecId::lzma;
  if (name == "bz2") return CodecId::bzip2;
  throw UnsupportedCodec("unknown codec '" + std::string(name) + "'");
}

bool codec_supported(CodecId id) { return id != CodecId::bzip2; }

bool codec_has_dictionary_mode(CodecId id) { return id == CodecId::zstd_dict; }

void CodecParams::validate() const {
  if (level < 1 || level > 19) throw std::invalid_argument("compression level must be in 1..19");
}

Dictionary::Dictionary(std::size_t target_size, std::string payload, std::size_t trained_on_bytes,
                       bool fallback, const CodecParams& params)
    : target_size_(target_size),
      payload_(std::move(payload)),
      trained_on_bytes_(trained_on_bytes),
      fallback_(fallback),
      level_(params.level),
      cdict_(make_cdict(payload_, params.level)) {
  if (payload_.empty()) throw TrainingFailed("empty dictionary payload");
  empty_size_ = zstd_size({}, cdict_->cdict, params);
}

Dictionary train_dictionary(std::span<const std::string> samples, std::size_t target_size,
                            const CodecParams& params, const TrainerParams& trainer) {
  if (!codec_has_dictionary_mode(params.codec)) {
    throw UnsupportedCodec("codec '" + std::string(codec_name(params.codec)) +
                           "' has no dictionary mode");
  }
  if (target_size == 0) throw std::invalid_argument("dictionary target size must be > 0");

  std::string joined;
  std::vector<std::size_t> sizes;
  sizes.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.empty()) continue;
    joined += s;
    sizes.push_back(s.size());
  }
  if (joined.empty()) throw TrainingFailed("no sample bytes to train a dictionary from");

  if (target_size >= ZDICT_DICTSIZE_MIN) {
    std::string payload(target_size, '\0');
    ZDICT_fastCover_params_t p{};
    p.k = trainer.k;
    p.d = trainer.d;
    p.steps = trainer.steps;
    p.splitPoint = trainer.split_point;
    p.f = trainer.f;
    p.accel = trainer.accel;
    p.nbThreads = 0;
    p.zParams.compressionLevel = params.level;
    p.zParams.notificationLevel = 0;
    const auto n_samples = static_cast<unsigned>(sizes.size());
    const std::size_t n =
        trainer.k == 0
            ? ZDICT_optimizeTrainFromBuffer_fastCover(payload.data(), payload.size(),
                                                      joined.data(), sizes.data(), n_samples, &p)
            : ZDICT_trainFromBuffer_fastCover(payload.data(), payload.size(), joined.data(),
                                              sizes.data(), n_samples, p);
    const std::size_t header =
        ZDICT_isError(n) ? n : ZDICT_getDictHeaderSize(payload.data(), n);
    if (!ZDICT_isError(header) && n >= header + kMinTrainedContent) {
      payload.resize(n);
      return Dictionary(target_size, std::move(payload), joined.size(), false, params);
    }
  }

  std::string raw;
  for (auto it = samples.rbegin(); it != samples.rend() && raw.size() < target_size; ++it) {
    raw.append(*it, 0, std::min(it->size(), target_size - raw.size()));
  }
  return Dictionary(target_size, std::move(raw), joined.size(), true, params);
}

std::size_t compressed_size(std::string_view text, const Dictionary* dict,
                            const CodecParams& params) {
  require_supported(params.codec);
  if (dict != nullptr && !codec_has_dictionary_mode(params.codec)) {
    throw UnsupportedCodec("codec '" + std::string(codec_name(params.codec)) +
                           "' has no dictionary mode");
  }
  switch (params.codec) {
    case CodecId::zstd_dict:
    case CodecId::zstd_plain: {
      if (dict == nullptr) return zstd_size(text, nullptr, params);
      if (dict->level() == params.level) return zstd_size(text, dict->handle().cdict, params);
      const auto cdict = make_cdict(dict->payload(), params.level);
      return zstd_size(text, cdict->cdict, params);
    }
    case CodecId::deflate:
      return deflate_size(text, params);
    case CodecId::lzma:
      return lzma_size(text, params);
    case CodecId::bzip2:
      break;
  }
  throw UnsupportedCodec("codec not available");
}

std::size_t net_compressed_size(std::string_view text, const Dictionary& dict,
                                const CodecParams& params) {
  const std::size_t size = compressed_size(text, &dict, params);
  const std::size_t base =
      dict.level() == params.level ? dict.empty_compressed_size() : compressed_size({}, &dict, params);
  return size > base ? size - base : 0;
}

}  // namespace zest
