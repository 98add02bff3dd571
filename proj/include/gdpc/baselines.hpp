#pragma once

#include <fstream>
#include <limits>
#include <map>
#include <string>

#include <lzma.h>

#include "dlms.hpp"

namespace gdpc::baselines {

enum class BaselineKind { null_data, delta_array, statistical, uncompressed };

inline std::string_view name(BaselineKind k) {
    switch (k) {
    case BaselineKind::null_data: return "null";
    case BaselineKind::delta_array: return "delta";
    case BaselineKind::statistical: return "stat";
    case BaselineKind::uncompressed: return "raw";
    }
    return "?";
}

inline BaselineKind parse_kind(std::string_view s) {
    for (auto k : {BaselineKind::null_data, BaselineKind::delta_array, BaselineKind::statistical,
                   BaselineKind::uncompressed}) {
        if (s == name(k)) return k;
    }
    throw Error(ErrorKind::invalid_argument, "unknown baseline '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Null Data and Delta Array. Both send the first reading in full and encode
// every later reading against its predecessor within the same APDU.
//
// NULL (tag 00) replaces a field when it is predictable: log_id == prev + 1,
// timestamp == prev + period, other fields equal to prev. log_id and the
// timestamp use NULL only for the expected progression so the decoder can
// tell which rule applied. Delta Array encodes counters (log_id and the four
// energy registers) as a signed difference in 1, 2 or 4 bytes (tags 0F, 10,
// 05); differences beyond 32 bits fall back to the absolute value (tag 06).

namespace detail {

enum class Mode { null_data, delta_array };

inline void put_delta(Bytes& out, std::uint32_t cur, std::uint32_t prev) {
    const std::int64_t d = std::int64_t{cur} - std::int64_t{prev};
    if (d >= INT8_MIN && d <= INT8_MAX) {
        out.push_back(dlms::tag_integer);
        put_be(out, static_cast<std::uint8_t>(static_cast<std::int8_t>(d)));
    } else if (d >= INT16_MIN && d <= INT16_MAX) {
        out.push_back(dlms::tag_long);
        put_be(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(d)));
    } else if (d >= INT32_MIN && d <= INT32_MAX) {
        out.push_back(dlms::tag_double_long);
        put_be(out, static_cast<std::uint32_t>(static_cast<std::int32_t>(d)));
    } else {
        dlms::put_u32(out, cur);
    }
}

inline void validate_args(std::span<const dlms::Reading> readings, int period_minutes) {
    if (readings.empty()) {
        throw Error(ErrorKind::invalid_argument, "baseline compressor needs at least one reading");
    }
    if (period_minutes <= 0) {
        throw Error(ErrorKind::invalid_argument, "load-profile period must be positive");
    }
}

inline Bytes compress(Mode mode, std::span<const dlms::Reading> readings, int period_minutes) {
    validate_args(readings, period_minutes);
    Bytes out;
    out.reserve(readings.size() * dlms::reading_size);
    dlms::append_reading(out, readings[0]);
    const bool delta = mode == Mode::delta_array;
    for (std::size_t i = 1; i < readings.size(); ++i) {
        const auto& p = readings[i - 1];
        const auto& c = readings[i];
        dlms::validate(c.timestamp);
        out.push_back(dlms::tag_structure);
        out.push_back(dlms::structure_fields);

        auto counter = [&](std::uint32_t cur, std::uint32_t prev, bool expected) {
            if (delta) {
                put_delta(out, cur, prev);
            } else if (expected) {
                out.push_back(dlms::tag_null);
            } else {
                dlms::put_u32(out, cur);
            }
        };
        counter(c.log_id, p.log_id, c.log_id == static_cast<std::uint32_t>(p.log_id + 1));
        if (c.timestamp == dlms::advance(p.timestamp, period_minutes)) {
            out.push_back(dlms::tag_null);
        } else {
            dlms::put_timestamp(out, c.timestamp);
        }
        if (c.log_status == p.log_status) out.push_back(dlms::tag_null); else dlms::put_u16(out, c.log_status);
        if (c.data_quality == p.data_quality) out.push_back(dlms::tag_null); else dlms::put_u32(out, c.data_quality);
        counter(c.a14, p.a14, c.a14 == p.a14);
        counter(c.a23, p.a23, c.a23 == p.a23);
        counter(c.r12, p.r12, c.r12 == p.r12);
        counter(c.r34, p.r34, c.r34 == p.r34);
    }
    return out;
}

inline std::vector<dlms::Reading> decompress(Mode mode, ByteView buf, int period_minutes) {
    if (period_minutes <= 0) {
        throw Error(ErrorKind::invalid_argument, "load-profile period must be positive");
    }
    if (buf.size() < dlms::reading_size) {
        throw MalformedBufferError(buf.size(), "buffer shorter than one full reading");
    }
    std::vector<dlms::Reading> out{dlms::decode_reading(buf.first(dlms::reading_size))};
    std::size_t at = dlms::reading_size;
    const bool delta = mode == Mode::delta_array;

    auto need = [&](std::size_t n) {
        if (at + n > buf.size()) throw MalformedBufferError(at, "buffer truncated");
    };
    auto tag = [&]() {
        need(1);
        return buf[at++];
    };
    auto value = [&](std::size_t n) {
        need(n);
        auto v = get_be(buf.subspan(at), n);
        at += n;
        return v;
    };
    auto bad_tag = [&](std::uint8_t t) {
        return MalformedBufferError(at - 1, "unexpected tag " + to_hex(ByteView(&t, 1)));
    };

    while (at < buf.size()) {
        const auto& p = out.back();
        dlms::Reading c;
        if (auto t = tag(); t != dlms::tag_structure) throw bad_tag(t);
        if (auto t = tag(); t != dlms::structure_fields) throw bad_tag(t);

        auto counter = [&](std::uint32_t prev, std::uint32_t expected) -> std::uint32_t {
            const auto t = tag();
            if (delta) {
                switch (t) {
                case dlms::tag_integer: return prev + static_cast<std::uint32_t>(static_cast<std::int8_t>(value(1)));
                case dlms::tag_long: return prev + static_cast<std::uint32_t>(static_cast<std::int16_t>(value(2)));
                case dlms::tag_double_long: return prev + static_cast<std::uint32_t>(value(4));
                case dlms::tag_double_long_unsigned: return static_cast<std::uint32_t>(value(4));
                default: throw bad_tag(t);
                }
            }
            if (t == dlms::tag_null) return expected;
            if (t == dlms::tag_double_long_unsigned) return static_cast<std::uint32_t>(value(4));
            throw bad_tag(t);
        };
        c.log_id = counter(p.log_id, p.log_id + 1);

        if (auto t = tag(); t == dlms::tag_null) {
            c.timestamp = dlms::advance(p.timestamp, period_minutes);
        } else if (t == dlms::tag_octet_string) {
            if (auto len = tag(); len != dlms::datetime_size) throw bad_tag(len);
            need(dlms::datetime_size);
            c.timestamp = dlms::read_timestamp_body(buf.subspan(at, dlms::datetime_size));
            at += dlms::datetime_size;
        } else {
            throw bad_tag(t);
        }

        if (auto t = tag(); t == dlms::tag_null) c.log_status = p.log_status;
        else if (t == dlms::tag_long_unsigned) c.log_status = static_cast<std::uint16_t>(value(2));
        else throw bad_tag(t);

        if (auto t = tag(); t == dlms::tag_null) c.data_quality = p.data_quality;
        else if (t == dlms::tag_double_long_unsigned) c.data_quality = static_cast<std::uint32_t>(value(4));
        else throw bad_tag(t);

        c.a14 = counter(p.a14, p.a14);
        c.a23 = counter(p.a23, p.a23);
        c.r12 = counter(p.r12, p.r12);
        c.r34 = counter(p.r34, p.r34);
        out.push_back(c);
    }
    return out;
}

} // namespace detail

inline Bytes null_compress(std::span<const dlms::Reading> readings, int period_minutes) {
    return detail::compress(detail::Mode::null_data, readings, period_minutes);
}

inline std::vector<dlms::Reading> null_decompress(ByteView buf, int period_minutes) {
    return detail::decompress(detail::Mode::null_data, buf, period_minutes);
}

inline Bytes delta_compress(std::span<const dlms::Reading> readings, int period_minutes) {
    return detail::compress(detail::Mode::delta_array, readings, period_minutes);
}

inline std::vector<dlms::Reading> delta_decompress(ByteView buf, int period_minutes) {
    return detail::decompress(detail::Mode::delta_array, buf, period_minutes);
}

// ---------------------------------------------------------------------------
// Statistical baseline: LZMA over the APDU as a plain byte array.

struct StatConfig {
    enum class Format { xz, raw };

    Format format = Format::xz;
    std::uint32_t preset = 6;
    std::uint32_t dict_size = 1u << 16;
    lzma_check check = LZMA_CHECK_CRC64;

    bool operator==(const StatConfig&) const = default;
};

// Applies `stat.*` keys from a key=value map; unknown stat keys are errors.
inline void apply(StatConfig& cfg, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (!key.starts_with("stat.")) continue;
        auto number = [&] {
            try {
                return static_cast<std::uint32_t>(std::stoul(value));
            } catch (const std::exception&) {
                throw Error(ErrorKind::invalid_argument, "bad number for " + key + ": '" + value + "'");
            }
        };
        if (key == "stat.format") {
            if (value == "xz") cfg.format = StatConfig::Format::xz;
            else if (value == "raw") cfg.format = StatConfig::Format::raw;
            else throw Error(ErrorKind::invalid_argument, "stat.format must be xz or raw");
        } else if (key == "stat.preset") {
            cfg.preset = number();
            if (cfg.preset > 9) throw Error(ErrorKind::invalid_argument, "stat.preset must be 0..9");
        } else if (key == "stat.dict_size") {
            cfg.dict_size = number();
            if (cfg.dict_size < LZMA_DICT_SIZE_MIN) throw Error(ErrorKind::invalid_argument, "stat.dict_size below 4096");
        } else if (key == "stat.check") {
            if (value == "none") cfg.check = LZMA_CHECK_NONE;
            else if (value == "crc32") cfg.check = LZMA_CHECK_CRC32;
            else if (value == "crc64") cfg.check = LZMA_CHECK_CRC64;
            else if (value == "sha256") cfg.check = LZMA_CHECK_SHA256;
            else throw Error(ErrorKind::invalid_argument, "stat.check must be none, crc32, crc64 or sha256");
        } else {
            throw Error(ErrorKind::invalid_argument, "unknown config key '" + key + "'");
        }
    }
}

namespace detail {

class LzmaStream {
public:
    LzmaStream() = default;
    LzmaStream(const LzmaStream&) = delete;
    LzmaStream& operator=(const LzmaStream&) = delete;
    ~LzmaStream() { lzma_end(&strm_); }

    lzma_stream* get() { return &strm_; }

    Bytes run(ByteView in) {
        Bytes out(in.size() + 128);
        strm_.next_in = in.data();
        strm_.avail_in = in.size();
        strm_.next_out = out.data();
        strm_.avail_out = out.size();
        for (;;) {
            auto rc = lzma_code(&strm_, LZMA_FINISH);
            if (rc == LZMA_STREAM_END) break;
            if (rc != LZMA_OK) {
                throw Error(ErrorKind::corrupt_stream, "LZMA error code " + std::to_string(rc));
            }
            if (strm_.avail_out == 0) {
                const auto used = out.size();
                out.resize(used * 2);
                strm_.next_out = out.data() + used;
                strm_.avail_out = out.size() - used;
            }
        }
        out.resize(strm_.total_out);
        return out;
    }

private:
    lzma_stream strm_ = LZMA_STREAM_INIT;
};

inline lzma_options_lzma lzma_options(const StatConfig& cfg) {
    lzma_options_lzma opt;
    if (lzma_lzma_preset(&opt, cfg.preset)) {
        throw Error(ErrorKind::invalid_argument, "unsupported LZMA preset " + std::to_string(cfg.preset));
    }
    opt.dict_size = cfg.dict_size;
    return opt;
}

} // namespace detail

inline Bytes stat_compress(ByteView apdu, const StatConfig& cfg = {}) {
    auto opt = detail::lzma_options(cfg);
    lzma_filter filters[] = {{LZMA_FILTER_LZMA2, &opt}, {LZMA_VLI_UNKNOWN, nullptr}};
    detail::LzmaStream s;
    auto rc = cfg.format == StatConfig::Format::xz ? lzma_stream_encoder(s.get(), filters, cfg.check)
                                                   : lzma_raw_encoder(s.get(), filters);
    if (rc != LZMA_OK) {
        throw Error(ErrorKind::invalid_argument, "cannot initialise LZMA encoder (code " + std::to_string(rc) + ")");
    }
    return s.run(apdu);
}

inline Bytes stat_decompress(ByteView data, const StatConfig& cfg = {}) {
    auto opt = detail::lzma_options(cfg);
    lzma_filter filters[] = {{LZMA_FILTER_LZMA2, &opt}, {LZMA_VLI_UNKNOWN, nullptr}};
    detail::LzmaStream s;
    auto rc = cfg.format == StatConfig::Format::xz ? lzma_stream_decoder(s.get(), UINT64_MAX, 0)
                                                   : lzma_raw_decoder(s.get(), filters);
    if (rc != LZMA_OK) {
        throw Error(ErrorKind::invalid_argument, "cannot initialise LZMA decoder (code " + std::to_string(rc) + ")");
    }
    return s.run(data);
}

} // namespace gdpc::baselines
