#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "bytes.hpp"

namespace gdpc::dlms {

inline constexpr std::size_t reading_size = 49;

// A-XDR type tags used by the load-profile data buffer.
inline constexpr std::uint8_t tag_structure = 0x02;
inline constexpr std::uint8_t tag_double_long = 0x05;
inline constexpr std::uint8_t tag_double_long_unsigned = 0x06;
inline constexpr std::uint8_t tag_octet_string = 0x09;
inline constexpr std::uint8_t tag_integer = 0x0F;
inline constexpr std::uint8_t tag_long = 0x10;
inline constexpr std::uint8_t tag_long_unsigned = 0x12;
inline constexpr std::uint8_t tag_null = 0x00;

inline constexpr std::uint8_t structure_fields = 8;
inline constexpr std::uint8_t datetime_size = 12;

// DLMS date-time. utc_offset_minutes is local time minus UTC.
struct Timestamp {
    std::uint16_t year = 2020;
    std::uint8_t month = 1;
    std::uint8_t day = 1;
    std::uint8_t weekday = 3; // 1 = Monday
    std::uint8_t hour = 0;
    std::uint8_t minute = 0;
    std::uint8_t second = 0;
    std::uint8_t hundredths = 0;
    std::int16_t utc_offset_minutes = 0;
    std::uint8_t clock_status = 0;

    bool operator==(const Timestamp&) const = default;
};

struct Reading {
    std::uint32_t log_id = 0;
    Timestamp timestamp;
    std::uint16_t log_status = 0;
    std::uint32_t data_quality = 0;
    std::uint32_t a14 = 0;
    std::uint32_t a23 = 0;
    std::uint32_t r12 = 0;
    std::uint32_t r34 = 0;

    bool operator==(const Reading&) const = default;
};

using EncodedReading = std::array<std::uint8_t, reading_size>;

// Byte offsets of each field's leading tag within an encoded reading.
namespace offset {
inline constexpr std::size_t structure = 0;
inline constexpr std::size_t log_id = 2;
inline constexpr std::size_t timestamp = 7;
inline constexpr std::size_t log_status = 21;
inline constexpr std::size_t data_quality = 24;
inline constexpr std::size_t a14 = 29;
inline constexpr std::size_t a23 = 34;
inline constexpr std::size_t r12 = 39;
inline constexpr std::size_t r34 = 44;
} // namespace offset

// ---------------------------------------------------------------------------
// calendar helpers

inline std::chrono::sys_seconds to_sys_seconds(const Timestamp& t) {
    using namespace std::chrono;
    auto date = year_month_day{year{t.year}, month{t.month}, day{t.day}};
    return sys_days{date} + hours{t.hour} + minutes{t.minute} + seconds{t.second};
}

// Builds a timestamp from a local wall-clock time; weekday is derived.
inline Timestamp make_timestamp(std::chrono::sys_seconds local, std::int16_t utc_offset_minutes = 0,
                                std::uint8_t clock_status = 0) {
    using namespace std::chrono;
    auto days = floor<std::chrono::days>(local);
    year_month_day ymd{days};
    hh_mm_ss hms{local - days};
    Timestamp t;
    t.year = static_cast<std::uint16_t>(static_cast<int>(ymd.year()));
    t.month = static_cast<std::uint8_t>(static_cast<unsigned>(ymd.month()));
    t.day = static_cast<std::uint8_t>(static_cast<unsigned>(ymd.day()));
    t.weekday = static_cast<std::uint8_t>(weekday{days}.iso_encoding());
    t.hour = static_cast<std::uint8_t>(hms.hours().count());
    t.minute = static_cast<std::uint8_t>(hms.minutes().count());
    t.second = static_cast<std::uint8_t>(hms.seconds().count());
    t.utc_offset_minutes = utc_offset_minutes;
    t.clock_status = clock_status;
    return t;
}

// Advances the wall-clock fields by `delta` minutes; sub-minute fields,
// offset and status carry over unchanged.
inline Timestamp advance(const Timestamp& t, std::int64_t delta_minutes) {
    auto next = make_timestamp(to_sys_seconds(t) + std::chrono::minutes{delta_minutes},
                               t.utc_offset_minutes, t.clock_status);
    next.hundredths = t.hundredths;
    return next;
}

inline void validate(const Timestamp& t) {
    if (t.month < 1 || t.month > 12) throw EncodingError("timestamp.month");
    if (t.day < 1 || t.day > 31) throw EncodingError("timestamp.day");
    if (t.weekday < 1 || t.weekday > 7) throw EncodingError("timestamp.weekday");
    if (t.hour > 23) throw EncodingError("timestamp.hour");
    if (t.minute > 59) throw EncodingError("timestamp.minute");
    if (t.second > 59) throw EncodingError("timestamp.second");
    if (t.hundredths > 99) throw EncodingError("timestamp.hundredths");
}

// ---------------------------------------------------------------------------
// field-level encoding, shared with the Null/Delta baselines

inline void put_timestamp(Bytes& out, const Timestamp& t) {
    out.push_back(tag_octet_string);
    out.push_back(datetime_size);
    put_be(out, t.year);
    out.push_back(t.month);
    out.push_back(t.day);
    out.push_back(t.weekday);
    out.push_back(t.hour);
    out.push_back(t.minute);
    out.push_back(t.second);
    out.push_back(t.hundredths);
    put_be(out, static_cast<std::uint16_t>(t.utc_offset_minutes));
    out.push_back(t.clock_status);
}

inline void put_u32(Bytes& out, std::uint32_t v) {
    out.push_back(tag_double_long_unsigned);
    put_be(out, v);
}

inline void put_u16(Bytes& out, std::uint16_t v) {
    out.push_back(tag_long_unsigned);
    put_be(out, v);
}

// Reads a tag and throws MalformedBufferError unless it equals `expected`.
inline void expect_tag(ByteView buf, std::size_t at, std::uint8_t expected) {
    if (at >= buf.size()) {
        throw MalformedBufferError(at, "buffer truncated");
    }
    if (buf[at] != expected) {
        throw MalformedBufferError(at, "expected tag " + to_hex(ByteView(&expected, 1)) + ", found " +
                                           to_hex(buf.subspan(at, 1)));
    }
}

inline Timestamp read_timestamp_body(ByteView b) {
    Timestamp t;
    t.year = static_cast<std::uint16_t>(get_be(b, 2));
    t.month = b[2];
    t.day = b[3];
    t.weekday = b[4];
    t.hour = b[5];
    t.minute = b[6];
    t.second = b[7];
    t.hundredths = b[8];
    t.utc_offset_minutes = static_cast<std::int16_t>(get_be(b.subspan(9), 2));
    t.clock_status = b[11];
    return t;
}

// ---------------------------------------------------------------------------
// readings

inline void append_reading(Bytes& out, const Reading& r) {
    validate(r.timestamp);
    out.push_back(tag_structure);
    out.push_back(structure_fields);
    put_u32(out, r.log_id);
    put_timestamp(out, r.timestamp);
    put_u16(out, r.log_status);
    put_u32(out, r.data_quality);
    put_u32(out, r.a14);
    put_u32(out, r.a23);
    put_u32(out, r.r12);
    put_u32(out, r.r34);
}

inline EncodedReading encode_reading(const Reading& r) {
    Bytes tmp;
    tmp.reserve(reading_size);
    append_reading(tmp, r);
    EncodedReading out{};
    std::memcpy(out.data(), tmp.data(), reading_size);
    return out;
}

// `base` shifts reported offsets when decoding inside a larger buffer.
inline Reading decode_reading(ByteView b, std::size_t base = 0) {
    if (b.size() != reading_size) {
        throw MalformedBufferError(base + std::min(b.size(), reading_size),
                                   "encoded reading must be 49 bytes, got " + std::to_string(b.size()));
    }
    auto check = [&](std::size_t at, std::uint8_t tag) {
        if (b[at] != tag) {
            throw MalformedBufferError(base + at, "expected tag " + to_hex(ByteView(&tag, 1)) +
                                                      ", found " + to_hex(b.subspan(at, 1)));
        }
    };
    auto u32_at = [&](std::size_t at) {
        check(at, tag_double_long_unsigned);
        return static_cast<std::uint32_t>(get_be(b.subspan(at + 1), 4));
    };

    check(offset::structure, tag_structure);
    check(offset::structure + 1, structure_fields);

    Reading r;
    r.log_id = u32_at(offset::log_id);
    check(offset::timestamp, tag_octet_string);
    check(offset::timestamp + 1, datetime_size);
    r.timestamp = read_timestamp_body(b.subspan(offset::timestamp + 2, datetime_size));
    check(offset::log_status, tag_long_unsigned);
    r.log_status = static_cast<std::uint16_t>(get_be(b.subspan(offset::log_status + 1), 2));
    r.data_quality = u32_at(offset::data_quality);
    r.a14 = u32_at(offset::a14);
    r.a23 = u32_at(offset::a23);
    r.r12 = u32_at(offset::r12);
    r.r34 = u32_at(offset::r34);
    return r;
}

// Concatenated encodings of a non-empty reading list.
inline Bytes encode_apdu(std::span<const Reading> readings) {
    if (readings.empty()) {
        throw Error(ErrorKind::invalid_argument, "cannot encode an APDU without readings");
    }
    Bytes out;
    out.reserve(readings.size() * reading_size);
    for (const auto& r : readings) {
        append_reading(out, r);
    }
    return out;
}

inline std::vector<Reading> decode_apdu(ByteView buf) {
    if (buf.size() % reading_size != 0) {
        throw MalformedBufferError(buf.size() - buf.size() % reading_size,
                                   "APDU length " + std::to_string(buf.size()) +
                                       " is not a multiple of 49");
    }
    std::vector<Reading> out;
    out.reserve(buf.size() / reading_size);
    for (std::size_t at = 0; at < buf.size(); at += reading_size) {
        out.push_back(decode_reading(buf.subspan(at, reading_size), at));
    }
    return out;
}

} // namespace gdpc::dlms
