#pragma once

#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dlms.hpp"

namespace gdpc::csv {

inline constexpr std::string_view header = "log_id,timestamp_iso8601,log_status,data_quality,a14,a23,r12,r34";

// ISO 8601 with hundredths and the UTC offset, e.g. 2020-01-01T00:15:00.00+01:00.
// The clock-status byte is not representable and reads back as 0.
inline std::string format_iso8601(const dlms::Timestamp& t) {
    int off = t.utc_offset_minutes;
    char sign = off < 0 ? '-' : '+';
    off = off < 0 ? -off : off;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04u-%02u-%02uT%02u:%02u:%02u.%02u%c%02d:%02d", unsigned{t.year},
                  unsigned{t.month}, unsigned{t.day}, unsigned{t.hour}, unsigned{t.minute},
                  unsigned{t.second}, unsigned{t.hundredths}, sign, off / 60, off % 60);
    return buf;
}

inline dlms::Timestamp parse_iso8601(std::string_view s) {
    auto fail = [&] { return Error(ErrorKind::format, "bad ISO 8601 timestamp '" + std::string(s) + "'"); };
    unsigned y, mo, d, h, mi, se, hs = 0;
    char sign = '+';
    int oh = 0, om = 0;
    std::string str(s);
    int consumed = 0;
    if (std::sscanf(str.c_str(), "%4u-%2u-%2uT%2u:%2u:%2u%n", &y, &mo, &d, &h, &mi, &se, &consumed) != 6) {
        throw fail();
    }
    std::string_view rest = s.substr(static_cast<std::size_t>(consumed));
    if (!rest.empty() && rest.front() == '.') {
        if (rest.size() < 3 || !std::isdigit(static_cast<unsigned char>(rest[1])) ||
            !std::isdigit(static_cast<unsigned char>(rest[2]))) {
            throw fail();
        }
        hs = static_cast<unsigned>((rest[1] - '0') * 10 + (rest[2] - '0'));
        rest.remove_prefix(3);
    }
    if (rest == "Z") {
        rest = {};
    } else if (!rest.empty()) {
        std::string tail(rest);
        int n = 0;
        if (std::sscanf(tail.c_str(), "%c%2d:%2d%n", &sign, &oh, &om, &n) != 3 ||
            static_cast<std::size_t>(n) != tail.size() || (sign != '+' && sign != '-')) {
            throw fail();
        }
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 59) {
        throw fail();
    }
    using namespace std::chrono;
    year_month_day ymd{year{static_cast<int>(y)}, month{mo}, day{d}};
    if (!ymd.ok()) {
        throw fail();
    }
    int offset = (sign == '-' ? -1 : 1) * (oh * 60 + om);
    auto local = sys_days{ymd} + hours{h} + minutes{mi} + seconds{se};
    auto t = dlms::make_timestamp(local, static_cast<std::int16_t>(offset));
    t.hundredths = static_cast<std::uint8_t>(hs);
    return t;
}

namespace detail {

template <typename T>
T parse_uint(std::string_view field, const char* name) {
    int base = 10;
    if (field.size() > 2 && field[0] == '0' && (field[1] == 'x' || field[1] == 'X')) {
        field.remove_prefix(2);
        base = 16;
    }
    T v{};
    auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v, base);
    if (ec != std::errc{} || p != field.data() + field.size()) {
        throw Error(ErrorKind::format, std::string("bad value for ") + name + ": '" + std::string(field) + "'");
    }
    return v;
}

} // namespace detail

inline void write_readings(std::ostream& os, std::span<const dlms::Reading> readings) {
    os << header << '\n';
    for (const auto& r : readings) {
        os << r.log_id << ',' << format_iso8601(r.timestamp) << ',' << r.log_status << ','
           << r.data_quality << ',' << r.a14 << ',' << r.a23 << ',' << r.r12 << ',' << r.r34 << '\n';
    }
}

inline std::vector<dlms::Reading> read_readings(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) {
        throw Error(ErrorKind::format, "empty CSV input");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) {
        throw Error(ErrorKind::format, "unexpected CSV header '" + line + "'");
    }
    std::vector<dlms::Reading> out;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string_view> f;
        std::string_view rest = line;
        for (;;) {
            auto comma = rest.find(',');
            f.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (f.size() != 8) {
            throw Error(ErrorKind::format, "line " + std::to_string(lineno) + ": expected 8 columns, got " +
                                               std::to_string(f.size()));
        }
        try {
            dlms::Reading r;
            r.log_id = detail::parse_uint<std::uint32_t>(f[0], "log_id");
            r.timestamp = parse_iso8601(f[1]);
            r.log_status = detail::parse_uint<std::uint16_t>(f[2], "log_status");
            r.data_quality = detail::parse_uint<std::uint32_t>(f[3], "data_quality");
            r.a14 = detail::parse_uint<std::uint32_t>(f[4], "a14");
            r.a23 = detail::parse_uint<std::uint32_t>(f[5], "a23");
            r.r12 = detail::parse_uint<std::uint32_t>(f[6], "r12");
            r.r34 = detail::parse_uint<std::uint32_t>(f[7], "r34");
            out.push_back(r);
        } catch (const Error& e) {
            throw Error(ErrorKind::format, "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

} // namespace gdpc::csv
