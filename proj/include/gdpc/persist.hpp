#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "stream.hpp"

namespace gdpc {

inline constexpr std::string_view state_magic = "GDPS";
inline constexpr std::string_view container_magic = "GDPC";
inline constexpr std::uint8_t format_version = 1;

namespace detail {

inline void put_header(Bytes& out, std::string_view magic, const Pattern& p) {
    out.insert(out.end(), magic.begin(), magic.end());
    out.push_back(format_version);
    const auto text = render(p);
    put_be(out, static_cast<std::uint16_t>(text.size()));
    out.insert(out.end(), text.begin(), text.end());
}

inline Pattern read_header(ByteReader& in, std::string_view magic, const char* what) {
    if (as_chars(in.take(magic.size(), "magic")) != magic) {
        throw Error(ErrorKind::format, std::string("not a ") + what + " (bad magic)");
    }
    if (auto v = in.u8("version"); v != format_version) {
        throw Error(ErrorKind::format, std::string("unsupported ") + what + " version " + std::to_string(v));
    }
    const auto len = in.u16("pattern length");
    return parse_pattern(as_chars(in.take(len, "pattern")));
}

} // namespace detail

// GDPS | version | u16 pattern length | pattern | u8 classes |
//   per class: u16 basis length | u32 count | count * length bytes
inline Bytes save_state(const CompressorState& state) {
    Bytes out;
    detail::put_header(out, state_magic, state.pattern());
    std::size_t n = 0;
    for (const auto& [len, t] : state.classes()) n += t.size() > 0;
    out.push_back(static_cast<std::uint8_t>(n));
    for (const auto& [len, t] : state.classes()) {
        if (t.size() == 0) continue;
        put_be(out, static_cast<std::uint16_t>(len));
        put_be(out, static_cast<std::uint32_t>(t.size()));
        auto b = t.bytes();
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

inline CompressorState load_state(ByteView bytes) {
    ByteReader in(bytes, ErrorKind::format);
    CompressorState state(detail::read_header(in, state_magic, "state file"));
    const auto n = in.u8("class count");
    std::size_t prev = 0;
    for (std::size_t c = 0; c < n; ++c) {
        const auto len = in.u16("basis length");
        const auto count = in.u32("basis count");
        if (len == 0 || len <= prev) {
            throw Error(ErrorKind::format, "state classes must have ascending non-zero lengths");
        }
        prev = len;
        auto& table = state.table(len);
        for (std::uint32_t i = 0; i < count; ++i) {
            if (!table.insert(in.take(len, "basis")).second) {
                throw Error(ErrorKind::format, "duplicate basis in state class of length " + std::to_string(len));
            }
        }
    }
    if (!in.empty()) {
        throw Error(ErrorKind::format, "trailing bytes after state data");
    }
    state.prune_empty();
    return state;
}

// Serialized size of the state: 8 header bytes plus the pattern text, then
// 6 bytes per non-empty class plus its bases.
inline std::size_t state_size_bytes(const CompressorState& state) {
    std::size_t size = state_magic.size() + 1 + 2 + render(state.pattern()).size() + 1;
    for (const auto& [len, t] : state.classes()) {
        if (t.size()) size += 2 + 4 + t.size() * len;
    }
    return size;
}

// GDPC | version | u16 pattern length | pattern, then frames of u32 length + payload.
inline Bytes container_header(const Pattern& p) {
    Bytes out;
    detail::put_header(out, container_magic, p);
    return out;
}

inline void append_frame(Bytes& out, ByteView payload) {
    put_be(out, static_cast<std::uint32_t>(payload.size()));
    out.insert(out.end(), payload.begin(), payload.end());
}

struct Container {
    Pattern pattern;
    std::vector<Bytes> frames;
};

inline Container parse_container(ByteView bytes) {
    ByteReader in(bytes, ErrorKind::format);
    Container c{detail::read_header(in, container_magic, "container"), {}};
    while (!in.empty()) {
        const auto index = c.frames.size();
        try {
            const auto len = in.u32("frame length");
            auto payload = in.take(len, "frame payload");
            c.frames.emplace_back(payload.begin(), payload.end());
        } catch (const Error& e) {
            throw Error(ErrorKind::format, "frame " + std::to_string(index) + ": " + e.what());
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// file helpers

inline Bytes read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
    return Bytes(std::istreambuf_iterator<char>(f), {});
}

// Writes to a sibling temp file and renames it over the target.
inline void write_file_atomic(const std::filesystem::path& path, ByteView data) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorKind::io, "cannot write '" + tmp.string() + "'");
        f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
        f.flush();
        if (!f) throw Error(ErrorKind::io, "write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorKind::io, "cannot replace '" + path.string() + "'");
    }
}

} // namespace gdpc
