#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace gdpc {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

template <typename T>
inline void put_be(Bytes& out, T value, std::size_t width = sizeof(T)) {
    for (std::size_t i = width; i-- > 0;) {
        out.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(value) >> (8 * i)));
    }
}

inline std::uint64_t get_be(ByteView in, std::size_t width) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) {
        v = (v << 8) | in[i];
    }
    return v;
}

inline std::string_view as_chars(ByteView b) {
    return {reinterpret_cast<const char*>(b.data()), b.size()};
}

inline std::string to_hex(ByteView b) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(b.size() * 2);
    for (auto c : b) {
        s.push_back(digits[c >> 4]);
        s.push_back(digits[c & 0xF]);
    }
    return s;
}

// Sequential big-endian reader over a byte span; every underrun throws
// with the given error kind so callers can tell format from stream errors.
class ByteReader {
public:
    explicit ByteReader(ByteView data, ErrorKind on_underrun = ErrorKind::corrupt_stream)
        : data_(data), on_underrun_(on_underrun) {}

    std::size_t position() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return data_.size() - pos_; }
    bool empty() const noexcept { return pos_ == data_.size(); }

    ByteView take(std::size_t n, const char* what) {
        if (remaining() < n) {
            throw Error(on_underrun_, std::string("truncated ") + what + " at offset " +
                                          std::to_string(pos_) + " (need " + std::to_string(n) +
                                          " bytes, have " + std::to_string(remaining()) + ")");
        }
        auto v = data_.subspan(pos_, n);
        pos_ += n;
        return v;
    }

    std::uint64_t be(std::size_t width, const char* what) { return get_be(take(width, what), width); }
    std::uint8_t u8(const char* what) { return static_cast<std::uint8_t>(be(1, what)); }
    std::uint16_t u16(const char* what) { return static_cast<std::uint16_t>(be(2, what)); }
    std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(be(4, what)); }

private:
    ByteView data_;
    std::size_t pos_ = 0;
    ErrorKind on_underrun_;
};

} // namespace gdpc
