#pragma once

#include <cstdint>

#include "bytes.hpp"

namespace gdpc {

// MSB-first bit packing; the final partial byte is zero-padded.
class BitWriter {
public:
    void write(std::uint32_t value, unsigned nbits) {
        for (unsigned i = nbits; i-- > 0;) {
            acc_ = static_cast<std::uint8_t>((acc_ << 1) | ((value >> i) & 1u));
            if (++fill_ == 8) {
                out_.push_back(acc_);
                acc_ = 0;
                fill_ = 0;
            }
        }
        bits_ += nbits;
    }

    std::size_t bit_count() const noexcept { return bits_; }

    Bytes finish() {
        if (fill_ > 0) {
            out_.push_back(static_cast<std::uint8_t>(acc_ << (8 - fill_)));
            acc_ = 0;
            fill_ = 0;
        }
        return std::move(out_);
    }

private:
    Bytes out_;
    std::uint8_t acc_ = 0;
    unsigned fill_ = 0;
    std::size_t bits_ = 0;
};

class BitReader {
public:
    explicit BitReader(ByteView data) : data_(data) {}

    std::uint32_t read(unsigned nbits) {
        if (pos_ + nbits > data_.size() * 8) {
            throw Error(ErrorKind::corrupt_stream, "reconstruction list truncated at bit " +
                                                       std::to_string(pos_));
        }
        std::uint32_t v = 0;
        for (unsigned i = 0; i < nbits; ++i, ++pos_) {
            v = (v << 1) | ((data_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1u);
        }
        return v;
    }

    std::size_t position() const noexcept { return pos_; }

private:
    ByteView data_;
    std::size_t pos_ = 0;
};

// Bits needed to address one of `count` entries; never below one.
constexpr unsigned index_width(std::size_t count) noexcept {
    unsigned w = 1;
    while (w < 32 && (std::size_t{1} << w) < count) {
        ++w;
    }
    return w;
}

} // namespace gdpc
