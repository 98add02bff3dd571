#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <type_traits>

#include "bytes.hpp"
#include "pattern.hpp"

namespace gdpc {

struct BasisDeviationPair {
    Bytes basis;
    Bytes deviation;

    bool operator==(const BasisDeviationPair&) const = default;
};

// ---------------------------------------------------------------------------
// LastByte: first n bytes are the basis, the trailing k bytes the deviation.

inline BasisDeviationPair lastbyte_split(ByteView chunk, std::size_t n, std::size_t k) {
    if (chunk.size() != n + k) {
        throw Error(ErrorKind::length_mismatch, "LastByte(" + std::to_string(n) + "," + std::to_string(k) +
                                                    ") expects a " + std::to_string(n + k) +
                                                    "-byte chunk, got " + std::to_string(chunk.size()));
    }
    return {Bytes(chunk.begin(), chunk.begin() + static_cast<std::ptrdiff_t>(n)),
            Bytes(chunk.begin() + static_cast<std::ptrdiff_t>(n), chunk.end())};
}

inline Bytes lastbyte_merge(const BasisDeviationPair& pair) {
    Bytes out = pair.basis;
    out.insert(out.end(), pair.deviation.begin(), pair.deviation.end());
    return out;
}

// ---------------------------------------------------------------------------
// Hamming: the first 2^p - 1 bits of the chunk are decoded as a
// Hamming(2^p - 1, 2^p - 1 - p) word (parity at power-of-two positions,
// 1-indexed, MSB first). The basis is the corrected codeword's data bits
// followed by the chunk's last (spare) bit; the deviation byte is the
// flipped position, 0 for a valid codeword.

__extension__ using uint128 = unsigned __int128;

template <unsigned P>
struct Hamming {
    static_assert(P >= 4 && P <= 7);

    using word = std::conditional_t<(P <= 6), std::uint64_t, uint128>;

    static constexpr unsigned chunk_bits = 1u << P;
    static constexpr unsigned basis_bits = chunk_bits - P;
    static constexpr std::size_t chunk_bytes = chunk_bits / 8;
    static constexpr std::size_t basis_bytes = (basis_bits + 7) / 8;
    static constexpr unsigned basis_pad = static_cast<unsigned>(basis_bytes * 8 - basis_bits);

    static constexpr word bit(unsigned position) { return word{1} << (chunk_bits - position); }

    static constexpr std::array<word, P> make_parity_masks() {
        std::array<word, P> m{};
        for (unsigned i = 1; i < chunk_bits; ++i) {
            for (unsigned r = 0; r < P; ++r) {
                if ((i >> r) & 1u) m[r] |= bit(i);
            }
        }
        return m;
    }

    static constexpr std::array<word, P> parity_masks = make_parity_masks();

    static constexpr word low_mask(unsigned n) { return n == 0 ? word{0} : (~word{0} >> (sizeof(word) * 8 - n)); }

    static unsigned parity(word x) {
        if constexpr (sizeof(word) == 8) {
            return static_cast<unsigned>(std::popcount(x)) & 1u;
        } else {
            return static_cast<unsigned>(std::popcount(static_cast<std::uint64_t>(x)) ^
                                         std::popcount(static_cast<std::uint64_t>(x >> 64))) &
                   1u;
        }
    }

    static unsigned syndrome_bits(word x) {
        unsigned s = 0;
        for (unsigned r = 0; r < P; ++r) s |= parity(x & parity_masks[r]) << r;
        return s;
    }

    // Data bits in order followed by the spare bit; parity positions dropped.
    static word extract_bits(word x) {
        word data = 0;
        for (unsigned r = 1; r < P; ++r) {
            const unsigned len = (1u << r) - 1;
            const unsigned last = (1u << (r + 1)) - 1;
            data = (data << len) | ((x >> (chunk_bits - last)) & low_mask(len));
        }
        return (data << 1) | (x & 1u);
    }

    static word encode_bits(word basis) {
        const word spare = basis & 1u;
        word data = basis >> 1;
        word x = 0;
        for (unsigned r = P - 1; r >= 1; --r) {
            const unsigned len = (1u << r) - 1;
            const unsigned last = (1u << (r + 1)) - 1;
            x |= (data & low_mask(len)) << (chunk_bits - last);
            data >>= len;
        }
        for (unsigned r = 0; r < P; ++r) {
            if (parity(x & parity_masks[r])) x |= bit(1u << r);
        }
        return x | spare;
    }

    // Syndrome, extraction and encoding are GF(2)-linear, so each is the XOR
    // of per-byte contributions. A split entry holds the extracted bits with
    // the syndrome above them (basis_bits + P <= word width).
    struct Tables {
        std::array<std::array<word, 256>, chunk_bytes> split{};
        std::array<word, chunk_bits> correction{}; // extracted bits of the flipped position
        std::array<std::array<word, 256>, basis_bytes> encode{};

        Tables() {
            for (unsigned v = 0; v < 256; ++v) {
                for (std::size_t i = 0; i < chunk_bytes; ++i) {
                    const word x = word{v} << (8 * (chunk_bytes - 1 - i));
                    split[i][v] = extract_bits(x) | (word{syndrome_bits(x)} << basis_bits);
                }
                for (std::size_t i = 0; i < basis_bytes; ++i) {
                    const word padded = word{v} << (8 * (basis_bytes - 1 - i));
                    encode[i][v] = encode_bits(padded >> basis_pad);
                }
            }
            for (unsigned pos = 1; pos < chunk_bits; ++pos) correction[pos] = extract_bits(bit(pos));
        }
    };

    static_assert(basis_bits + P <= sizeof(word) * 8);

    static const Tables& tables() {
        static const Tables t;
        return t;
    }

    static std::uint8_t byte_at(word x, std::size_t i, std::size_t n) {
        return static_cast<std::uint8_t>(x >> (8 * (n - 1 - i)));
    }

    static word accumulate(const Tables& t, word x) {
        word acc = 0;
        for (std::size_t i = 0; i < chunk_bytes; ++i) acc ^= t.split[i][byte_at(x, i, chunk_bytes)];
        return acc;
    }

    static unsigned syndrome(word x) { return static_cast<unsigned>(accumulate(tables(), x) >> basis_bits); }

    // Returns the unpadded basis value (basis_bits wide) and the deviation.
    static std::pair<word, std::uint8_t> split(word x) {
        const auto& t = tables();
        const word acc = accumulate(t, x);
        const auto s = static_cast<unsigned>(acc >> basis_bits);
        return {(acc & low_mask(basis_bits)) ^ t.correction[s], static_cast<std::uint8_t>(s)};
    }

    static word merge(word basis, std::uint8_t deviation) {
        if (deviation >= chunk_bits) {
            throw Error(ErrorKind::corrupt_stream, "Hamming deviation " + std::to_string(deviation) +
                                                       " out of range for H" + std::to_string(P));
        }
        const auto& t = tables();
        const word padded = basis << basis_pad;
        word x = 0;
        for (std::size_t i = 0; i < basis_bytes; ++i) x ^= t.encode[i][byte_at(padded, i, basis_bytes)];
        if (deviation != 0) x ^= bit(deviation);
        return x;
    }

    static word load(const std::uint8_t* p, std::size_t n) {
        word v = 0;
        for (std::size_t i = 0; i < n; ++i) v = (v << 8) | p[i];
        return v;
    }

    static void store(word v, std::uint8_t* p, std::size_t n) {
        for (std::size_t i = n; i-- > 0;) {
            p[i] = static_cast<std::uint8_t>(v);
            v >>= 8;
        }
    }

    static std::uint8_t split_into(const std::uint8_t* chunk, std::uint8_t* basis) {
        auto [b, dev] = split(load(chunk, chunk_bytes));
        store(b << basis_pad, basis, basis_bytes);
        return dev;
    }

    static void merge_into(const std::uint8_t* basis, std::uint8_t deviation, std::uint8_t* chunk) {
        store(merge(load(basis, basis_bytes) >> basis_pad, deviation), chunk, chunk_bytes);
    }
};

namespace detail {

template <typename F>
decltype(auto) with_hamming(std::size_t p, F&& f) {
    switch (p) {
    case 4: return f(Hamming<4>{});
    case 5: return f(Hamming<5>{});
    case 6: return f(Hamming<6>{});
    case 7: return f(Hamming<7>{});
    default:
        throw Error(ErrorKind::unsupported_parameter,
                    "Hamming parity bits must be in [4,7], got " + std::to_string(p));
    }
}

} // namespace detail

inline BasisDeviationPair hamming_split(ByteView chunk, std::size_t p) {
    return detail::with_hamming(p, [&]<typename H>(H) {
        if (chunk.size() != H::chunk_bytes) {
            throw Error(ErrorKind::length_mismatch, "H" + std::to_string(p) + " expects a " +
                                                        std::to_string(H::chunk_bytes) + "-byte chunk, got " +
                                                        std::to_string(chunk.size()));
        }
        BasisDeviationPair out{Bytes(H::basis_bytes), Bytes(1)};
        out.deviation[0] = H::split_into(chunk.data(), out.basis.data());
        return out;
    });
}

inline Bytes hamming_merge(const BasisDeviationPair& pair, std::size_t p) {
    return detail::with_hamming(p, [&]<typename H>(H) {
        if (pair.basis.size() != H::basis_bytes || pair.deviation.size() != 1) {
            throw Error(ErrorKind::corrupt_stream, "H" + std::to_string(p) + " pair has wrong shape");
        }
        Bytes out(H::chunk_bytes);
        H::merge_into(pair.basis.data(), pair.deviation[0], out.data());
        return out;
    });
}

// ---------------------------------------------------------------------------
// Token dispatch without allocation. Buffers must be sized per the token.

inline void split_into(const Token& t, const std::uint8_t* chunk, std::uint8_t* basis, std::uint8_t* deviation) {
    if (t.kind == Token::Kind::last_byte) {
        std::memcpy(basis, chunk, t.n);
        if (t.k) std::memcpy(deviation, chunk + t.n, t.k);
        return;
    }
    detail::with_hamming(t.n, [&]<typename H>(H) { *deviation = H::split_into(chunk, basis); });
}

inline void merge_into(const Token& t, const std::uint8_t* basis, const std::uint8_t* deviation, std::uint8_t* chunk) {
    if (t.kind == Token::Kind::last_byte) {
        std::memcpy(chunk, basis, t.n);
        if (t.k) std::memcpy(chunk + t.n, deviation, t.k);
        return;
    }
    detail::with_hamming(t.n, [&]<typename H>(H) { H::merge_into(basis, *deviation, chunk); });
}

inline BasisDeviationPair split(const Token& t, ByteView chunk) {
    if (t.kind == Token::Kind::last_byte) return lastbyte_split(chunk, t.n, t.k);
    return hamming_split(chunk, t.n);
}

inline Bytes merge(const Token& t, const BasisDeviationPair& pair) {
    if (t.kind == Token::Kind::last_byte) {
        if (pair.basis.size() != t.n || pair.deviation.size() != t.k) {
            throw Error(ErrorKind::corrupt_stream, "pair shape does not match " + render(t));
        }
        return lastbyte_merge(pair);
    }
    return hamming_merge(pair, t.n);
}

} // namespace gdpc
