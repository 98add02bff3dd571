#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace gdpc {

// One transform step of a pattern. LastByte(n, k) splits an (n+k)-byte chunk
// into an n-byte basis and a k-byte deviation; Hamming(p) runs a Hamming
// code with p parity bits over a 2^(p-3)-byte chunk.
struct Token {
    enum class Kind : std::uint8_t { last_byte, hamming };

    Kind kind = Kind::last_byte;
    std::size_t n = 1; // LastByte basis bytes, or Hamming parity bits
    std::size_t k = 0; // LastByte deviation bytes

    static Token last_byte(std::size_t n, std::size_t k) { return {Kind::last_byte, n, k}; }
    static Token hamming(std::size_t p) { return {Kind::hamming, p, 0}; }

    std::size_t chunk_size() const noexcept {
        return kind == Kind::last_byte ? n + k : std::size_t{1} << (n - 3);
    }

    // Hamming bases hold 2^p - p - 1 data bits plus the trailing spare bit.
    std::size_t basis_size() const noexcept {
        return kind == Kind::last_byte ? n : ((std::size_t{1} << n) - n + 7) / 8;
    }

    std::size_t deviation_size() const noexcept { return kind == Kind::last_byte ? k : 1; }

    bool operator==(const Token&) const = default;
};

inline constexpr std::size_t max_lastbyte_param = 65535;

struct Pattern {
    std::vector<Token> prefix;
    std::vector<Token> body;

    std::size_t prefix_size() const noexcept {
        std::size_t s = 0;
        for (const auto& t : prefix) s += t.chunk_size();
        return s;
    }

    std::size_t stride() const noexcept {
        std::size_t s = 0;
        for (const auto& t : body) s += t.chunk_size();
        return s;
    }

    bool operator==(const Pattern&) const = default;
};

inline std::string render(const Token& t) {
    if (t.kind == Token::Kind::hamming) {
        return "H" + std::to_string(t.n);
    }
    if (t.n < 10 && t.k < 10) {
        return "L" + std::to_string(t.n) + std::to_string(t.k);
    }
    return "L" + std::to_string(t.n) + "," + std::to_string(t.k);
}

// Canonical form: prefix tokens, then the bracketed body, single spaces.
inline std::string render(const Pattern& p) {
    std::string s;
    for (const auto& t : p.prefix) {
        s += render(t);
        s += ' ';
    }
    s += '[';
    for (std::size_t i = 0; i < p.body.size(); ++i) {
        if (i) s += ' ';
        s += render(p.body[i]);
    }
    s += ']';
    return s;
}

namespace detail {

inline std::size_t parse_count(std::string_view digits, std::string_view token) {
    if (digits.empty() || digits.size() > 5) {
        throw Error(ErrorKind::pattern_syntax, "bad number in token '" + std::string(token) + "'");
    }
    std::size_t v = 0;
    for (char c : digits) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw Error(ErrorKind::pattern_syntax, "bad number in token '" + std::string(token) + "'");
        }
        v = v * 10 + static_cast<std::size_t>(c - '0');
    }
    return v;
}

inline Token parse_token(std::string_view tok) {
    const char letter = tok.front();
    std::string_view rest = tok.substr(1);
    if (letter == 'H') {
        auto p = parse_count(rest, tok);
        if (p < 4 || p > 7) {
            throw Error(ErrorKind::unsupported_parameter,
                        "Hamming parity bits must be in [4,7], got '" + std::string(tok) + "'");
        }
        return Token::hamming(p);
    }
    if (letter == 'L') {
        std::size_t n = 0, k = 0;
        if (auto comma = rest.find(','); comma != std::string_view::npos) {
            n = parse_count(rest.substr(0, comma), tok);
            k = parse_count(rest.substr(comma + 1), tok);
        } else if (rest.size() == 2) {
            n = parse_count(rest.substr(0, 1), tok);
            k = parse_count(rest.substr(1, 1), tok);
        } else if (rest.size() > 2) {
            throw Error(ErrorKind::pattern_ambiguous,
                        "token '" + std::string(tok) + "' is ambiguous; write L<n>,<k>");
        } else {
            throw Error(ErrorKind::pattern_syntax, "LastByte token '" + std::string(tok) + "' needs n and k");
        }
        if (n < 1) {
            throw Error(ErrorKind::unsupported_parameter, "LastByte basis must be at least 1 byte in '" +
                                                              std::string(tok) + "'");
        }
        if (n > max_lastbyte_param || k > max_lastbyte_param) {
            throw Error(ErrorKind::unsupported_parameter, "LastByte parameter too large in '" +
                                                              std::string(tok) + "'");
        }
        return Token::last_byte(n, k);
    }
    throw Error(ErrorKind::pattern_syntax, "unknown transform '" + std::string(1, letter) + "' in token '" +
                                               std::string(tok) + "'");
}

} // namespace detail

// Grammar: token* '[' token+ ']' with tokens H<p>, L<n>,<k> or L<n><k>.
inline Pattern parse_pattern(std::string_view s) {
    Pattern p;
    enum class Where { prefix, body, done } where = Where::prefix;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (where == Where::done) {
            throw Error(ErrorKind::pattern_syntax, "unexpected text after ']' in pattern '" + std::string(s) + "'");
        }
        if (c == '[') {
            if (where != Where::prefix) {
                throw Error(ErrorKind::pattern_syntax, "nested '[' in pattern '" + std::string(s) + "'");
            }
            where = Where::body;
            ++i;
            continue;
        }
        if (c == ']') {
            if (where != Where::body) {
                throw Error(ErrorKind::pattern_syntax, "unmatched ']' in pattern '" + std::string(s) + "'");
            }
            if (p.body.empty()) {
                throw Error(ErrorKind::pattern_syntax, "empty pattern body in '" + std::string(s) + "'");
            }
            where = Where::done;
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '[' && s[j] != ']') {
            ++j;
        }
        auto tok = detail::parse_token(s.substr(i, j - i));
        (where == Where::prefix ? p.prefix : p.body).push_back(tok);
        i = j;
    }
    if (where == Where::prefix) {
        throw Error(ErrorKind::pattern_syntax, "pattern '" + std::string(s) + "' has no bracketed body");
    }
    if (where == Where::body) {
        throw Error(ErrorKind::pattern_syntax, "missing ']' in pattern '" + std::string(s) + "'");
    }
    return p;
}

struct PlannedChunk {
    std::size_t offset;
    Token token;

    bool operator==(const PlannedChunk&) const = default;
};

using ChunkPlan = std::vector<PlannedChunk>;

// Lays the pattern over a buffer: prefix once (if requested), then whole
// body repetitions. The chunks must tile the buffer exactly.
inline ChunkPlan plan_chunks(const Pattern& p, std::size_t buffer_len, bool include_prefix = true) {
    const std::size_t stride = p.stride();
    const std::size_t head = include_prefix ? p.prefix_size() : 0;
    if (buffer_len < head) {
        throw CoverageError(stride, buffer_len, "buffer of " + std::to_string(buffer_len) +
                                                    " bytes is shorter than the " + std::to_string(head) +
                                                    "-byte pattern prefix");
    }
    const std::size_t rest = buffer_len - head;
    if (stride == 0 || rest == 0 || rest % stride != 0) {
        throw CoverageError(stride, stride ? rest % stride : rest,
                            "pattern stride " + std::to_string(stride) + " leaves remainder " +
                                std::to_string(stride ? rest % stride : rest) + " over " +
                                std::to_string(rest) + " bytes");
    }
    ChunkPlan plan;
    plan.reserve((include_prefix ? p.prefix.size() : 0) + rest / stride * p.body.size());
    std::size_t at = 0;
    if (include_prefix) {
        for (const auto& t : p.prefix) {
            plan.push_back({at, t});
            at += t.chunk_size();
        }
    }
    while (at < buffer_len) {
        for (const auto& t : p.body) {
            plan.push_back({at, t});
            at += t.chunk_size();
        }
    }
    return plan;
}

} // namespace gdpc
