#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <ranges>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>

#include "bitio.hpp"
#include "transform.hpp"

namespace gdpc {

// Unique bases of one byte length, in first-occurrence order.
class BasisTable {
public:
    explicit BasisTable(std::size_t length) : length_(length) {}

    std::size_t length() const noexcept { return length_; }
    std::size_t size() const noexcept { return count_; }

    ByteView at(std::size_t i) const { return ByteView(data_).subspan(i * length_, length_); }

    std::optional<std::uint32_t> find(ByteView basis) const {
        auto it = index_.find(std::string_view(as_chars(basis)));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    // Returns the position of `basis` and whether it was newly added.
    std::pair<std::uint32_t, bool> insert(ByteView basis) {
        auto [it, added] = index_.try_emplace(std::string(as_chars(basis)), static_cast<std::uint32_t>(count_));
        if (added) {
            data_.insert(data_.end(), basis.begin(), basis.end());
            ++count_;
        }
        return {it->second, added};
    }

    void truncate(std::size_t count) {
        while (count_ > count) {
            --count_;
            index_.erase(std::string(as_chars(at(count_))));
            data_.resize(count_ * length_);
        }
    }

    ByteView bytes() const noexcept { return data_; }

    bool operator==(const BasisTable& o) const { return length_ == o.length_ && data_ == o.data_; }

private:
    struct hash : std::hash<std::string_view> {
        using is_transparent = void;
    };

    std::size_t length_;
    std::size_t count_ = 0;
    Bytes data_;
    std::unordered_map<std::string, std::uint32_t, hash, std::equal_to<>> index_;
};

// Per-stream compressor (or decompressor mirror) state. Classes are keyed by
// basis byte length and created on first insertion.
class CompressorState {
public:
    explicit CompressorState(Pattern pattern) : pattern_(std::move(pattern)) {}

    const Pattern& pattern() const noexcept { return pattern_; }
    const std::map<std::size_t, BasisTable>& classes() const noexcept { return classes_; }

    BasisTable& table(std::size_t length) { return classes_.try_emplace(length, length).first->second; }

    std::size_t class_size(std::size_t length) const {
        auto it = classes_.find(length);
        return it == classes_.end() ? 0 : it->second.size();
    }

    std::size_t total_bases() const {
        std::size_t n = 0;
        for (const auto& [len, t] : classes_) n += t.size();
        return n;
    }

    // Not persisted; counts chunks seen by this process.
    std::uint64_t chunks_processed() const noexcept { return chunks_processed_; }
    void count_chunks(std::size_t n) noexcept { chunks_processed_ += n; }

    // Drops empty classes so states compare by content only.
    void prune_empty() {
        std::erase_if(classes_, [](const auto& kv) { return kv.second.size() == 0; });
    }

    // Empty classes do not count.
    bool operator==(const CompressorState& o) const {
        auto non_empty = [](const auto& kv) { return kv.second.size() != 0; };
        auto a = classes_ | std::views::filter(non_empty);
        auto b = o.classes_ | std::views::filter(non_empty);
        return pattern_ == o.pattern_ && std::ranges::equal(a, b);
    }

private:
    Pattern pattern_;
    std::map<std::size_t, BasisTable> classes_;
    std::uint64_t chunks_processed_ = 0;
};

// Basis lengths that carry a count in section A, ascending.
inline std::vector<std::size_t> wire_classes(const Pattern& p) {
    std::set<std::size_t> s;
    for (const auto& t : p.prefix) s.insert(t.basis_size());
    for (const auto& t : p.body) s.insert(t.basis_size());
    return {s.begin(), s.end()};
}

struct CompressedApdu {
    Bytes new_bases;             // section A
    Bytes reconstruction_list;   // section B, padded
    std::size_t reconstruction_bits = 0;
    Bytes deviations;            // section C

    std::size_t wire_size() const noexcept {
        return new_bases.size() + reconstruction_list.size() + deviations.size();
    }

    Bytes to_bytes() const {
        Bytes out;
        out.reserve(wire_size());
        out.insert(out.end(), new_bases.begin(), new_bases.end());
        out.insert(out.end(), reconstruction_list.begin(), reconstruction_list.end());
        out.insert(out.end(), deviations.begin(), deviations.end());
        return out;
    }
};

inline CompressedApdu compress_apdu(CompressorState& state, ByteView apdu) {
    const auto& pattern = state.pattern();
    const auto plan = plan_chunks(pattern, apdu.size());
    const auto classes = wire_classes(pattern);

    std::map<std::size_t, std::size_t> before;
    for (auto len : classes) before[len] = state.class_size(len);

    std::vector<std::uint32_t> indexes;
    indexes.reserve(plan.size());
    CompressedApdu out;
    Bytes basis(16);
    for (const auto& c : plan) {
        const auto& t = c.token;
        basis.resize(t.basis_size());
        const auto dev_at = out.deviations.size();
        out.deviations.resize(dev_at + t.deviation_size());
        split_into(t, apdu.data() + c.offset, basis.data(), out.deviations.data() + dev_at);
        indexes.push_back(state.table(t.basis_size()).insert(basis).first);
    }
    state.count_chunks(plan.size());

    for (auto len : classes) {
        const auto& table = state.table(len);
        const auto added = table.size() - before[len];
        if (added > 0xFFFF) {
            throw Error(ErrorKind::invalid_argument, "more than 65535 new bases of length " +
                                                         std::to_string(len) + " in one APDU");
        }
        put_be(out.new_bases, static_cast<std::uint16_t>(added));
        auto fresh = table.bytes().subspan(before[len] * len);
        out.new_bases.insert(out.new_bases.end(), fresh.begin(), fresh.end());
    }

    BitWriter bits;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        bits.write(indexes[i], index_width(state.class_size(plan[i].token.basis_size())));
    }
    out.reconstruction_bits = bits.bit_count();
    out.reconstruction_list = bits.finish();
    return out;
}

namespace detail {

// Size of sections B+C for `reps` body repetitions.
struct TailShape {
    std::size_t prefix_bits = 0, prefix_dev = 0, body_bits = 0, body_dev = 0;

    std::size_t size(std::size_t reps) const {
        return (prefix_bits + reps * body_bits + 7) / 8 + prefix_dev + reps * body_dev;
    }
};

} // namespace detail

// Reverses compress_apdu. The body repetition count is recovered from the
// payload length; pass `original_size` when a pattern makes that ambiguous
// (no body deviation bytes). On error the state is left unchanged.
inline Bytes decompress_apdu(CompressorState& state, ByteView payload,
                             std::optional<std::size_t> original_size = std::nullopt) {
    const auto& pattern = state.pattern();
    const auto classes = wire_classes(pattern);

    std::map<std::size_t, std::size_t> before;
    for (auto len : classes) before[len] = state.class_size(len);
    auto rollback = [&] {
        for (auto [len, n] : before) state.table(len).truncate(n);
        state.prune_empty();
    };

    try {
        ByteReader in(payload);
        for (auto len : classes) {
            const auto count = in.u16("new-basis count");
            auto& table = state.table(len);
            for (std::size_t i = 0; i < count; ++i) {
                if (!table.insert(in.take(len, "new basis")).second) {
                    throw Error(ErrorKind::corrupt_stream, "new basis of length " + std::to_string(len) +
                                                               " already present in state");
                }
            }
        }

        detail::TailShape shape;
        for (const auto& t : pattern.prefix) {
            shape.prefix_bits += index_width(state.class_size(t.basis_size()));
            shape.prefix_dev += t.deviation_size();
        }
        for (const auto& t : pattern.body) {
            shape.body_bits += index_width(state.class_size(t.basis_size()));
            shape.body_dev += t.deviation_size();
        }

        const std::size_t tail = in.remaining();
        std::size_t reps = 0;
        if (original_size) {
            (void)plan_chunks(pattern, *original_size);
            reps = (*original_size - pattern.prefix_size()) / pattern.stride();
            if (shape.size(reps) != tail) {
                throw Error(ErrorKind::corrupt_stream, "payload length does not match an APDU of " +
                                                           std::to_string(*original_size) + " bytes");
            }
        } else {
            // shape.size is non-decreasing in reps; find every reps that fits exactly.
            std::size_t lo = 1, hi = std::max<std::size_t>(1, tail * 8 + 1);
            while (lo < hi) {
                auto mid = lo + (hi - lo) / 2;
                if (shape.size(mid) < tail) lo = mid + 1; else hi = mid;
            }
            if (shape.size(lo) != tail) {
                throw Error(ErrorKind::corrupt_stream, "payload length " + std::to_string(payload.size()) +
                                                           " matches no whole number of pattern repetitions");
            }
            if (shape.size(lo + 1) == tail) {
                throw Error(ErrorKind::corrupt_stream,
                            "APDU length is ambiguous for this pattern; the original size is required");
            }
            reps = lo;
        }

        const std::size_t apdu_len = pattern.prefix_size() + reps * pattern.stride();
        const auto plan = plan_chunks(pattern, apdu_len);
        const std::size_t list_bytes = (shape.prefix_bits + reps * shape.body_bits + 7) / 8;
        BitReader bits(in.take(list_bytes, "reconstruction list"));
        auto devs = in.take(in.remaining(), "deviations");

        Bytes out(apdu_len);
        std::size_t dev_at = 0;
        for (const auto& c : plan) {
            const auto& t = c.token;
            const auto& table = state.table(t.basis_size());
            const auto idx = bits.read(index_width(table.size()));
            if (idx >= table.size()) {
                throw Error(ErrorKind::corrupt_stream, "basis index " + std::to_string(idx) +
                                                           " out of range for class of " +
                                                           std::to_string(table.size()) + " bases of length " +
                                                           std::to_string(t.basis_size()));
            }
            merge_into(t, table.at(idx).data(), devs.data() + dev_at, out.data() + c.offset);
            dev_at += t.deviation_size();
        }
        state.count_chunks(plan.size());
        return out;
    } catch (...) {
        rollback();
        throw;
    }
}

} // namespace gdpc
