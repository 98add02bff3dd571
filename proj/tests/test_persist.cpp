#include <gtest/gtest.h>

#include <filesystem>

#include "test_support.hpp"

using namespace gdpc;

namespace {

CompressorState random_state(std::mt19937_64& rng) {
    const auto& reg = bench::registry();
    CompressorState s(parse_pattern(reg[rng() % reg.size()].pattern));
    auto rs = test::random_stream(rng, 1 + rng() % 300);
    for (const auto& r : rs) compress_apdu(s, dlms::encode_reading(r));
    return s;
}

} // namespace

TEST(Persist, EmptyStateIsHeaderOnly) {
    CompressorState s(parse_pattern("[L41 L32]"));
    auto bytes = save_state(s);
    Bytes expected{'G', 'D', 'P', 'S', 1, 0, 9};
    for (char c : std::string_view("[L41 L32]")) expected.push_back(static_cast<std::uint8_t>(c));
    expected.push_back(0);
    EXPECT_EQ(bytes, expected);
    EXPECT_EQ(state_size_bytes(s), bytes.size());
    EXPECT_EQ(load_state(bytes), s);
}

TEST(Persist, KnownLayoutForOneBasis) {
    CompressorState s(parse_pattern("[L41]"));
    compress_apdu(s, Bytes{0xDE, 0xAD, 0xBE, 0xEF, 0x07});
    const auto empty = state_size_bytes(CompressorState(parse_pattern("[L41]")));
    EXPECT_EQ(state_size_bytes(s), empty + 6 + 4);
    auto bytes = save_state(s);
    const Bytes tail{1, 0x00, 0x04, 0, 0, 0, 1, 0xDE, 0xAD, 0xBE, 0xEF};
    ASSERT_GE(bytes.size(), tail.size());
    EXPECT_TRUE(std::equal(tail.begin(), tail.end(), bytes.end() - static_cast<std::ptrdiff_t>(tail.size())));
    compress_apdu(s, Bytes{0xDE, 0xAD, 0xBE, 0xEE, 0x07});
    EXPECT_EQ(state_size_bytes(s), empty + 6 + 8);
}

TEST(Persist, RandomStatesRoundtrip) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 40; ++i) {
        auto s = random_state(rng);
        auto bytes = save_state(s);
        ASSERT_EQ(bytes.size(), state_size_bytes(s));
        auto back = load_state(bytes);
        ASSERT_EQ(back, s);
        ASSERT_EQ(save_state(back), bytes);
    }
}

TEST(Persist, RejectsBadHeaders) {
    auto good = save_state(CompressorState(parse_pattern("[L41]")));
    auto bad_magic = good;
    bad_magic[0] = 'X';
    EXPECT_THROW(load_state(bad_magic), Error);
    auto bad_version = good;
    bad_version[4] = 2;
    EXPECT_THROW(load_state(bad_version), Error);
    EXPECT_THROW(load_state(ByteView(good).first(good.size() - 1)), Error);
    auto trailing = good;
    trailing.push_back(0);
    EXPECT_THROW(load_state(trailing), Error);
    try {
        load_state(bad_magic);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::format);
    }
}

TEST(Persist, ContainerFramesRoundtrip) {
    const auto p = parse_pattern("L40 [L52 L72 L16,2 L91 L41]");
    auto bytes = container_header(p);
    std::vector<Bytes> frames{{1, 2, 3}, {}, Bytes(300, 7)};
    for (const auto& f : frames) append_frame(bytes, f);
    auto c = parse_container(bytes);
    EXPECT_EQ(c.pattern, p);
    EXPECT_EQ(c.frames, frames);
    try {
        parse_container(ByteView(bytes).first(bytes.size() - 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("frame 2"), std::string::npos) << e.what();
    }
}

TEST(Persist, AtomicWriteReplacesFile) {
    auto dir = std::filesystem::temp_directory_path() / "gdpc_persist_test";
    std::filesystem::create_directories(dir);
    auto path = dir / "state.bin";
    write_file_atomic(path, Bytes{1, 2, 3});
    write_file_atomic(path, Bytes{4, 5});
    EXPECT_EQ(read_file(path), (Bytes{4, 5}));
    EXPECT_FALSE(std::filesystem::exists(dir / "state.bin.tmp"));
    EXPECT_THROW(read_file(dir / "missing"), Error);
    std::filesystem::remove_all(dir);
}
