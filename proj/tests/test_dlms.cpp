#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"

using namespace gdpc;
using namespace gdpc::dlms;

namespace {

Reading epoch_reading() {
    Reading r;
    r.timestamp = Timestamp{2020, 1, 1, 3, 0, 0, 0, 0, 0, 0};
    return r;
}

// Hand-laid bytes for epoch_reading(): 2020-01-01 (a Wednesday) 00:00:00 UTC,
// every counter and bitmap zero.
const std::array<std::uint8_t, 49> epoch_bytes = {
    0x02, 0x08,                                     // structure of 8
    0x06, 0x00, 0x00, 0x00, 0x00,                   // log id
    0x09, 0x0C, 0x07, 0xE4, 0x01, 0x01, 0x03,       // date-time: 2020, Jan, 1, Wed
    0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,       //   00:00:00.00, offset 0, status 0
    0x12, 0x00, 0x00,                               // log status
    0x06, 0x00, 0x00, 0x00, 0x00,                   // data quality
    0x06, 0x00, 0x00, 0x00, 0x00,                   // A14
    0x06, 0x00, 0x00, 0x00, 0x00,                   // A23
    0x06, 0x00, 0x00, 0x00, 0x00,                   // R12
    0x06, 0x00, 0x00, 0x00, 0x00,                   // R34
};

} // namespace

TEST(Dlms, EpochReadingMatchesLayoutTable) {
    EXPECT_EQ(encode_reading(epoch_reading()), epoch_bytes);
    EXPECT_EQ(decode_reading(epoch_bytes), epoch_reading());
}

TEST(Dlms, FieldOffsetsAndBigEndian) {
    Reading r = epoch_reading();
    r.log_id = 0x01020304;
    r.timestamp.hour = 13;
    r.timestamp.minute = 45;
    r.timestamp.utc_offset_minutes = -60;
    r.log_status = 0xA1B2;
    r.a14 = 0xCAFEBABE;
    r.r34 = 0x11223344;
    auto b = encode_reading(r);
    EXPECT_EQ(b[3], 0x01);
    EXPECT_EQ(b[6], 0x04);
    // hour and minute sit at positions 7 and 8 of the chunk starting at the date-time tag
    EXPECT_EQ(b[offset::timestamp + 7], 13);
    EXPECT_EQ(b[offset::timestamp + 8], 45);
    EXPECT_EQ(b[18], 0xFF);
    EXPECT_EQ(b[19], 0xC4);
    EXPECT_EQ(b[22], 0xA1);
    EXPECT_EQ(b[23], 0xB2);
    EXPECT_EQ(b[30], 0xCA);
    EXPECT_EQ(b[33], 0xBE);
    EXPECT_EQ(b[45], 0x11);
    EXPECT_EQ(b[48], 0x44);
}

TEST(Dlms, RoundtripAndTagStabilityOnRandomReadings) {
    std::mt19937_64 rng(1);
    const auto reference = encode_reading(epoch_reading());
    const std::size_t tags[] = {0, 1, 2, 7, 8, 21, 24, 29, 34, 39, 44};
    for (int i = 0; i < 5000; ++i) {
        auto r = test::random_reading(rng);
        auto b = encode_reading(r);
        ASSERT_EQ(b.size(), 49u);
        for (auto t : tags) ASSERT_EQ(b[t], reference[t]) << "tag offset " << t;
        ASSERT_EQ(decode_reading(b), r);
    }
}

TEST(Dlms, RangeViolationsNameTheField) {
    auto check = [](auto mutate, const char* field) {
        Reading r = epoch_reading();
        mutate(r);
        try {
            encode_reading(r);
            FAIL() << "expected EncodingError for " << field;
        } catch (const EncodingError& e) {
            EXPECT_EQ(e.field(), field);
        }
    };
    check([](Reading& r) { r.timestamp.month = 13; }, "timestamp.month");
    check([](Reading& r) { r.timestamp.month = 0; }, "timestamp.month");
    check([](Reading& r) { r.timestamp.day = 32; }, "timestamp.day");
    check([](Reading& r) { r.timestamp.hour = 24; }, "timestamp.hour");
    check([](Reading& r) { r.timestamp.minute = 60; }, "timestamp.minute");
    check([](Reading& r) { r.timestamp.second = 60; }, "timestamp.second");
}

TEST(Dlms, DecodeRejectsWrongTags) {
    auto b = encode_reading(epoch_reading());
    b[0] = 0x01;
    try {
        decode_reading(b);
        FAIL();
    } catch (const MalformedBufferError& e) {
        EXPECT_EQ(e.offset(), 0u);
    }
    b = encode_reading(epoch_reading());
    b[offset::a23] = 0x05;
    try {
        decode_reading(b);
        FAIL();
    } catch (const MalformedBufferError& e) {
        EXPECT_EQ(e.offset(), offset::a23);
    }
    EXPECT_THROW(decode_reading(ByteView(b).first(48)), MalformedBufferError);
}

TEST(Dlms, ApduLengths) {
    std::vector<Reading> rs(96, epoch_reading());
    EXPECT_EQ(encode_apdu(std::span(rs).first(1)).size(), 49u);
    EXPECT_EQ(encode_apdu(std::span(rs).first(2)).size(), 98u);
    EXPECT_EQ(encode_apdu(rs).size(), 4704u);
    EXPECT_THROW(encode_apdu(std::span<const Reading>{}), Error);

    auto buf = encode_apdu(std::span(rs).first(3));
    buf[49 + offset::r12] = 0x00;
    try {
        decode_apdu(buf);
        FAIL();
    } catch (const MalformedBufferError& e) {
        EXPECT_EQ(e.offset(), 49 + offset::r12);
    }
}

TEST(Dlms, AdvanceRollsCalendar) {
    Timestamp t{2020, 2, 28, 5, 23, 45, 0, 0, 60, 0};
    auto n = advance(t, 15);
    EXPECT_EQ(n.day, 29);
    EXPECT_EQ(n.hour, 0);
    EXPECT_EQ(n.minute, 0);
    EXPECT_EQ(n.weekday, 6);
    EXPECT_EQ(n.utc_offset_minutes, 60);
    Timestamp y{2020, 12, 31, 4, 23, 45, 0, 0, 0, 0};
    auto m = advance(y, 15);
    EXPECT_EQ(m.year, 2021);
    EXPECT_EQ(m.month, 1);
    EXPECT_EQ(m.day, 1);
    EXPECT_EQ(m.weekday, 5);
}

TEST(Csv, RoundtripSyntheticReadings) {
    std::mt19937_64 rng(3);
    auto readings = test::random_stream(rng, 200);
    std::stringstream ss;
    csv::write_readings(ss, readings);
    EXPECT_EQ(csv::read_readings(ss), readings);
}

TEST(Csv, Iso8601) {
    auto t = csv::parse_iso8601("2020-03-29T02:15:00.50-02:30");
    EXPECT_EQ(t.year, 2020);
    EXPECT_EQ(t.hour, 2);
    EXPECT_EQ(t.minute, 15);
    EXPECT_EQ(t.hundredths, 50);
    EXPECT_EQ(t.utc_offset_minutes, -150);
    EXPECT_EQ(t.weekday, 7);
    EXPECT_EQ(csv::format_iso8601(t), "2020-03-29T02:15:00.50-02:30");
    EXPECT_THROW(csv::parse_iso8601("2020-02-30T00:00:00"), Error);
    EXPECT_THROW(csv::parse_iso8601("yesterday"), Error);
}

TEST(Csv, RejectsBadInput) {
    std::stringstream wrong_header("a,b\n");
    EXPECT_THROW(csv::read_readings(wrong_header), Error);
    std::stringstream bad_value(std::string(csv::header) + "\n1,2020-01-01T00:00:00+00:00,0,0,x,0,0,0\n");
    EXPECT_THROW(csv::read_readings(bad_value), Error);
}
