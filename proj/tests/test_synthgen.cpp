#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace gdpc;

TEST(Synthgen, OneDayIsNinetySixReadings) {
    auto rs = synth::generate_stream(synth::fleet_profile(7, 1), synth::default_start(), 96);
    ASSERT_EQ(rs.size(), 96u);
    EXPECT_EQ(rs.back().log_id - rs.front().log_id, 95u);
    for (std::size_t i = 1; i < rs.size(); ++i) {
        ASSERT_EQ(rs[i].timestamp, dlms::advance(rs[i - 1].timestamp, 15));
        ASSERT_EQ(rs[i].log_id, rs[i - 1].log_id + 1);
        ASSERT_EQ(rs[i].timestamp.second, 0);
        ASSERT_EQ(rs[i].timestamp.hundredths, 0);
    }
    EXPECT_EQ(rs[0].timestamp.year, 2020);
    EXPECT_EQ(rs[0].timestamp.utc_offset_minutes, 60);
}

TEST(Synthgen, NoGenerationMeansConstantExport) {
    auto p = synth::fleet_profile(7, 3);
    ASSERT_FALSE(p.has_generation);
    auto rs = synth::generate_stream(p, synth::default_start(), 96 * 7);
    for (const auto& r : rs) ASSERT_EQ(r.a23, 0u);

    auto solar = synth::fleet_profile(7, 0);
    ASSERT_TRUE(solar.has_generation);
    auto srs = synth::generate_stream(solar, synth::default_start(), 96 * 7);
    EXPECT_GT(srs.back().a23, srs.front().a23);
}

TEST(Synthgen, DeterministicAndSeedSensitive) {
    auto p = synth::fleet_profile(2020, 4);
    auto a = dlms::encode_apdu(synth::generate_stream(p, synth::default_start(), 500));
    auto b = dlms::encode_apdu(synth::generate_stream(p, synth::default_start(), 500));
    EXPECT_EQ(a, b);
    auto f1 = synth::generate_fleet(2, 2, 5);
    auto f2 = synth::generate_fleet(2, 2, 5);
    ASSERT_EQ(f1.size(), 2u);
    EXPECT_EQ(f1[0].readings, f2[0].readings);
    EXPECT_EQ(f1[1].readings, f2[1].readings);
    EXPECT_NE(f1[0].readings, f1[1].readings);
    EXPECT_EQ(f1[1].profile.seed, 6u);
    EXPECT_EQ(f1[0].name, "household_000");
}

TEST(Synthgen, FleetSize) {
    auto fleet = synth::generate_fleet(3, 30, 1);
    std::size_t total = 0;
    for (const auto& h : fleet) total += h.readings.size();
    EXPECT_EQ(total, 3u * 30 * 24 * 4);
}

TEST(Synthgen, RegistersAreMonotone) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 30; ++i) {
        auto rs = test::random_stream(rng, 96 * 3);
        for (std::size_t j = 1; j < rs.size(); ++j) {
            ASSERT_GE(rs[j].a14, rs[j - 1].a14);
            ASSERT_GE(rs[j].a23, rs[j - 1].a23);
            ASSERT_GE(rs[j].r12, rs[j - 1].r12);
            ASSERT_GE(rs[j].r34, rs[j - 1].r34);
            ASSERT_GT(rs[j].log_id, rs[j - 1].log_id);
        }
    }
}

TEST(Synthgen, ConsumptionFollowsTheDay) {
    // Evening intervals draw more than the small hours on average.
    auto rs = synth::generate_stream(synth::fleet_profile(1, 1), synth::default_start(), 96 * 30);
    double night = 0, evening = 0;
    for (std::size_t j = 1; j < rs.size(); ++j) {
        const double d = rs[j].a14 - rs[j - 1].a14;
        if (rs[j].timestamp.hour >= 2 && rs[j].timestamp.hour < 6) night += d;
        if (rs[j].timestamp.hour >= 17 && rs[j].timestamp.hour < 21) evening += d;
    }
    EXPECT_GT(evening, 1.5 * night);
}

TEST(Synthgen, RejectsBadProfiles) {
    synth::HouseholdProfile p;
    p.reactive_fraction = 1.5;
    EXPECT_THROW(synth::generate_stream(p, synth::default_start(), 1), Error);
    p = {};
    p.noise_w = -1;
    EXPECT_THROW(synth::generate_stream(p, synth::default_start(), 1), Error);
    EXPECT_THROW(synth::generate_stream({}, synth::default_start(), 0), Error);
    EXPECT_THROW(synth::generate_fleet(0, 1, 1), Error);
}
