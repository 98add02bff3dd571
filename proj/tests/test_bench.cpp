#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "test_support.hpp"

using namespace gdpc;
using namespace gdpc::bench;

namespace {

const std::vector<synth::Household>& small_fleet() {
    static const auto fleet = synth::generate_fleet(3, 4, 77);
    return fleet;
}

BenchConfig quick_config(std::vector<std::size_t> sizes) {
    BenchConfig cfg;
    cfg.sizes = std::move(sizes);
    return cfg;
}

} // namespace

TEST(Registry, EveryPatternTilesOneReading) {
    for (const auto& e : registry()) {
        auto p = parse_pattern(e.pattern);
        EXPECT_EQ(p.stride(), dlms::reading_size) << e.id;
        EXPECT_TRUE(p.prefix.empty()) << e.id;
        EXPECT_EQ(render(p), e.pattern) << e.id;
        EXPECT_EQ(lookup_pattern(e.id), p);
    }
    EXPECT_EQ(lookup_pattern("4"), lookup_pattern("#4"));
    EXPECT_EQ(lookup_pattern("[L41 L32]"), parse_pattern("[L41 L32]"));
    EXPECT_THROW(lookup_pattern("#9"), Error);
}

TEST(Registry, HeaderModeAddsFourBytePrefix) {
    BenchConfig cfg;
    cfg.header_mode = HeaderMode::id4;
    EXPECT_EQ(render(gdp_pattern(cfg)), "L40 [L52 L72 L16,2 L91 L41]");
    cfg.header_mode = HeaderMode::none;
    EXPECT_EQ(render(gdp_pattern(cfg)), "[L52 L72 L16,2 L91 L41]");
}

TEST(AutoPattern, LoadProfileSchema) {
    const auto schema = load_profile_schema();
    EXPECT_EQ(encoded_size(schema), 49u);
    auto p = auto_pattern(schema);
    EXPECT_EQ(p, lookup_pattern("auto"));
    EXPECT_EQ(p.stride(), encoded_size(schema));
}

TEST(AutoPattern, StrideMatchesEncodingForRandomSchemas) {
    std::mt19937_64 rng(1);
    const FieldKind kinds[] = {FieldKind::unsigned_int, FieldKind::bitmap};
    for (int i = 0; i < 200; ++i) {
        std::vector<FieldSpec> s{{"structure", FieldKind::structure_header, 2}};
        for (auto n = 1 + rng() % 8; n-- > 0;) {
            if (rng() % 5 == 0) {
                s.push_back({"t", FieldKind::date_time, 12});
            } else {
                s.push_back({"f", kinds[rng() % 2], 2 + rng() % 7, rng() % 3 == 0});
            }
        }
        ASSERT_EQ(auto_pattern(s).stride(), encoded_size(s));
    }
}

TEST(AutoPattern, Errors) {
    EXPECT_THROW(auto_pattern({}), Error);
    EXPECT_THROW(auto_pattern({{"x", FieldKind::signed_int, 4}}), Error);
    EXPECT_THROW(auto_pattern({{"x", FieldKind::floating, 4}}), Error);
    EXPECT_THROW(auto_pattern({{"x", FieldKind::date_time, 8}}), Error);
}

TEST(Grid, NullAndDeltaDoNothingAtOneReading) {
    auto cfg = quick_config({1});
    cfg.compressors = {Compressor::null_data, Compressor::delta_array};
    auto r = run_grid(small_fleet(), cfg);
    EXPECT_DOUBLE_EQ(r.gains.at({Compressor::null_data, 1}).mean, 0.0);
    EXPECT_DOUBLE_EQ(r.gains.at({Compressor::delta_array, 1}).mean, 0.0);
}

TEST(Grid, OrderingAtSmallAndLargeSizes) {
    auto r = run_grid(small_fleet(), quick_config({1, 2, 96}));
    for (std::size_t size : {1, 2}) {
        const auto gdp = r.gains.at({Compressor::gdp, size}).mean;
        EXPECT_GT(gdp, r.gains.at({Compressor::statistical, size}).mean);
        EXPECT_GT(gdp, r.gains.at({Compressor::delta_array, size}).mean);
        EXPECT_GE(r.gains.at({Compressor::delta_array, size}).mean, r.gains.at({Compressor::null_data, size}).mean);
    }
    EXPECT_GT(r.gains.at({Compressor::statistical, 96}).mean, 0.5);
    EXPECT_TRUE(r.warnings.empty());
    EXPECT_EQ(r.totals.at({"raw", 96}), 4.0 * 96 * 49);
}

TEST(Grid, PartialApdusAreDroppedWithWarning) {
    auto cfg = quick_config({5});
    cfg.compressors = {Compressor::gdp};
    auto r = run_grid(small_fleet(), cfg);
    EXPECT_EQ(r.warnings.size(), small_fleet().size());
    EXPECT_EQ(r.apdu_gains.at(5)[0].size(), 4u * 96 / 5);
}

TEST(Grid, HeaderModeChargesEveryApdu) {
    auto cfg = quick_config({1});
    cfg.compressors = {Compressor::gdp, Compressor::null_data};
    cfg.header_mode = HeaderMode::id4;
    auto r = run_grid(small_fleet(), cfg);
    EXPECT_DOUBLE_EQ(r.gains.at({Compressor::null_data, 1}).mean, 0.0);
    EXPECT_EQ(r.totals.at({"raw", 1}), 4.0 * 96 * 53);
    auto plain = run_grid(small_fleet(), [] {
        auto c = quick_config({1});
        c.compressors = {Compressor::gdp};
        return c;
    }());
    // the header basis is deduplicated, so it costs well under its 4 bytes
    const auto with = r.totals.at({"gdp", 1});
    const auto without = plain.totals.at({"gdp", 1});
    EXPECT_LT(with - without, 4.0 * 96 * 4 / 4);
}

TEST(Grid, ReportIsDeterministic) {
    auto cfg = quick_config({1, 12});
    auto a = run_grid(small_fleet(), cfg);
    auto b = run_grid(small_fleet(), cfg);
    std::ostringstream sa, sb;
    write_gains_csv(sa, a);
    write_gains_csv(sb, b);
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_TRUE(sa.str().starts_with("compressor,size,mean_gain,std\ngdp,1,"));
}

TEST(StateGrowth, MonotoneAndIndependentOfUploadSize) {
    const auto p = lookup_pattern("#4");
    auto ones = track_state_growth(small_fleet(), p, 1);
    auto days = track_state_growth(small_fleet(), p, 96);
    EXPECT_EQ(ones, days);
    for (const auto& series : ones) {
        ASSERT_EQ(series.size(), 4u);
        EXPECT_TRUE(std::is_sorted(series.begin(), series.end()));
    }
}

TEST(StateGrowth, BetterPatternsKeepLargerState) {
    // #2 < #1 < #4 in gain at whole-day uploads, and in stored state.
    auto cfg = quick_config({96});
    cfg.compressors = {Compressor::gdp};
    auto gain_of = [&](const char* id) {
        cfg.pattern = lookup_pattern(id);
        return run_grid(small_fleet(), cfg).gains.at({Compressor::gdp, 96}).mean;
    };
    auto state_of = [&](const char* id) {
        std::size_t s = 0;
        for (const auto& series : track_state_growth(small_fleet(), lookup_pattern(id))) s += series.back();
        return s;
    };
    EXPECT_GT(gain_of("#4"), gain_of("#1"));
    EXPECT_GT(gain_of("#1"), gain_of("#2"));
    EXPECT_GT(state_of("#4"), state_of("#1"));
    EXPECT_GT(state_of("#1"), state_of("#2"));
}

TEST(Dataset, SaveLoadRoundtrip) {
    auto dir = std::filesystem::temp_directory_path() / "gdpc_bench_dataset";
    std::filesystem::remove_all(dir);
    save_dataset(dir, small_fleet());
    auto back = load_dataset(dir);
    ASSERT_EQ(back.size(), small_fleet().size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_EQ(back[i].name, small_fleet()[i].name);
        EXPECT_EQ(back[i].readings, small_fleet()[i].readings);
    }
    auto out = dir / "report";
    write_report(out, run_grid(back, quick_config({96})));
    for (auto f : {"gains.csv", "totals.csv", "state_growth.csv", "gains.svg"}) {
        EXPECT_TRUE(std::filesystem::exists(out / f)) << f;
    }
    std::filesystem::remove_all(dir);
    EXPECT_THROW(load_dataset(dir), Error);
}
