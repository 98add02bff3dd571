#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "dlms.hpp"

namespace gdpc::synth {

inline constexpr int period_minutes = 15;
inline constexpr int readings_per_day = 24 * 60 / period_minutes;
inline constexpr int days_per_month = 30;

// Consumption model: base + diurnal sinusoid (evening peak) + uniform noise,
// clipped at zero. Households with generation add a daytime solar bump that
// is netted against consumption and accumulated into A23.
struct HouseholdProfile {
    std::uint64_t seed = 0;
    double base_load_w = 250;
    double diurnal_amplitude_w = 200;
    double noise_w = 80;
    bool has_generation = false;
    double generation_peak_w = 0;
    double reactive_fraction = 0.05;
};

// Validates the physical parameters; throws on negative values.
inline void validate(const HouseholdProfile& p) {
    if (p.base_load_w < 0 || p.diurnal_amplitude_w < 0 || p.noise_w < 0 || p.generation_peak_w < 0) {
        throw Error(ErrorKind::invalid_argument, "household profile parameters must be non-negative");
    }
    if (p.reactive_fraction < 0 || p.reactive_fraction > 1) {
        throw Error(ErrorKind::invalid_argument, "reactive_fraction must be in [0,1]");
    }
}

namespace detail {

inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

} // namespace detail

inline dlms::Timestamp default_start() {
    using namespace std::chrono;
    return dlms::make_timestamp(sys_days{year{2020} / January / 1}, 60);
}

inline std::vector<dlms::Reading> generate_stream(const HouseholdProfile& profile, const dlms::Timestamp& start,
                                                  std::size_t count) {
    validate(profile);
    if (count == 0) {
        throw Error(ErrorKind::invalid_argument, "reading count must be at least 1");
    }
    dlms::validate(start);
    std::mt19937_64 rng(profile.seed);

    // Meters are not new: registers start from seed-dependent totals.
    double a14 = detail::uniform(rng, 1e6, 2e7);
    double a23 = profile.has_generation ? detail::uniform(rng, 1e5, 5e6) : 0.0;
    double r12 = a14 * profile.reactive_fraction;
    double r34 = r12 * 0.2;
    auto log_id = static_cast<std::uint32_t>(1 + rng() % 200000);

    std::vector<dlms::Reading> out;
    out.reserve(count);
    dlms::Timestamp ts = start;
    ts.second = 0;
    ts.hundredths = 0;
    for (std::size_t i = 0; i < count; ++i) {
        if (i > 0) {
            // Energy over the interval that ends at the new timestamp.
            const double hour = ts.hour + ts.minute / 60.0;
            double load = profile.base_load_w +
                          profile.diurnal_amplitude_w * std::sin(2 * std::numbers::pi * (hour - 13.0) / 24.0) +
                          detail::uniform(rng, -profile.noise_w, profile.noise_w);
            double gen = 0;
            if (profile.has_generation) {
                const double sun = std::sin(std::numbers::pi * (hour - 6.0) / 12.0);
                gen = sun > 0 ? profile.generation_peak_w * sun * detail::uniform(rng, 0.6, 1.0) : 0.0;
            }
            const double import_wh = std::max(0.0, load - gen) * 0.25;
            const double export_wh = std::max(0.0, gen - std::max(0.0, load)) * 0.25;
            a14 += import_wh;
            a23 += export_wh;
            r12 += import_wh * profile.reactive_fraction;
            r34 += import_wh * profile.reactive_fraction * 0.2;
            ++log_id;
            ts = dlms::advance(ts, period_minutes);
        }
        dlms::Reading r;
        r.log_id = log_id;
        r.timestamp = ts;
        r.log_status = 0x0000;
        r.data_quality = 0x00000000;
        r.a14 = static_cast<std::uint32_t>(a14);
        r.a23 = static_cast<std::uint32_t>(a23);
        r.r12 = static_cast<std::uint32_t>(r12);
        r.r34 = static_cast<std::uint32_t>(r34);
        out.push_back(r);
    }
    return out;
}

// Household i uses seed master_seed + i; every 20th household (i % 20 == 0)
// feeds generation back into the grid.
inline HouseholdProfile fleet_profile(std::uint64_t master_seed, std::size_t index) {
    HouseholdProfile p;
    p.seed = master_seed + index;
    std::mt19937_64 rng(p.seed ^ 0x9E3779B97F4A7C15ull);
    p.base_load_w = detail::uniform(rng, 150, 350);
    p.diurnal_amplitude_w = detail::uniform(rng, 100, 350);
    p.noise_w = detail::uniform(rng, 30, 150);
    p.reactive_fraction = detail::uniform(rng, 0.02, 0.08);
    p.has_generation = index % 20 == 0;
    p.generation_peak_w = p.has_generation ? detail::uniform(rng, 1500, 4000) : 0.0;
    return p;
}

struct Household {
    std::string name;
    HouseholdProfile profile;
    std::vector<dlms::Reading> readings;
};

inline std::vector<Household> generate_fleet(std::size_t households, std::size_t days, std::uint64_t seed,
                                             const dlms::Timestamp& start = default_start()) {
    if (households == 0 || days == 0) {
        throw Error(ErrorKind::invalid_argument, "fleet needs at least one household and one day");
    }
    std::vector<Household> fleet;
    fleet.reserve(households);
    for (std::size_t i = 0; i < households; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "household_%03zu", i);
        auto profile = fleet_profile(seed, i);
        fleet.push_back({name, profile, generate_stream(profile, start, days * readings_per_day)});
    }
    return fleet;
}

} // namespace gdpc::synth
