#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "baselines.hpp"
#include "csv.hpp"
#include "persist.hpp"
#include "synthgen.hpp"

namespace gdpc::bench {

// ---------------------------------------------------------------------------
// pattern registry

struct PatternRegistryEntry {
    std::string id;
    std::string pattern;
    std::string note;
};

inline const std::vector<PatternRegistryEntry>& registry() {
    static const std::vector<PatternRegistryEntry> entries = {
        {"#1", "[L52 L72 L16,2 L41 L41 L41]",
         "0208 header merged with LogID, 2-byte LogID deviation; hour+minute deviation; "
         "constant middle up to A14 with 2-byte deviation; A23, R12, R34 as 5-byte chunks"},
        {"#2", "[L52 L54 L16,2 L41 L41 L41]", "#1 with the day and weekday bytes added to the timestamp deviation"},
        {"#3", "[L52 L72 L16,2 L91 L41]", "#1 with A23 merged into the basis of the R12 chunk"},
        {"#4", "[L52 L72 L16,2 L91 L41]", "constant A23, 2-byte A14 deviation (the header-extended form is L40 [#4])"},
        {"#5", "[L52 L72 L17,1 L91 L41]", "#4 with a single-byte A14 deviation"},
        {"auto", "[L20 L41 L72 L50 L21 L41 L32 L41 L41 L41]", "one chunk per field, generated from the load-profile schema"},
    };
    return entries;
}

// Accepts a registry id ("#4", "4", "auto") or a literal pattern string.
inline Pattern lookup_pattern(std::string_view name) {
    for (const auto& e : registry()) {
        if (name == e.id || (e.id.starts_with('#') && name == std::string_view(e.id).substr(1))) {
            return parse_pattern(e.pattern);
        }
    }
    return parse_pattern(name);
}

// ---------------------------------------------------------------------------
// automatic pattern generation from a load-profile schema

enum class FieldKind { structure_header, unsigned_int, bitmap, date_time, signed_int, floating };

struct FieldSpec {
    std::string name;
    FieldKind kind;
    std::size_t value_size = 0;
    bool high_variance = false; // counters whose per-interval change needs two bytes
};

inline std::vector<FieldSpec> load_profile_schema() {
    return {
        {"structure", FieldKind::structure_header, 2},
        {"log_id", FieldKind::unsigned_int, 4},
        {"timestamp", FieldKind::date_time, 12},
        {"log_status", FieldKind::bitmap, 2},
        {"data_quality", FieldKind::bitmap, 4},
        {"a14", FieldKind::unsigned_int, 4, true},
        {"a23", FieldKind::unsigned_int, 4},
        {"r12", FieldKind::unsigned_int, 4},
        {"r34", FieldKind::unsigned_int, 4},
    };
}

// One chunk per encoded field (tag included), deviation on the trailing
// bytes: 1 byte for counters and bitmaps, 2 for high-variance counters, and
// the date-time split so hour and minute end the first chunk.
inline Pattern auto_pattern(const std::vector<FieldSpec>& schema) {
    if (schema.empty()) {
        throw Error(ErrorKind::invalid_argument, "cannot generate a pattern from an empty schema");
    }
    Pattern p;
    for (const auto& f : schema) {
        switch (f.kind) {
        case FieldKind::structure_header:
            if (f.value_size == 0) throw Error(ErrorKind::invalid_argument, "field '" + f.name + "' has no size");
            p.body.push_back(Token::last_byte(f.value_size, 0));
            break;
        case FieldKind::unsigned_int:
        case FieldKind::bitmap: {
            const std::size_t dev = f.high_variance ? 2 : 1;
            if (f.value_size < dev) {
                throw Error(ErrorKind::invalid_argument, "field '" + f.name + "' is too small for its deviation");
            }
            p.body.push_back(Token::last_byte(1 + f.value_size - dev, dev));
            break;
        }
        case FieldKind::date_time:
            if (f.value_size != dlms::datetime_size) {
                throw Error(ErrorKind::invalid_argument, "field '" + f.name + "' must be a 12-byte date-time");
            }
            p.body.push_back(Token::last_byte(7, 2)); // tag, length, date, weekday | hour, minute
            p.body.push_back(Token::last_byte(5, 0)); // second, hundredths, deviation, status
            break;
        case FieldKind::signed_int:
        case FieldKind::floating:
            throw Error(ErrorKind::invalid_argument,
                        "field '" + f.name + "': varying bytes are not trailing in its big-endian encoding");
        }
    }
    return p;
}

inline std::size_t encoded_size(const std::vector<FieldSpec>& schema) {
    std::size_t n = 0;
    for (const auto& f : schema) {
        n += f.value_size;
        if (f.kind == FieldKind::date_time) n += 2;
        else if (f.kind != FieldKind::structure_header) n += 1;
    }
    return n;
}

// ---------------------------------------------------------------------------
// datasets

inline std::vector<synth::Household> load_dataset(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw Error(ErrorKind::io, "dataset directory '" + dir.string() + "' does not exist");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    }
    if (files.empty()) {
        throw Error(ErrorKind::io, "no .csv files in '" + dir.string() + "'");
    }
    std::sort(files.begin(), files.end());
    std::vector<synth::Household> out;
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) throw Error(ErrorKind::io, "cannot open '" + f.string() + "'");
        out.push_back({f.stem().string(), {}, csv::read_readings(in)});
    }
    return out;
}

inline void save_dataset(const std::filesystem::path& dir, const std::vector<synth::Household>& fleet) {
    std::filesystem::create_directories(dir);
    for (const auto& h : fleet) {
        std::ofstream out(dir / (h.name + ".csv"));
        if (!out) throw Error(ErrorKind::io, "cannot write '" + (dir / (h.name + ".csv")).string() + "'");
        csv::write_readings(out, h.readings);
    }
}

// ---------------------------------------------------------------------------
// grid runner

enum class Compressor { gdp, null_data, delta_array, statistical };

inline std::string_view name(Compressor c) {
    switch (c) {
    case Compressor::gdp: return "gdp";
    case Compressor::null_data: return "null";
    case Compressor::delta_array: return "delta";
    case Compressor::statistical: return "stat";
    }
    return "?";
}

inline Compressor parse_compressor(std::string_view s) {
    for (auto c : {Compressor::gdp, Compressor::null_data, Compressor::delta_array, Compressor::statistical}) {
        if (s == name(c)) return c;
    }
    throw Error(ErrorKind::invalid_argument, "unknown compressor '" + std::string(s) + "'");
}

enum class HeaderMode { none, id4 };

inline const std::vector<std::size_t>& default_sizes() {
    static const std::vector<std::size_t> sizes{1, 2, 4, 12, 24, 48, 96};
    return sizes;
}

struct BenchConfig {
    std::vector<Compressor> compressors{Compressor::gdp, Compressor::null_data, Compressor::delta_array,
                                        Compressor::statistical};
    std::vector<std::size_t> sizes = default_sizes();
    Pattern pattern = lookup_pattern("#4");
    HeaderMode header_mode = HeaderMode::none;
    int period_minutes = synth::period_minutes;
    baselines::StatConfig stat;
    std::array<std::uint8_t, 4> header_id{0x4C, 0x50, 0x30, 0x31};
    bool verify = false; // decompress every APDU and compare
};

struct GainStats {
    double mean = 0;
    double std = 0;
};

struct BenchReport {
    // (compressor, readings per APDU) -> gain across households
    std::map<std::pair<Compressor, std::size_t>, GainStats> gains;
    std::map<std::pair<Compressor, std::size_t>, std::vector<double>> household_gains;
    // GD-P per-APDU gains: size -> household -> series
    std::map<std::size_t, std::vector<std::vector<double>>> apdu_gains;
    // GD-P state bytes after each whole day: size -> household -> series
    std::map<std::size_t, std::vector<std::vector<std::size_t>>> state_growth;
    // mean bytes uploaded per meter; "raw" rows hold the uncompressed total
    std::map<std::pair<std::string, std::size_t>, double> totals;
    std::vector<std::string> warnings;
};

// The effective GD-P pattern: in id4 mode the header rides as an L40 prefix.
inline Pattern gdp_pattern(const BenchConfig& cfg) {
    Pattern p = cfg.pattern;
    if (cfg.header_mode == HeaderMode::id4 && p.prefix.empty()) {
        p.prefix.push_back(Token::last_byte(4, 0));
    }
    return p;
}

namespace detail {

inline GainStats summarize(const std::vector<double>& v) {
    GainStats s;
    if (v.empty()) return s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

struct Partition {
    std::size_t apdus = 0;
    std::size_t dropped = 0;
};

inline Partition partition(std::size_t readings, std::size_t size) {
    return {readings / size, readings % size};
}

} // namespace detail

// GD-P over one household at one APDU size. Returns per-APDU (compressed,
// original) byte counts and records state size after each whole day.
struct GdpRun {
    std::vector<std::size_t> compressed;
    std::vector<std::size_t> original;
    std::vector<std::size_t> daily_state;
    CompressorState final_state{Pattern{}};
};

inline GdpRun run_gdp(std::span<const dlms::Reading> readings, std::size_t size, const BenchConfig& cfg) {
    const Pattern pattern = gdp_pattern(cfg);
    CompressorState state(pattern);
    CompressorState mirror(pattern);
    GdpRun run;
    const auto part = detail::partition(readings.size(), size);
    for (std::size_t a = 0; a < part.apdus; ++a) {
        Bytes apdu;
        if (cfg.header_mode == HeaderMode::id4) apdu.assign(cfg.header_id.begin(), cfg.header_id.end());
        auto data = dlms::encode_apdu(readings.subspan(a * size, size));
        apdu.insert(apdu.end(), data.begin(), data.end());
        const auto wire = compress_apdu(state, apdu).to_bytes();
        if (cfg.verify && decompress_apdu(mirror, wire) != apdu) {
            throw Error(ErrorKind::corrupt_stream, "GD-P roundtrip mismatch at APDU " + std::to_string(a));
        }
        run.compressed.push_back(wire.size());
        run.original.push_back(apdu.size());
        const auto done = (a + 1) * size;
        const auto day = static_cast<std::size_t>(synth::readings_per_day);
        if (done / day > (done - size) / day) {
            run.daily_state.push_back(state_size_bytes(state));
        }
    }
    run.final_state = std::move(state);
    return run;
}

inline std::size_t baseline_size(Compressor c, std::span<const dlms::Reading> apdu, const BenchConfig& cfg) {
    Bytes out;
    switch (c) {
    case Compressor::null_data:
        out = baselines::null_compress(apdu, cfg.period_minutes);
        if (cfg.verify && baselines::null_decompress(out, cfg.period_minutes) !=
                              std::vector<dlms::Reading>(apdu.begin(), apdu.end())) {
            throw Error(ErrorKind::corrupt_stream, "Null roundtrip mismatch");
        }
        break;
    case Compressor::delta_array:
        out = baselines::delta_compress(apdu, cfg.period_minutes);
        if (cfg.verify && baselines::delta_decompress(out, cfg.period_minutes) !=
                              std::vector<dlms::Reading>(apdu.begin(), apdu.end())) {
            throw Error(ErrorKind::corrupt_stream, "Delta roundtrip mismatch");
        }
        break;
    case Compressor::statistical: {
        auto raw = dlms::encode_apdu(apdu);
        out = baselines::stat_compress(raw, cfg.stat);
        if (cfg.verify && baselines::stat_decompress(out, cfg.stat) != raw) {
            throw Error(ErrorKind::corrupt_stream, "LZMA roundtrip mismatch");
        }
        break;
    }
    case Compressor::gdp:
        throw Error(ErrorKind::invalid_argument, "GD-P is stateful; use run_gdp");
    }
    return out.size() + (cfg.header_mode == HeaderMode::id4 ? cfg.header_id.size() : 0);
}

// Gain is 1 - compressed/original summed over a household's APDUs, averaged
// across households. GD-P skips each stream's first (transient) APDU.
inline BenchReport run_grid(const std::vector<synth::Household>& dataset, const BenchConfig& cfg) {
    if (dataset.empty()) throw Error(ErrorKind::invalid_argument, "empty dataset");
    BenchReport report;
    const std::size_t header = cfg.header_mode == HeaderMode::id4 ? cfg.header_id.size() : 0;

    for (auto size : cfg.sizes) {
        if (size == 0) throw Error(ErrorKind::invalid_argument, "APDU size must be positive");
        double raw_total = 0;
        for (const auto& h : dataset) {
            const auto part = detail::partition(h.readings.size(), size);
            if (part.dropped) {
                report.warnings.push_back(h.name + ": dropping " + std::to_string(part.dropped) +
                                          " trailing readings at " + std::to_string(size) + " readings/APDU");
            }
            raw_total += static_cast<double>(part.apdus * (size * dlms::reading_size + header));
        }
        report.totals[{"raw", size}] = raw_total / static_cast<double>(dataset.size());

        for (auto c : cfg.compressors) {
            std::vector<double> gains;
            double total = 0;
            for (const auto& h : dataset) {
                std::span<const dlms::Reading> readings(h.readings);
                double comp = 0, orig = 0;
                if (c == Compressor::gdp) {
                    auto run = run_gdp(readings, size, cfg);
                    std::vector<double> series;
                    for (std::size_t a = 0; a < run.compressed.size(); ++a) {
                        total += static_cast<double>(run.compressed[a]);
                        series.push_back(1.0 - static_cast<double>(run.compressed[a]) /
                                                   static_cast<double>(run.original[a]));
                        if (a == 0) continue;
                        comp += static_cast<double>(run.compressed[a]);
                        orig += static_cast<double>(run.original[a]);
                    }
                    report.apdu_gains[size].push_back(std::move(series));
                    report.state_growth[size].push_back(std::move(run.daily_state));
                } else {
                    const auto part = detail::partition(readings.size(), size);
                    for (std::size_t a = 0; a < part.apdus; ++a) {
                        const auto n = baseline_size(c, readings.subspan(a * size, size), cfg);
                        comp += static_cast<double>(n);
                        orig += static_cast<double>(size * dlms::reading_size + header);
                    }
                    total += comp;
                }
                gains.push_back(orig > 0 ? 1.0 - comp / orig : 0.0);
            }
            report.gains[{c, size}] = detail::summarize(gains);
            report.household_gains[{c, size}] = std::move(gains);
            report.totals[{std::string(name(c)), size}] = total / static_cast<double>(dataset.size());
        }
    }
    return report;
}

// State size per meter after each simulated day, compressing at `size`
// readings per APDU.
inline std::vector<std::vector<std::size_t>> track_state_growth(const std::vector<synth::Household>& dataset,
                                                                const Pattern& pattern, std::size_t size = 1) {
    BenchConfig cfg;
    cfg.pattern = pattern;
    std::vector<std::vector<std::size_t>> out;
    for (const auto& h : dataset) {
        out.push_back(run_gdp(h.readings, size, cfg).daily_state);
    }
    return out;
}

// ---------------------------------------------------------------------------
// report output

namespace detail {

inline std::string fmt(double v, int prec = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) throw Error(ErrorKind::io, "cannot write '" + p.string() + "'");
    return f;
}

} // namespace detail

inline void write_gains_csv(std::ostream& os, const BenchReport& r) {
    os << "compressor,size,mean_gain,std\n";
    for (const auto& [key, g] : r.gains) {
        os << name(key.first) << ',' << key.second << ',' << detail::fmt(g.mean) << ',' << detail::fmt(g.std) << '\n';
    }
}

inline void write_totals_csv(std::ostream& os, const BenchReport& r) {
    os << "compressor,size,mean_total_bytes\n";
    for (const auto& [key, v] : r.totals) {
        os << key.first << ',' << key.second << ',' << detail::fmt(v, 1) << '\n';
    }
}

// One row per household and day, taken from the first GD-P size in the grid.
inline void write_state_growth_csv(std::ostream& os, const BenchReport& r) {
    os << "household,day,state_bytes\n";
    if (r.state_growth.empty()) return;
    const auto& series = r.state_growth.begin()->second;
    for (std::size_t h = 0; h < series.size(); ++h) {
        for (std::size_t d = 0; d < series[h].size(); ++d) {
            os << h << ',' << d + 1 << ',' << series[h][d] << '\n';
        }
    }
}

inline void write_gains_svg(std::ostream& os, const BenchReport& r) {
    constexpr double w = 640, h = 400, left = 60, right = 120, top = 20, bottom = 50;
    std::vector<std::size_t> sizes;
    double lo = 0;
    for (const auto& [key, g] : r.gains) {
        if (std::find(sizes.begin(), sizes.end(), key.second) == sizes.end()) sizes.push_back(key.second);
        lo = std::min(lo, g.mean);
    }
    std::sort(sizes.begin(), sizes.end());
    lo = std::floor(lo * 10) / 10;
    auto x = [&](std::size_t i) {
        return left + (sizes.size() > 1 ? (w - left - right) * static_cast<double>(i) / static_cast<double>(sizes.size() - 1) : 0);
    };
    auto y = [&](double g) { return top + (h - top - bottom) * (1.0 - (g - lo) / (1.0 - lo)); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (double g = lo; g <= 1.0001; g += 0.1) {
        os << "<line x1=\"" << left << "\" x2=\"" << w - right << "\" y1=\"" << y(g) << "\" y2=\"" << y(g)
           << "\" stroke=\"#ddd\"/><text x=\"" << left - 8 << "\" y=\"" << y(g) + 4
           << "\" font-size=\"11\" text-anchor=\"end\">" << detail::fmt(g * 100, 0) << "%</text>\n";
    }
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        os << "<text x=\"" << x(i) << "\" y=\"" << h - bottom + 18 << "\" font-size=\"11\" text-anchor=\"middle\">"
           << sizes[i] << "</text>\n";
    }
    os << "<text x=\"" << (w - right + left) / 2 << "\" y=\"" << h - 10
       << "\" font-size=\"12\" text-anchor=\"middle\">readings per APDU</text>\n";
    static constexpr const char* colors[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a"};
    int ci = 0;
    for (auto c : {Compressor::gdp, Compressor::null_data, Compressor::delta_array, Compressor::statistical}) {
        std::string pts;
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            auto it = r.gains.find({c, sizes[i]});
            if (it == r.gains.end()) continue;
            pts += detail::fmt(x(i), 1) + "," + detail::fmt(y(it->second.mean), 1) + " ";
        }
        if (pts.empty()) continue;
        os << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << colors[ci] << "\" points=\"" << pts << "\"/>\n";
        os << "<text x=\"" << w - right + 10 << "\" y=\"" << top + 20 + 18 * ci << "\" font-size=\"12\" fill=\""
           << colors[ci] << "\">" << name(c) << "</text>\n";
        ++ci;
    }
    os << "</svg>\n";
}

inline void write_report(const std::filesystem::path& dir, const BenchReport& r, bool svg = true) {
    std::filesystem::create_directories(dir);
    {
        auto f = detail::open_out(dir / "gains.csv");
        write_gains_csv(f, r);
    }
    {
        auto f = detail::open_out(dir / "totals.csv");
        write_totals_csv(f, r);
    }
    {
        auto f = detail::open_out(dir / "state_growth.csv");
        write_state_growth_csv(f, r);
    }
    if (svg) {
        auto f = detail::open_out(dir / "gains.svg");
        write_gains_svg(f, r);
    }
}

} // namespace gdpc::bench
