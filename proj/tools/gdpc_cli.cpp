// gdpc: generalized-deduplication stream compression for DLMS meter readings.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include <gdpc/gdpc.hpp>

namespace fs = std::filesystem;
using namespace gdpc;

namespace {

constexpr const char* pattern_help = R"(Pattern grammar:
  pattern := prefix-token* '[' body-token+ ']'
  L<n>,<k>  LastByte: n basis bytes followed by k deviation bytes
  L<n><k>   shorthand when n and k are single digits (L41 = L4,1)
  H<p>      Hamming code with p parity bits (4..7) over a 2^(p-3)-byte chunk
Prefix tokens apply once at the head of every APDU; the body repeats.
Registry ids: #1 #2 #3 #4 #5 auto, e.g. --pattern '#4' or
  --pattern 'L40 [L52 L72 L16,2 L91 L41]')";

struct Options {
    std::string config;
    std::map<std::string, std::string> kv;
};

std::vector<dlms::Reading> read_csv_file(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw Error(ErrorKind::io, "cannot open '" + p.string() + "'");
    return csv::read_readings(in);
}

// CSV input is encoded to an APDU; anything else is taken as raw APDU bytes.
Bytes read_apdu_input(const fs::path& p) {
    if (p.extension() == ".csv") return dlms::encode_apdu(read_csv_file(p));
    return read_file(p);
}

void write_bytes(const fs::path& p, ByteView b) { write_file_atomic(p, b); }

void write_csv_file(const fs::path& p, std::span<const dlms::Reading> readings) {
    std::ostringstream os;
    csv::write_readings(os, readings);
    auto s = os.str();
    write_file_atomic(p, ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

void load_config(Options& opt) {
    if (opt.config.empty()) return;
    opt.kv = read_config(opt.config);
    check_sections(opt.kv);
    // validate every section up front, whichever subcommand runs
    baselines::StatConfig stat;
    baselines::apply(stat, opt.kv);
    GenDefaults gen;
    gdpc::apply(gen, opt.kv);
}

baselines::StatConfig stat_config(const Options& opt) {
    baselines::StatConfig cfg;
    baselines::apply(cfg, opt.kv);
    return cfg;
}

// ---------------------------------------------------------------------------

struct GenArgs {
    std::optional<std::size_t> households, days;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void cmd_gen(const GenArgs& a, const Options& opt) {
    GenDefaults g;
    gdpc::apply(g, opt.kv);
    if (a.households) g.households = *a.households;
    if (a.days) g.days = *a.days;
    if (a.seed) g.seed = *a.seed;
    auto fleet = synth::generate_fleet(g.households, g.days, g.seed);
    bench::save_dataset(a.out, fleet);
    std::cout << "wrote " << fleet.size() << " households x " << g.days * synth::readings_per_day
              << " readings to " << a.out << "\n";
}

struct CompressArgs {
    std::string in, state, pattern, out;
};

void cmd_compress(const CompressArgs& a) {
    std::optional<Pattern> wanted;
    if (!a.pattern.empty()) wanted = bench::lookup_pattern(a.pattern);

    std::optional<CompressorState> state;
    if (fs::exists(a.state)) {
        state = load_state(read_file(a.state));
        if (wanted && *wanted != state->pattern()) {
            throw Error(ErrorKind::invalid_argument, "pattern " + render(*wanted) + " does not match state pattern " +
                                                         render(state->pattern()));
        }
    } else if (wanted) {
        state.emplace(*wanted);
    } else {
        throw Error(ErrorKind::invalid_argument, "no state file at '" + a.state + "'; --pattern is required");
    }

    Bytes container;
    if (fs::exists(a.out)) {
        container = read_file(a.out);
        auto parsed = parse_container(container);
        if (parsed.pattern != state->pattern()) {
            throw Error(ErrorKind::invalid_argument, "container pattern " + render(parsed.pattern) +
                                                         " does not match state pattern " + render(state->pattern()));
        }
    } else {
        container = container_header(state->pattern());
    }

    const auto apdu = read_apdu_input(a.in);
    const auto before = state->total_bases();
    const auto frame = compress_apdu(*state, apdu).to_bytes();
    append_frame(container, frame);
    write_file_atomic(a.out, container);
    write_file_atomic(a.state, save_state(*state));
    std::cout << "compressed " << apdu.size() << " -> " << frame.size() << " bytes, " << state->total_bases() - before
              << " new bases\n";
}

struct DecompressArgs {
    std::string in, state, out;
};

void cmd_decompress(const DecompressArgs& a) {
    const auto container = parse_container(read_file(a.in));
    std::optional<CompressorState> state;
    if (fs::exists(a.state)) {
        state = load_state(read_file(a.state));
        if (state->pattern() != container.pattern) {
            throw Error(ErrorKind::invalid_argument, "state pattern " + render(state->pattern()) +
                                                         " does not match container pattern " +
                                                         render(container.pattern));
        }
    } else {
        state.emplace(container.pattern);
    }
    Bytes out;
    for (std::size_t i = 0; i < container.frames.size(); ++i) {
        try {
            auto apdu = decompress_apdu(*state, container.frames[i]);
            out.insert(out.end(), apdu.begin(), apdu.end());
        } catch (const Error& e) {
            throw Error(e.kind(), "frame " + std::to_string(i) + ": " + e.what());
        }
    }
    write_bytes(a.out, out);
    write_file_atomic(a.state, save_state(*state));
    std::cout << "decompressed " << container.frames.size() << " frames, " << out.size() << " bytes\n";
}

struct BaselineArgs {
    std::string kind, in, out;
    int period = synth::period_minutes;
    bool decompress = false;
};

void cmd_baseline(const BaselineArgs& a, const Options& opt) {
    const auto kind = baselines::parse_kind(a.kind);
    const auto stat = stat_config(opt);
    if (a.period <= 0) throw Error(ErrorKind::invalid_argument, "--period must be positive");
    Bytes out;
    if (!a.decompress) {
        switch (kind) {
        case baselines::BaselineKind::null_data: out = baselines::null_compress(read_csv_file(a.in), a.period); break;
        case baselines::BaselineKind::delta_array: out = baselines::delta_compress(read_csv_file(a.in), a.period); break;
        case baselines::BaselineKind::statistical: out = baselines::stat_compress(read_apdu_input(a.in), stat); break;
        case baselines::BaselineKind::uncompressed: out = read_apdu_input(a.in); break;
        }
    } else {
        const auto in = read_file(a.in);
        switch (kind) {
        case baselines::BaselineKind::null_data: out = dlms::encode_apdu(baselines::null_decompress(in, a.period)); break;
        case baselines::BaselineKind::delta_array: out = dlms::encode_apdu(baselines::delta_decompress(in, a.period)); break;
        case baselines::BaselineKind::statistical: out = baselines::stat_decompress(in, stat); break;
        case baselines::BaselineKind::uncompressed: out = in; break;
        }
    }
    write_bytes(a.out, out);
    std::cout << baselines::name(kind) << ": wrote " << out.size() << " bytes\n";
}

struct BenchArgs {
    std::string dataset, compressors = "gdp,null,delta,stat", pattern = "#4", sizes = "1,2,4,12,24,48,96",
                         header_mode = "none", out;
    bool no_svg = false, verify = false;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void cmd_bench(const BenchArgs& a, const Options& opt) {
    bench::BenchConfig cfg;
    cfg.compressors.clear();
    for (const auto& c : split_list(a.compressors)) cfg.compressors.push_back(bench::parse_compressor(c));
    cfg.sizes.clear();
    for (const auto& s : split_list(a.sizes)) {
        std::size_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size() || v == 0) {
            throw Error(ErrorKind::invalid_argument, "bad APDU size '" + s + "'");
        }
        cfg.sizes.push_back(v);
    }
    if (cfg.compressors.empty() || cfg.sizes.empty()) {
        throw Error(ErrorKind::invalid_argument, "--compressors and --sizes must not be empty");
    }
    cfg.pattern = bench::lookup_pattern(a.pattern);
    if (a.header_mode == "none") cfg.header_mode = bench::HeaderMode::none;
    else if (a.header_mode == "id4") cfg.header_mode = bench::HeaderMode::id4;
    else throw Error(ErrorKind::invalid_argument, "--header-mode must be none or id4");
    cfg.stat = stat_config(opt);
    cfg.verify = a.verify;

    const auto dataset = bench::load_dataset(a.dataset);
    const auto report = bench::run_grid(dataset, cfg);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    bench::write_report(a.out, report, !a.no_svg);
    bench::write_gains_csv(std::cout, report);
}

void cmd_state_inspect(const std::string& path) {
    const auto state = load_state(read_file(path));
    std::cout << "pattern: " << render(state.pattern()) << "\n";
    std::size_t bases = 0, bytes = 0, classes = 0;
    for (const auto& [len, t] : state.classes()) classes += t.size() > 0;
    std::cout << "classes: " << classes << "\n";
    for (const auto& [len, t] : state.classes()) {
        if (t.size() == 0) continue;
        std::cout << "class " << len << ": " << t.size() << " bases, " << t.size() * len << " bytes\n";
        bases += t.size();
        bytes += t.size() * len;
    }
    std::cout << "total: " << bases << " bases, " << bytes << " basis bytes, " << state_size_bytes(state)
              << " state bytes\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized-deduplication stream compression for DLMS smart-meter readings"};
    app.footer(pattern_help);
    app.require_subcommand(1);
    Options opt;
    app.add_option("--config", opt.config, "key=value file with stat.* and gen.* settings")->check(CLI::ExistingFile);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic meter fleet as CSV files");
    gen_cmd->add_option("--households", gen.households, "number of households");
    gen_cmd->add_option("--days", gen.days, "days of 15-minute readings");
    gen_cmd->add_option("--seed", gen.seed, "master seed (household i uses seed + i)");
    gen_cmd->add_option("--out", gen.out, "output directory")->required();

    std::string enc_in, enc_out;
    auto* enc_cmd = app.add_subcommand("encode", "encode a readings CSV into an APDU data buffer");
    enc_cmd->add_option("--in", enc_in, "readings CSV")->required()->check(CLI::ExistingFile);
    enc_cmd->add_option("--out", enc_out, "APDU binary")->required();

    std::string dec_in, dec_out;
    auto* dec_cmd = app.add_subcommand("decode", "decode an APDU data buffer into a readings CSV");
    dec_cmd->add_option("--in", dec_in, "APDU binary")->required()->check(CLI::ExistingFile);
    dec_cmd->add_option("--out", dec_out, "readings CSV")->required();

    CompressArgs comp;
    auto* comp_cmd = app.add_subcommand("compress", "compress one APDU and append it to a stream container");
    comp_cmd->add_option("--in", comp.in, "APDU binary, or readings CSV (.csv)")->required()->check(CLI::ExistingFile);
    comp_cmd->add_option("--state", comp.state, "compressor state file (created if missing)")->required();
    comp_cmd->add_option("--pattern", comp.pattern, "GD pattern or registry id; required for a new state");
    comp_cmd->add_option("--out", comp.out, "stream container (appended to)")->required();

    DecompressArgs decomp;
    auto* decomp_cmd = app.add_subcommand("decompress", "decompress every frame of a stream container");
    decomp_cmd->add_option("--in", decomp.in, "stream container")->required()->check(CLI::ExistingFile);
    decomp_cmd->add_option("--state", decomp.state, "decompressor state file (created if missing)")->required();
    decomp_cmd->add_option("--out", decomp.out, "concatenated APDU bytes")->required();

    BaselineArgs base;
    auto* base_cmd = app.add_subcommand("baseline", "run a stateless DLMS baseline compressor on one APDU");
    base_cmd->add_option("--kind", base.kind, "null, delta, stat or raw")->required();
    base_cmd->add_option("--in", base.in, "readings CSV (stat/raw also accept APDU binary)")->required()->check(CLI::ExistingFile);
    base_cmd->add_option("--out", base.out, "output file")->required();
    base_cmd->add_option("--period", base.period, "load-profile period in minutes");
    base_cmd->add_flag("--decompress", base.decompress, "invert: read compressed bytes, write the APDU");

    BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand("bench", "compare compressors over a dataset and upload sizes");
    bench_cmd->add_option("--dataset", bench_args.dataset, "directory of readings CSV files")->required()->check(CLI::ExistingDirectory);
    bench_cmd->add_option("--compressors", bench_args.compressors, "comma list of gdp,null,delta,stat");
    bench_cmd->add_option("--pattern", bench_args.pattern, "GD-P pattern or registry id");
    bench_cmd->add_option("--sizes", bench_args.sizes, "comma list of readings per APDU");
    bench_cmd->add_option("--header-mode", bench_args.header_mode, "none or id4");
    bench_cmd->add_option("--out", bench_args.out, "report directory")->required();
    bench_cmd->add_flag("--no-svg", bench_args.no_svg, "skip the SVG chart");
    bench_cmd->add_flag("--verify", bench_args.verify, "decompress every APDU and check it");

    std::string inspect_path;
    auto* state_cmd = app.add_subcommand("state", "state file tools");
    state_cmd->require_subcommand(1);
    auto* inspect_cmd = state_cmd->add_subcommand("inspect", "print per-class basis counts and sizes");
    inspect_cmd->add_option("--state", inspect_path, "state file")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        load_config(opt);
        if (*gen_cmd) cmd_gen(gen, opt);
        else if (*enc_cmd) write_bytes(enc_out, dlms::encode_apdu(read_csv_file(enc_in)));
        else if (*dec_cmd) write_csv_file(dec_out, dlms::decode_apdu(read_file(dec_in)));
        else if (*comp_cmd) cmd_compress(comp);
        else if (*decomp_cmd) cmd_decompress(decomp);
        else if (*base_cmd) cmd_baseline(base, opt);
        else if (*bench_cmd) cmd_bench(bench_args, opt);
        else if (*inspect_cmd) cmd_state_inspect(inspect_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
