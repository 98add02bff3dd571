#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "baselines.hpp"

namespace gdpc {

// key=value lines; '#' starts a comment, blank lines are ignored.
inline std::map<std::string, std::string> parse_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::format, "config line " + std::to_string(lineno) + ": expected key=value");
        }
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

inline std::map<std::string, std::string> read_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open config '" + path.string() + "'");
    return parse_config(in);
}

struct GenDefaults {
    std::size_t households = 10;
    std::size_t days = 30;
    std::uint64_t seed = 2020;

    bool operator==(const GenDefaults&) const = default;
};

inline void apply(GenDefaults& g, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (!key.starts_with("gen.")) continue;
        std::uint64_t v = 0;
        try {
            v = std::stoull(value);
        } catch (const std::exception&) {
            throw Error(ErrorKind::invalid_argument, "bad number for " + key + ": '" + value + "'");
        }
        if (key == "gen.households") g.households = v;
        else if (key == "gen.days") g.days = v;
        else if (key == "gen.seed") g.seed = v;
        else throw Error(ErrorKind::invalid_argument, "unknown config key '" + key + "'");
    }
}

// Rejects keys outside the known sections.
inline void check_sections(const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (!key.starts_with("stat.") && !key.starts_with("gen.")) {
            throw Error(ErrorKind::invalid_argument, "unknown config key '" + key + "'");
        }
    }
}

} // namespace gdpc
