#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "errors.hpp"
#include "freegroup.hpp"
#include "stats.hpp"
#include "version.hpp"

namespace twistop {

// fixed 17-significant-digit formatting: round-trips doubles exactly and
// keeps repeated runs byte-identical
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string format_hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// words serialize as dot-joined signed letters: a_1^{-1} a_2 <-> "-1.2";
// the empty word is "e"
inline std::string word_to_string(const Word& w) {
    if (w.empty()) return "e";
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(w[i]);
    }
    return s;
}

inline Word parse_word(const std::string& s) {
    if (s.empty() || s == "e") return {};
    Word w;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, '.')) {
        require(!tok.empty(), "bad-argument", "parse_word: empty letter");
        w.push_back(std::stoi(tok));
    }
    return reduce_word(w);
}

struct Provenance {
    std::uint64_t config_hash{0};
    std::uint64_t seed{0};
};

inline std::string provenance_comment(const Provenance& p) {
    return "# provenance: version=" + std::string(version_string) +
           " config_hash=" + format_hex64(p.config_hash) + " seed=" + std::to_string(p.seed);
}

inline nlohmann::json provenance_json(const Provenance& p) {
    return {{"version", version_string},
            {"config_hash", format_hex64(p.config_hash)},
            {"seed", p.seed}};
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "io-error", "cannot open for writing: " + path.string());
    out << content;
    require(out.good(), "io-error", "write failed: " + path.string());
}

// dense complex matrix container: magic, uint32 rows/cols, column-major
// float64 (re, im) pairs; pairs with a JSON sidecar for the metadata
inline void write_matrix_container(const std::filesystem::path& path,
                                   const Eigen::MatrixXcd& m) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "io-error", "cannot open for writing: " + path.string());
    const char magic[8] = {'T', 'W', 'O', 'P', 'M', 'T', 'X', '1'};
    out.write(magic, 8);
    const std::uint32_t rows = static_cast<std::uint32_t>(m.rows());
    const std::uint32_t cols = static_cast<std::uint32_t>(m.cols());
    out.write(reinterpret_cast<const char*>(&rows), 4);
    out.write(reinterpret_cast<const char*>(&cols), 4);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            const double re = m(r, c).real(), im = m(r, c).imag();
            out.write(reinterpret_cast<const char*>(&re), 8);
            out.write(reinterpret_cast<const char*>(&im), 8);
        }
    require(out.good(), "io-error", "write failed: " + path.string());
}

inline Eigen::MatrixXcd read_matrix_container(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "io-error", "cannot open for reading: " + path.string());
    char magic[8];
    in.read(magic, 8);
    require(in.good() && std::string(magic, 8) == "TWOPMTX1", "io-error",
            "bad matrix container magic: " + path.string());
    std::uint32_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), 4);
    in.read(reinterpret_cast<char*>(&cols), 4);
    Eigen::MatrixXcd m(rows, cols);
    for (std::uint32_t c = 0; c < cols; ++c)
        for (std::uint32_t r = 0; r < rows; ++r) {
            double re = 0, im = 0;
            in.read(reinterpret_cast<char*>(&re), 8);
            in.read(reinterpret_cast<char*>(&im), 8);
            m(r, c) = complexd(re, im);
        }
    require(in.good(), "io-error", "truncated matrix container: " + path.string());
    return m;
}

inline nlohmann::json trial_record_json(const TrialRecord& r) {
    nlohmann::json fixed = nlohmann::json::object();
    for (const auto& [w, c] : r.fixed_point_counts) fixed[word_to_string(w)] = c;
    nlohmann::json j{{"seed", r.seed}, {"N", r.N},       {"d", r.d},
                     {"L", r.L},       {"hs_norm_sq", r.hs_norm_sq}};
    j["fixed_point_counts"] = fixed;
    if (!r.trace_powers.empty()) j["trace_powers"] = r.trace_powers;
    return j;
}

// one JSON object per line; stream-appended so partial runs stay readable
inline void write_trial_records(const std::filesystem::path& path,
                                const std::vector<TrialRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "io-error", "cannot open for writing: " + path.string());
    for (const auto& r : records) out << trial_record_json(r).dump() << '\n';
    require(out.good(), "io-error", "write failed: " + path.string());
}

inline std::vector<TrialRecord> read_trial_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), "io-error", "cannot open for reading: " + path.string());
    std::vector<TrialRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        TrialRecord r;
        r.seed = j.at("seed").get<std::uint64_t>();
        r.N = j.at("N").get<int>();
        r.d = j.at("d").get<int>();
        r.L = j.at("L").get<int>();
        r.hs_norm_sq = j.at("hs_norm_sq").get<double>();
        if (j.contains("fixed_point_counts"))
            for (const auto& [k, v] : j.at("fixed_point_counts").items())
                r.fixed_point_counts.emplace_back(parse_word(k), v.get<int>());
        if (j.contains("trace_powers"))
            r.trace_powers = j.at("trace_powers").get<std::vector<double>>();
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace twistop
