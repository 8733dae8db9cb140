#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "freegroup.hpp"
#include "system.hpp"
#include "version.hpp"

namespace twistop {

// system description schema:
// {
//   "domain":   {"center": [re, im], "radius": r},
//   "branches": [{"kind": "gauss", "j": 2} |
//                {"kind": "mobius", "a": [re,im], "b": ..., "c": ..., "d": ...} |
//                {"kind": "affine", "fixed_point": [re,im], "multiplier": [re,im]}],
//   "weight":   {"kind": "zero"} |
//               {"kind": "polynomial", "coefficients": [[re,im], ...]} |
//               {"kind": "mayer", "sigma": s}
// }
inline complexd parse_complex(const nlohmann::json& j, const char* what) {
    if (j.is_number()) return complexd(j.get<double>(), 0.0);
    require(j.is_array() && (j.size() == 1 || j.size() == 2), "bad-config",
            std::string(what) + ": expected a number or [re, im]");
    const double re = j.at(0).get<double>();
    const double im = j.size() == 2 ? j.at(1).get<double>() : 0.0;
    return {re, im};
}

inline BranchSystem build_system(const nlohmann::json& j) {
    BranchSystem sys;
    require(j.contains("domain") && j.contains("branches"), "bad-config",
            "system config needs 'domain' and 'branches'");
    sys.domain.center = parse_complex(j.at("domain").at("center"), "domain.center");
    sys.domain.radius = j.at("domain").at("radius").get<double>();
    require(sys.domain.radius > 0.0, "bad-config", "domain.radius must be positive");

    for (const auto& b : j.at("branches")) {
        const std::string kind = b.at("kind").get<std::string>();
        if (kind == "gauss") {
            sys.branches.push_back(gauss_branch(b.at("j").get<int>()));
        } else if (kind == "mobius") {
            sys.branches.push_back(MobiusMap{parse_complex(b.at("a"), "mobius.a"),
                                             parse_complex(b.at("b"), "mobius.b"),
                                             parse_complex(b.at("c"), "mobius.c"),
                                             parse_complex(b.at("d"), "mobius.d")});
        } else if (kind == "affine") {
            sys.branches.push_back(
                AffineMap{parse_complex(b.at("fixed_point"), "affine.fixed_point"),
                          parse_complex(b.at("multiplier"), "affine.multiplier")});
        } else {
            fail("bad-config", "unknown branch kind: " + kind);
        }
    }
    require(!sys.branches.empty(), "bad-config", "system config has no branches");

    if (j.contains("weight")) {
        const auto& w = j.at("weight");
        const std::string kind = w.at("kind").get<std::string>();
        if (kind == "zero") {
            sys.weight.kind = WeightKind::zero;
        } else if (kind == "polynomial") {
            sys.weight.kind = WeightKind::polynomial;
            for (const auto& c : w.at("coefficients"))
                sys.weight.coefficients.push_back(parse_complex(c, "weight.coefficients"));
        } else if (kind == "mayer") {
            sys.weight.kind = WeightKind::mayer;
            sys.weight.sigma = w.at("sigma").get<double>();
        } else {
            fail("bad-config", "unknown weight kind: " + kind);
        }
    }
    return sys;
}

struct ExperimentConfig {
    std::string kind{"validate"};
    nlohmann::json system;  // inline system object (resolved from a path if given)
    std::vector<int> n_list{8};
    int L{40};
    int n_radial{64};
    int n_angular{128};
    int trials{100};
    std::uint64_t seed{20260815};
    int threads{1};
    int boundary_samples{256};
    int k_max{4};
    int p_max{4};
    int ball_radius{2};
    bool eigenvalues{false};
    std::vector<int> trace_powers;
    std::string out_dir{"out"};
};

inline nlohmann::json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), "bad-config", "cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail("bad-config", "config parse error in " + path.string() + ": " + e.what());
    }
    return j;
}

// experiment config schema (all fields optional except the system):
// { "kind": ..., "system": {...} | "system": "path.json", "N": [..], "L": ..,
//   "quadrature": {"n_radial": .., "n_angular": ..}, "trials": .., "seed": ..,
//   "threads": .., "boundary_samples": .., "k_max": .., "p_max": ..,
//   "ball_radius": .., "eigenvalues": .., "trace_powers": [..], "out": .. }
inline ExperimentConfig parse_experiment_config(const nlohmann::json& j,
                                                const std::filesystem::path& base_dir) {
    ExperimentConfig cfg;
    if (j.contains("kind")) cfg.kind = j.at("kind").get<std::string>();
    if (j.contains("system")) {
        if (j.at("system").is_string()) {
            std::filesystem::path p = j.at("system").get<std::string>();
            if (p.is_relative()) p = base_dir / p;
            cfg.system = load_json_file(p);
        } else {
            cfg.system = j.at("system");
        }
    }
    if (j.contains("N")) {
        cfg.n_list.clear();
        if (j.at("N").is_array())
            for (const auto& n : j.at("N")) cfg.n_list.push_back(n.get<int>());
        else
            cfg.n_list.push_back(j.at("N").get<int>());
    }
    if (j.contains("L")) cfg.L = j.at("L").get<int>();
    if (j.contains("quadrature")) {
        const auto& q = j.at("quadrature");
        if (q.contains("n_radial")) cfg.n_radial = q.at("n_radial").get<int>();
        if (q.contains("n_angular")) cfg.n_angular = q.at("n_angular").get<int>();
    }
    if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("boundary_samples"))
        cfg.boundary_samples = j.at("boundary_samples").get<int>();
    if (j.contains("k_max")) cfg.k_max = j.at("k_max").get<int>();
    if (j.contains("p_max")) cfg.p_max = j.at("p_max").get<int>();
    if (j.contains("ball_radius")) cfg.ball_radius = j.at("ball_radius").get<int>();
    if (j.contains("eigenvalues")) cfg.eigenvalues = j.at("eigenvalues").get<bool>();
    if (j.contains("trace_powers"))
        cfg.trace_powers = j.at("trace_powers").get<std::vector<int>>();
    if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
    return cfg;
}

// canonical resolved form of the result-determining fields; hashing this makes
// the provenance stamp insensitive to key order or whitespace in the input
// file, and to knobs (output directory, thread count) that cannot change any
// computed number
inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    return {{"kind", cfg.kind},
            {"system", cfg.system},
            {"N", cfg.n_list},
            {"L", cfg.L},
            {"quadrature", {{"n_radial", cfg.n_radial}, {"n_angular", cfg.n_angular}}},
            {"trials", cfg.trials},
            {"seed", cfg.seed},
            {"boundary_samples", cfg.boundary_samples},
            {"k_max", cfg.k_max},
            {"p_max", cfg.p_max},
            {"ball_radius", cfg.ball_radius},
            {"eigenvalues", cfg.eigenvalues},
            {"trace_powers", cfg.trace_powers}};
}

inline std::uint64_t config_hash(const ExperimentConfig& cfg) {
    return fnv1a64(config_to_json(cfg).dump());
}

}  // namespace twistop
