#pragma once

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "algebra.hpp"
#include "arcsine.hpp"
#include "assembly.hpp"
#include "combinatorics.hpp"
#include "config.hpp"
#include "io.hpp"
#include "spectra.hpp"
#include "stats.hpp"
#include "twisted.hpp"

namespace twistop {

namespace detail {

inline BranchSystem validated_system(const ExperimentConfig& cfg) {
    require(!cfg.system.is_null() && !cfg.system.empty(), "bad-config",
            "kind '" + cfg.kind + "' requires a system description");
    BranchSystem sys = build_system(cfg.system);
    validate_system(sys, cfg.boundary_samples);
    return sys;
}

inline nlohmann::json validation_json(const BranchSystem& sys) {
    const ValidationReport& rep = *sys.validation;
    nlohmann::json branches = nlohmann::json::array();
    for (std::size_t j = 0; j < rep.branch_margins.size(); ++j)
        branches.push_back({{"margin", rep.branch_margins[j]},
                            {"rho", rep.branch_rhos[j]},
                            {"weight_sup", rep.branch_weight_sups[j]}});
    return {{"domain",
             {{"center", {sys.domain.center.real(), sys.domain.center.imag()}},
              {"radius", sys.domain.radius}}},
            {"branch_count", sys.branches.size()},
            {"margin", rep.margin},
            {"rho", rep.rho},
            {"samples", rep.samples},
            {"branches", branches},
            {"warnings", rep.warnings},
            {"operator_norm_bound", operator_norm_bound(sys)}};
}

// all pair words a_i^{-1} a_j, i < j -- the fluctuation-driving agreements
inline std::vector<Word> pair_words(int d) {
    std::vector<Word> ws;
    for (int i = 1; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j) ws.push_back(Word{-i, j});
    return ws;
}

inline std::string csv_quote_word(const Word& w) { return word_to_string(w); }

}  // namespace detail

inline int run(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    const fs::path out(cfg.out_dir);
    fs::create_directories(out);
    const Provenance prov{config_hash(cfg), cfg.seed};

    if (cfg.kind == "validate") {
        const BranchSystem sys = detail::validated_system(cfg);
        nlohmann::json rep = detail::validation_json(sys);
        rep["provenance"] = provenance_json(prov);
        write_text_file(out / "validation.json", rep.dump(2) + "\n");
        std::cout << "validate: margin=" << format_g17(sys.validation->margin)
                  << " rho=" << format_g17(sys.validation->rho) << "\n";
        return 0;
    }

    if (cfg.kind == "assemble") {
        const BranchSystem sys = detail::validated_system(cfg);
        const QuadratureRule quad =
            quadrature_nodes(sys.domain, cfg.n_radial, cfg.n_angular);
        const std::vector<TruncatedOperator> ops = assemble_all(sys, cfg.L, quad);
        for (std::size_t j = 0; j < ops.size(); ++j) {
            const std::string stem = "operator_" + std::to_string(j);
            write_matrix_container(out / (stem + ".bin"), ops[j].entries);
            nlohmann::json side{{"branch", ops[j].branch},
                                {"L", ops[j].L},
                                {"rho", ops[j].rho},
                                {"tail_bound", ops[j].tail_bound},
                                {"coarse_warning", ops[j].coarse_warning},
                                {"n_radial", quad.n_radial},
                                {"n_angular", quad.n_angular},
                                {"provenance", provenance_json(prov)}};
            write_text_file(out / (stem + ".json"), side.dump(2) + "\n");
        }
        const Eigen::MatrixXcd h = overlap_matrix(sys, quad);
        std::ostringstream csv;
        csv << provenance_comment(prov) << "\n";
        csv << "i,j,re,im\n";
        for (Eigen::Index i = 0; i < h.rows(); ++i)
            for (Eigen::Index j = 0; j < h.cols(); ++j)
                csv << i << ',' << j << ',' << format_g17(h(i, j).real()) << ','
                    << format_g17(h(i, j).imag()) << "\n";
        write_text_file(out / "overlap.csv", csv.str());
        std::cout << "assemble: wrote " << ops.size() << " operators, L=" << cfg.L << "\n";
        return 0;
    }

    if (cfg.kind == "simulate") {
        const BranchSystem sys = detail::validated_system(cfg);
        const QuadratureRule quad =
            quadrature_nodes(sys.domain, cfg.n_radial, cfg.n_angular);
        const std::vector<TruncatedOperator> ops = assemble_all(sys, cfg.L, quad);
        const Eigen::MatrixXcd h = overlap_matrix(sys, quad);
        const double l1 = limit_moments_L(h, 1);

        std::vector<int> n_sorted = cfg.n_list;
        std::sort(n_sorted.begin(), n_sorted.end());
        require(!n_sorted.empty() && n_sorted.front() >= 1, "bad-config",
                "simulate: N list must contain positive sizes");

        nlohmann::json summary;
        summary["provenance"] = provenance_json(prov);
        summary["L1"] = l1;
        double c3 = 0.0;  // max over seeds at the smallest N of sum mu / N
        nlohmann::json per_n = nlohmann::json::array();

        for (int n : n_sorted) {
            const std::uint64_t sub = mix_seed(cfg.seed, static_cast<std::uint64_t>(n));
            std::vector<double> sum_mu_over_n, ratios;
            int grid_violations = 0;
            for (int s = 0; s < cfg.trials; ++s) {
                const RandomHom hom =
                    sample_homomorphism(static_cast<int>(ops.size()), n,
                                        mix_seed(sub, static_cast<std::uint64_t>(s)));
                const TwistedMatrix m = build_twisted_matrix(ops, hom);
                const std::vector<double> sv = singular_values(m);
                double smu = 0.0;
                for (double v : sv) smu += v;
                sum_mu_over_n.push_back(smu / n);

                // Weyl inequality #{|lambda| >= 1/r} <= r sum mu on a fixed grid
                std::vector<complexd> ev;
                if (cfg.eigenvalues) ev = eigenvalues(m);
                for (int gk = 1; gk <= 20; ++gk) {
                    const double r = 0.2 * gk;
                    if (cfg.eigenvalues) {
                        int cnt = 0;
                        for (const auto& lam : ev) cnt += std::abs(lam) >= 1.0 / r;
                        if (cnt > r * smu) ++grid_violations;
                    }
                }

                std::ostringstream csv;
                csv << provenance_comment(prov) << "\n";
                csv << "seed,N,L,index,singular_value";
                if (cfg.eigenvalues) csv << ",re_lambda,im_lambda";
                csv << "\n";
                for (std::size_t idx = 0; idx < sv.size(); ++idx) {
                    csv << hom.seed << ',' << n << ',' << cfg.L << ',' << idx << ','
                        << format_g17(sv[idx]);
                    if (cfg.eigenvalues)
                        csv << ',' << format_g17(ev[idx].real()) << ','
                            << format_g17(ev[idx].imag());
                    csv << "\n";
                }
                write_text_file(out / ("spectrum_N" + std::to_string(n) + "_seed" +
                                       std::to_string(s) + ".csv"),
                                csv.str());
            }
            if (n == n_sorted.front())
                c3 = *std::max_element(sum_mu_over_n.begin(), sum_mu_over_n.end());
            const double r0 = 10.0 * c3 / l1;
            // second pass for the window counts at r0 (cheap: counts only)
            const GramPairBlocks pb = gram_pair_blocks(ops);
            for (int s = 0; s < cfg.trials; ++s) {
                const RandomHom hom =
                    sample_homomorphism(static_cast<int>(ops.size()), n,
                                        mix_seed(sub, static_cast<std::uint64_t>(s)));
                ratios.push_back(static_cast<double>(weyl_count(pb, hom, r0)) / n);
            }
            nlohmann::json jn{
                {"N", n},
                {"seeds", cfg.trials},
                {"sum_mu_over_N", sum_mu_over_n},
                {"r0", r0},
                {"window_ratios", ratios},
                {"window_min", *std::min_element(ratios.begin(), ratios.end())},
                {"window_max", *std::max_element(ratios.begin(), ratios.end())}};
            if (cfg.eigenvalues)
                jn["weyl_grid_violations"] = grid_violations;
            else
                jn["weyl_grid_checked"] = false;
            per_n.push_back(jn);
        }
        summary["C3_measured"] = c3;
        summary["per_N"] = per_n;
        write_text_file(out / "weyl_summary.json", summary.dump(2) + "\n");
        std::cout << "simulate: " << n_sorted.size() << " sizes x " << cfg.trials
                  << " seeds, C3=" << format_g17(c3) << "\n";
        return 0;
    }

    if (cfg.kind == "moments") {
        const BranchSystem sys = detail::validated_system(cfg);
        const QuadratureRule quad =
            quadrature_nodes(sys.domain, cfg.n_radial, cfg.n_angular);
        const Eigen::MatrixXcd h = overlap_matrix(sys, quad);
        const int d = static_cast<int>(sys.branches.size());

        std::vector<std::vector<std::pair<Word, complexd>>> power_terms;
        std::vector<double> tau_targets;
        if (!cfg.trace_powers.empty()) {
            const std::vector<TruncatedOperator> ops = assemble_all(sys, cfg.L, quad);
            const AlgebraElement x = gram_element(ops);
            for (int p : cfg.trace_powers) {
                power_terms.push_back(power_word_traces(x, p));
                tau_targets.push_back(tau_moment(x, p));
            }
        }

        std::vector<double> targets;
        for (int k = 2; k <= cfg.k_max; ++k) targets.push_back(limit_moments_L(h, k));

        std::ostringstream table;
        table << provenance_comment(prov) << "\n";
        table << "N,k,empirical,se,target,z\n";
        nlohmann::json reports = nlohmann::json::array();
        for (int n : cfg.n_list) {
            McConfig mc;
            mc.d = d;
            mc.N = n;
            mc.L = cfg.L;
            mc.trials = cfg.trials;
            mc.master_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(n));
            mc.overlap = h;
            mc.record_words = detail::pair_words(d);
            mc.power_terms = power_terms;
            mc.threads = cfg.threads;
            const std::vector<TrialRecord> records = run_monte_carlo(mc);
            write_trial_records(out / ("trials_N" + std::to_string(n) + ".jsonl"), records);

            const MomentReport rep = estimate_moments(
                records, std::numeric_limits<double>::quiet_NaN(), cfg.k_max, targets);

            double offdiag = 0.0;
            for (int i = 0; i < d; ++i)
                for (int j = i + 1; j < d; ++j) offdiag += 2.0 * h(i, j).real();
            const double mean_target = n * limit_moments_L(h, 1) + offdiag;

            nlohmann::json entries = nlohmann::json::array();
            for (const auto& e : rep.entries) {
                entries.push_back({{"k", e.k},
                                   {"empirical", e.empirical},
                                   {"se", e.se},
                                   {"target", e.target},
                                   {"z", e.z}});
                table << n << ',' << e.k << ',' << format_g17(e.empirical) << ','
                      << format_g17(e.se) << ',' << format_g17(e.target) << ','
                      << format_g17(e.z) << "\n";
            }
            nlohmann::json jn{{"N", n},
                              {"trials", rep.trials},
                              {"mean", rep.mean},
                              {"mean_se", rep.mean_se},
                              {"mean_target", mean_target},
                              {"entries", entries}};
            if (!power_terms.empty()) {
                nlohmann::json tp = nlohmann::json::array();
                for (std::size_t ip = 0; ip < power_terms.size(); ++ip) {
                    double acc = 0.0;
                    for (const auto& r : records)
                        acc += r.trace_powers[ip];
                    acc /= static_cast<double>(records.size()) * n;
                    tp.push_back({{"p", cfg.trace_powers[ip]},
                                  {"mean_trace_over_N", acc},
                                  {"tau", tau_targets[ip]},
                                  {"abs_diff", std::abs(acc - tau_targets[ip])}});
                }
                jn["trace_powers"] = tp;
            }
            reports.push_back(jn);
        }
        nlohmann::json top{{"provenance", provenance_json(prov)}, {"per_N", reports}};
        write_text_file(out / "moment_report.json", top.dump(2) + "\n");
        write_text_file(out / "moment_report.csv", table.str());
        std::cout << "moments: " << cfg.n_list.size() << " sizes x " << cfg.trials
                  << " trials\n";
        return 0;
    }

    if (cfg.kind == "limit") {
        const BranchSystem sys = detail::validated_system(cfg);
        const QuadratureRule quad =
            quadrature_nodes(sys.domain, cfg.n_radial, cfg.n_angular);
        const std::vector<TruncatedOperator> ops = assemble_all(sys, cfg.L, quad);
        const AlgebraElement x = gram_element(ops);
        const MomentSequence seq = moment_sequence(x, cfg.p_max);

        nlohmann::json moments = nlohmann::json::array();
        for (int p = 0; p <= cfg.p_max; ++p)
            moments.push_back({{"p", p},
                               {"tau_moment", seq.values[static_cast<std::size_t>(p)]},
                               {"method", "word-convolution"},
                               {"pruning_threshold", 1e-14},
                               {"remainder_bound", 0.0}});

        // Hankel matrix of the moment sequence: positive semidefinite for a
        // Gram-form element
        const int hdim = cfg.p_max / 2 + 1;
        Eigen::MatrixXd hank(hdim, hdim);
        for (int i = 0; i < hdim; ++i)
            for (int j = 0; j < hdim; ++j)
                hank(i, j) = seq.values[static_cast<std::size_t>(i + j)];
        const std::vector<double> hev = hermitian_eigenvalues(Eigen::MatrixXcd(hank));

        nlohmann::json top{{"provenance", provenance_json(prov)},
                           {"d", x.d},
                           {"L", x.L},
                           {"moments", moments},
                           {"hankel_min_eigenvalue", hev.front()}};
        write_text_file(out / "tau.json", top.dump(2) + "\n");

        const Eigen::MatrixXcd ball = cayley_ball_matrix(x, cfg.ball_radius);
        const std::vector<double> ev = hermitian_eigenvalues(ball);
        const double lo = ev.front(), hi = ev.back();
        const int bins = 64;
        std::vector<int> counts(bins, 0);
        const double width = (hi - lo) > 0 ? (hi - lo) : 1.0;
        for (double v : ev) {
            int b = static_cast<int>((v - lo) / width * bins);
            b = std::clamp(b, 0, bins - 1);
            ++counts[static_cast<std::size_t>(b)];
        }
        std::ostringstream csv;
        csv << provenance_comment(prov) << "\n";
        csv << "bin_lo,bin_hi,count\n";
        for (int b = 0; b < bins; ++b)
            csv << format_g17(lo + width * b / bins) << ','
                << format_g17(lo + width * (b + 1) / bins) << ','
                << counts[static_cast<std::size_t>(b)] << "\n";
        write_text_file(out / "cayley_hist.csv", csv.str());
        std::cout << "limit: tau moments up to p=" << cfg.p_max << ", ball radius "
                  << cfg.ball_radius << " (dim " << ball.rows() << ")\n";
        return 0;
    }

    if (cfg.kind == "example6") {
        const Disc disc{complexd{1.0, 0.0}, 1.5};
        const AlgebraElement z0 = z0_element(disc, cfg.L);

        std::ostringstream mcsv;
        mcsv << provenance_comment(prov) << "\n";
        mcsv << "p,tau_z0,arcsine_moment,abs_diff\n";
        std::cout << "example6: p, tau(Z0^p), arcsine_moment(p), |diff|\n";
        for (int p = 1; p <= 6; ++p) {
            const double tm = tau_moment(z0, p, 8);
            const double am = arcsine_moment(p);
            mcsv << p << ',' << format_g17(tm) << ',' << format_g17(am) << ','
                 << format_g17(std::abs(tm - am)) << "\n";
            std::cout << "  " << p << "  " << format_g17(tm) << "  " << format_g17(am)
                      << "  " << format_g17(std::abs(tm - am)) << "\n";
        }
        write_text_file(out / "example6_moments.csv", mcsv.str());

        constexpr double top = 324.0 / 25.0;
        // 1e-30 realizes the open left endpoint 0+: below the resolution of the
        // closed-form antiderivative the count is the correctly rounded limit
        const std::vector<std::pair<double, double>> intervals{
            {1e-30, top}, {1.0, 12.0}, {1.0, 3.0}, {3.0, 6.0}, {6.0, 9.0}, {9.0, top}};
        std::ostringstream ccsv;
        ccsv << provenance_comment(prov) << "\n";
        ccsv << "a,b,count\n";
        for (const auto& [a, b] : intervals)
            ccsv << format_g17(a) << ',' << format_g17(b) << ','
                 << format_g17(arcsine_count(a, b)) << "\n";
        write_text_file(out / "example6_counts.csv", ccsv.str());

        // trace-norm approach of composition pairs to the rank-one limit
        std::ostringstream dcsv;
        dcsv << provenance_comment(prov) << "\n";
        dcsv << "i,j,trace_distance\n";
        for (const auto& [i, j] : std::vector<std::pair<int, int>>{
                 {2, 3}, {5, 6}, {10, 11}, {20, 21}, {50, 51}}) {
            BranchSystem sys;
            sys.domain = disc;
            sys.branches = {gauss_branch(i), gauss_branch(j)};
            validate_system(sys, cfg.boundary_samples);
            const QuadratureRule quad =
                quadrature_nodes(disc, cfg.n_radial, cfg.n_angular);
            const std::vector<TruncatedOperator> ops = assemble_all(sys, cfg.L, quad);
            dcsv << i << ',' << j << ','
                 << format_g17(delta0_distance(ops[0], ops[1], disc)) << "\n";
        }
        write_text_file(out / "example6_delta0.csv", dcsv.str());
        return 0;
    }

    fail("bad-config", "unknown kind: " + cfg.kind);
}

}  // namespace twistop
