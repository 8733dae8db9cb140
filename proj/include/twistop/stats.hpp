#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "combinatorics.hpp"
#include "twisted.hpp"

namespace twistop {

// limit moments of the Hilbert-Schmidt fluctuation X_N = ||L_N||_HS^2 - E,
// driven by independent Poisson(1) agreement counts per branch pair:
//   L1 = sum_j H_jj                     (mean scale: E ||L_N||^2 ~ N L1)
//   L2 = 4 sum_{i<j} (Re H_ij)^2
//   L3 = 8 sum_{i<j} (Re H_ij)^3
//   L4 = 16 sum_{i<j} (Re H_ij)^4 + 48 (sum_{i<j} (Re H_ij)^2)^2
inline double limit_moments_L(const Eigen::MatrixXcd& h, int k) {
    require(h.rows() == h.cols(), "bad-argument", "limit_moments_L: square matrix required");
    require(k >= 1 && k <= 4, "bad-argument", "limit_moments_L: k must be in 1..4");
    const int d = static_cast<int>(h.rows());
    if (k == 1) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += h(j, j).real();
        return s;
    }
    double s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            const double x = h(i, j).real();
            s2 += x * x;
            s3 += x * x * x;
            s4 += x * x * x * x;
        }
    if (k == 2) return 4.0 * s2;
    if (k == 3) return 8.0 * s3;
    return 16.0 * s4 + 48.0 * s2 * s2;
}

struct TrialRecord {
    std::uint64_t seed{0};
    int N{0}, d{0}, L{0};
    double hs_norm_sq{0.0};
    std::vector<std::pair<Word, int>> fixed_point_counts;
    std::vector<double> trace_powers;
};

struct McConfig {
    int d{2};
    int N{100};
    int L{0};
    int trials{100};
    std::uint64_t master_seed{1};
    Eigen::MatrixXcd overlap;  // d x d quadrature overlap matrix
    std::vector<Word> record_words;
    std::vector<std::vector<std::pair<Word, complexd>>> power_terms;
    int threads{1};
};

// Trial t draws its homomorphism from seed mix_seed(master_seed, t), so the
// record list is prefix-stable: growing `trials` appends, never reshuffles.
inline std::vector<TrialRecord> run_monte_carlo(const McConfig& cfg) {
    require(cfg.trials >= 1, "bad-argument", "run_monte_carlo: trials must be >= 1");
    require(cfg.overlap.rows() == cfg.d && cfg.overlap.cols() == cfg.d, "bad-argument",
            "run_monte_carlo: overlap matrix size differs from d");

    std::vector<TrialRecord> records(static_cast<std::size_t>(cfg.trials));
    auto worker = [&](int lo, int hi) {
        for (int t = lo; t < hi; ++t) {
            TrialRecord rec;
            rec.seed = mix_seed(cfg.master_seed, static_cast<std::uint64_t>(t));
            rec.N = cfg.N;
            rec.d = cfg.d;
            rec.L = cfg.L;
            const RandomHom hom = sample_homomorphism(cfg.d, cfg.N, rec.seed);
            rec.hs_norm_sq = hs_norm_trace_formula(cfg.overlap, hom);
            rec.fixed_point_counts.reserve(cfg.record_words.size());
            for (const auto& w : cfg.record_words)
                rec.fixed_point_counts.emplace_back(w, fixed_points(hom, w));
            rec.trace_powers.reserve(cfg.power_terms.size());
            for (const auto& terms : cfg.power_terms)
                rec.trace_powers.push_back(trace_power_from_terms(terms, hom));
            records[static_cast<std::size_t>(t)] = std::move(rec);
        }
    };

    const int threads = std::max(1, cfg.threads);
    if (threads == 1 || cfg.trials < 2 * threads) {
        worker(0, cfg.trials);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (cfg.trials + threads - 1) / threads;
        for (int k = 0; k < threads; ++k) {
            const int lo = k * chunk;
            const int hi = std::min(cfg.trials, lo + chunk);
            if (lo < hi) pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    return records;
}

struct MomentEntry {
    int k{0};
    double empirical{0.0};
    double se{0.0};
    double target{std::numeric_limits<double>::quiet_NaN()};
    double z{std::numeric_limits<double>::quiet_NaN()};
};

struct MomentReport {
    int trials{0};
    double mean{0.0};
    double mean_se{0.0};
    std::vector<MomentEntry> entries;
};

// Centered sample moments with leave-one-out jackknife standard errors.
// `centering` = NaN means "center at the empirical mean", re-centered inside
// every jackknife replicate; an explicit value keeps the center fixed.
inline MomentReport estimate_moments_scalar(const std::vector<double>& xs, double centering,
                                            int k_max,
                                            const std::vector<double>& targets = {}) {
    const int t = static_cast<int>(xs.size());
    require(t >= 2, "too-few-trials", "estimate_moments: need at least two trials");
    require(k_max >= 2 && k_max <= 8, "bad-argument", "estimate_moments: k_max must be in 2..8");

    const bool empirical_center = std::isnan(centering);
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= t;
    const double center = empirical_center ? mean : centering;

    // power sums of the centered sample
    std::vector<double> y(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) y[i] = xs[i] - center;
    std::vector<double> s(static_cast<std::size_t>(k_max) + 1, 0.0);
    s[0] = t;
    for (double v : y) {
        double p = 1.0;
        for (int m = 1; m <= k_max; ++m) {
            p *= v;
            s[static_cast<std::size_t>(m)] += p;
        }
    }

    MomentReport rep;
    rep.trials = t;
    rep.mean = mean;
    {
        const double var = std::max(0.0, s[2] / t - (s[1] / t) * (s[1] / t));
        rep.mean_se = std::sqrt(var / t);
    }

    for (int k = 2; k <= k_max; ++k) {
        MomentEntry e;
        e.k = k;
        if (empirical_center) {
            // full-sample estimate recentered at the mean (s[1]/t above the center)
            const double mu = s[1] / t;
            double acc = 0.0;
            for (int m = 0; m <= k; ++m)
                acc += binomial(k, m) * s[static_cast<std::size_t>(m)] *
                       std::pow(-mu, static_cast<double>(k - m));
            e.empirical = acc / t;
        } else {
            e.empirical = s[static_cast<std::size_t>(k)] / t;
        }

        // jackknife replicates from the power sums
        double th_sum = 0.0, th_sq = 0.0;
        for (int i = 0; i < t; ++i) {
            const double v = y[static_cast<std::size_t>(i)];
            double theta;
            if (empirical_center) {
                const double mu_i = (s[1] - v) / (t - 1);
                double acc = 0.0, vp = 1.0;
                for (int m = 0; m <= k; ++m) {
                    acc += binomial(k, m) * (s[static_cast<std::size_t>(m)] - vp) *
                           std::pow(-mu_i, static_cast<double>(k - m));
                    vp *= v;
                }
                theta = acc / (t - 1);
            } else {
                double vk = 1.0;
                for (int m = 0; m < k; ++m) vk *= v;
                theta = (s[static_cast<std::size_t>(k)] - vk) / (t - 1);
            }
            th_sum += theta;
            th_sq += theta * theta;
        }
        const double th_mean = th_sum / t;
        const double var_j = std::max(0.0, (th_sq / t - th_mean * th_mean));
        e.se = std::sqrt(var_j * (t - 1));

        if (static_cast<std::size_t>(k - 2) < targets.size()) {
            e.target = targets[static_cast<std::size_t>(k - 2)];
            e.z = e.se > 0.0 ? (e.empirical - e.target) / e.se
                             : std::numeric_limits<double>::infinity();
        }
        rep.entries.push_back(e);
    }
    return rep;
}

inline MomentReport estimate_moments(const std::vector<TrialRecord>& records, double centering,
                                     int k_max, const std::vector<double>& targets = {}) {
    std::vector<double> xs;
    xs.reserve(records.size());
    for (const auto& r : records) xs.push_back(r.hs_norm_sq);
    return estimate_moments_scalar(xs, centering, k_max, targets);
}

}  // namespace twistop
