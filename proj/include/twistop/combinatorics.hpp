#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"

namespace twistop {

inline constexpr int combinatorics_k_cap = 25;  // Bell(25) still fits in 64 bits

// Bell numbers by the Bell triangle; exact integers
inline std::uint64_t bell(int k) {
    require(k >= 0 && k <= combinatorics_k_cap, "bad-argument", "bell: k outside exact range");
    std::vector<std::uint64_t> row{1};
    for (int i = 1; i <= k; ++i) {
        std::vector<std::uint64_t> next{row.back()};
        for (std::uint64_t v : row) next.push_back(next.back() + v);
        row = std::move(next);
    }
    return row.front();
}

// Stirling numbers of the second kind S(k, l)
inline std::uint64_t stirling(int k, int l) {
    require(k >= 0 && k <= combinatorics_k_cap && l >= 0, "bad-argument",
            "stirling: arguments outside exact range");
    if (l > k) return 0;
    if (k == 0) return l == 0 ? 1 : 0;
    if (l == 0) return 0;
    std::vector<std::uint64_t> prev(static_cast<std::size_t>(k) + 1, 0), cur;
    prev[0] = 1;  // row k = 0
    for (int n = 1; n <= k; ++n) {
        cur.assign(static_cast<std::size_t>(k) + 1, 0);
        for (int m = 1; m <= n; ++m)
            cur[static_cast<std::size_t>(m)] =
                static_cast<std::uint64_t>(m) * prev[static_cast<std::size_t>(m)] +
                prev[static_cast<std::size_t>(m) - 1];
        prev = cur;
    }
    return prev[static_cast<std::size_t>(l)];
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    long double b = 1.0L;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return static_cast<double>(b);
}

// E[Z^k] for Z ~ Poisson(lambda): sum_l S(k,l) lambda^l
inline double poisson_moment(double lambda, int k) {
    require(k >= 0 && k <= combinatorics_k_cap, "bad-argument",
            "poisson_moment: k outside exact range");
    double acc = 0.0, lp = 1.0;
    for (int l = 0; l <= k; ++l) {
        acc += static_cast<double>(stirling(k, l)) * lp;
        lp *= lambda;
    }
    return acc;
}

// raw k-th moment of sum_i alpha_i Z_i with independent Z_i ~ Poisson(1):
//   k! sum_{l_1+...+l_m = k} prod_i alpha_i^{l_i} B_{l_i} / l_i!
// enumerated over compositions of k into m nonnegative parts
inline double poisson_combo_moment(const std::vector<double>& alphas, int k) {
    require(k >= 0 && k <= 12, "bad-argument", "poisson_combo_moment: k outside exact range");
    require(alphas.size() <= 10, "bad-argument", "poisson_combo_moment: too many weights");
    const int m = static_cast<int>(alphas.size());
    if (m == 0) return k == 0 ? 1.0 : 0.0;

    std::vector<double> fact(static_cast<std::size_t>(k) + 1, 1.0);
    for (int i = 1; i <= k; ++i)
        fact[static_cast<std::size_t>(i)] = fact[static_cast<std::size_t>(i) - 1] * i;

    double total = 0.0;
    // depth-first over compositions l_1 + ... + l_m = k
    auto rec = [&](auto&& self, int i, int rem, double partial) -> void {
        if (i == m - 1) {
            const double term =
                partial * std::pow(alphas[static_cast<std::size_t>(i)], rem) *
                static_cast<double>(bell(rem)) / fact[static_cast<std::size_t>(rem)];
            total += term;
            return;
        }
        for (int li = 0; li <= rem; ++li) {
            const double term =
                std::pow(alphas[static_cast<std::size_t>(i)], li) *
                static_cast<double>(bell(li)) / fact[static_cast<std::size_t>(li)];
            self(self, i + 1, rem - li, partial * term);
        }
    };
    rec(rec, 0, k, 1.0);
    return fact[static_cast<std::size_t>(k)] * total;
}

// central k-th moment of sum_i alpha_i (Z_i - 1): binomial shift of the raw
// moments by the mean sum_i alpha_i
inline double poisson_combo_central_moment(const std::vector<double>& alphas, int k) {
    double mean = 0.0;
    for (double a : alphas) mean += a;
    double acc = 0.0;
    for (int i = 0; i <= k; ++i)
        acc += binomial(k, i) * poisson_combo_moment(alphas, i) *
               std::pow(-mean, static_cast<double>(k - i));
    return acc;
}

}  // namespace twistop
