#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "errors.hpp"
#include "prng.hpp"

namespace twistop {

// reduced word in the free group F_d: letters are signed generator indices
// (+i for a_i, -i for a_i^{-1}), with no adjacent cancelling pair
using Word = std::vector<int>;

inline Word reduce_word(const Word& w) {
    Word out;
    out.reserve(w.size());
    for (int g : w) {
        require(g != 0, "bad-argument", "reduce_word: letters are nonzero signed indices");
        if (!out.empty() && out.back() == -g)
            out.pop_back();
        else
            out.push_back(g);
    }
    return out;
}

inline Word inverse_word(const Word& w) {
    Word out;
    out.reserve(w.size());
    for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(-*it);
    return out;
}

inline Word concat_reduced(const Word& a, const Word& b) {
    Word out = a;
    for (int g : b) {
        if (!out.empty() && out.back() == -g)
            out.pop_back();
        else
            out.push_back(g);
    }
    return out;
}

// homomorphism F_d -> S_N: independent uniform permutations per generator,
// each drawn from its own counter-derived stream of the master seed
struct RandomHom {
    int d{0};
    int N{0};
    std::uint64_t seed{0};
    std::vector<std::vector<int>> gen;      // gen[i][x] = sigma_{i+1}(x)
    std::vector<std::vector<int>> gen_inv;  // inverse permutations
};

inline RandomHom sample_homomorphism(int d, int N, std::uint64_t seed) {
    require(d >= 1, "bad-argument", "sample_homomorphism: d must be >= 1");
    require(N >= 1, "bad-argument", "sample_homomorphism: N must be >= 1");
    RandomHom h;
    h.d = d;
    h.N = N;
    h.seed = seed;
    h.gen.reserve(d);
    h.gen_inv.reserve(d);
    for (int i = 0; i < d; ++i) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
        h.gen.push_back(random_permutation(N, rng));
        std::vector<int> inv(N);
        for (int x = 0; x < N; ++x) inv[h.gen.back()[x]] = x;
        h.gen_inv.push_back(std::move(inv));
    }
    return h;
}

namespace detail {

inline void require_word_in_range(const RandomHom& h, const Word& w) {
    for (int g : w)
        require(g != 0 && g <= h.d && -g <= h.d, "bad-argument",
                "word letter outside the generator range");
}

// image of x under sigma_{g_1} o sigma_{g_2} o ... o sigma_{g_m}
inline int apply_word(const RandomHom& h, const Word& w, int x) {
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        const int g = *it;
        x = g > 0 ? h.gen[g - 1][x] : h.gen_inv[-g - 1][x];
    }
    return x;
}

}  // namespace detail

inline std::vector<int> evaluate_word(const RandomHom& h, const Word& w) {
    const Word r = reduce_word(w);
    detail::require_word_in_range(h, r);
    std::vector<int> p(h.N);
    for (int x = 0; x < h.N; ++x) p[x] = detail::apply_word(h, r, x);
    return p;
}

// F_N(w) = #{x : sigma_w(x) = x}; for the empty word this is N
inline int fixed_points(const RandomHom& h, const Word& w) {
    const Word r = reduce_word(w);
    detail::require_word_in_range(h, r);
    if (r.empty()) return h.N;
    int c = 0;
    for (int x = 0; x < h.N; ++x) c += detail::apply_word(h, r, x) == x;
    return c;
}

// number of divisors of k
inline int divisor_count(int k) {
    require(k >= 1, "bad-argument", "divisor_count: k must be >= 1");
    int c = 0;
    for (int q = 1; q * q <= k; ++q)
        if (k % q == 0) c += (q * q == k) ? 1 : 2;
    return c;
}

// limit covariance of fixed-point counts of powers: sum of the divisors of gcd(k1,k2)
inline long long covariance_V(int k1, int k2) {
    require(k1 >= 1 && k2 >= 1, "bad-argument", "covariance_V: powers must be >= 1");
    const int g = std::gcd(k1, k2);
    long long s = 0;
    for (int q = 1; q <= g; ++q)
        if (g % q == 0) s += q;
    return s;
}

}  // namespace twistop
