#pragma once

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "assembly.hpp"
#include "freegroup.hpp"
#include "spectra.hpp"

namespace twistop {

// finitely supported element X = sum_w A_w (x) lambda(w) of the
// H^2-operator-coefficient free group algebra, A_w truncated to L x L.
// std::map keeps the support in a deterministic (shortlex-free, but fixed)
// order, which makes every downstream reduction reproducible.
struct AlgebraElement {
    int d{0};
    int L{0};
    std::map<Word, Eigen::MatrixXcd> terms;
};

inline AlgebraElement identity_element(int d, int L) {
    AlgebraElement x{d, L, {}};
    x.terms[{}] = Eigen::MatrixXcd::Identity(L, L);
    return x;
}

// X = L*L in coefficient form: A_e = sum_j M_j^* M_j and, for i != j,
// A_{a_i^{-1} a_j} = M_i^* M_j
inline AlgebraElement gram_element(const std::vector<TruncatedOperator>& ops) {
    require(!ops.empty(), "bad-argument", "gram_element: no operators");
    const int d = static_cast<int>(ops.size());
    const int L = ops[0].L;
    for (const auto& op : ops)
        require(op.L == L, "bad-argument", "gram_element: mixed truncation sizes");
    AlgebraElement x{d, L, {}};
    Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(L, L);
    for (int j = 0; j < d; ++j) diag += ops[j].entries.adjoint() * ops[j].entries;
    x.terms[{}] = diag;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (i == j) continue;
            x.terms[Word{-(i + 1), j + 1}] = ops[i].entries.adjoint() * ops[j].entries;
        }
    return x;
}

inline constexpr std::size_t algebra_support_cap = 1000000;

// convolution product with free reduction; coefficient blocks whose Frobenius
// norm falls below `prune` are dropped to keep the support finite
inline AlgebraElement algebra_mul(const AlgebraElement& x, const AlgebraElement& y,
                                  double prune = 1e-14) {
    require(x.d == y.d && x.L == y.L, "bad-argument", "algebra_mul: mismatched elements");
    AlgebraElement r{x.d, x.L, {}};
    for (const auto& [wx, ax] : x.terms)
        for (const auto& [wy, ay] : y.terms) {
            Word w = concat_reduced(wx, wy);
            auto it = r.terms.find(w);
            if (it == r.terms.end()) {
                r.terms.emplace(std::move(w), ax * ay);
                require(r.terms.size() <= algebra_support_cap, "algebra-too-large",
                        "algebra_mul: support cap exceeded");
            } else {
                it->second += ax * ay;
            }
        }
    for (auto it = r.terms.begin(); it != r.terms.end();)
        it = it->second.norm() < prune ? r.terms.erase(it) : std::next(it);
    return r;
}

inline AlgebraElement adjoint_element(const AlgebraElement& x) {
    AlgebraElement r{x.d, x.L, {}};
    for (const auto& [w, a] : x.terms) r.terms[inverse_word(w)] = a.adjoint();
    return r;
}

inline AlgebraElement scale_element(const AlgebraElement& x, complexd s) {
    AlgebraElement r = x;
    for (auto& [w, a] : r.terms) a *= s;
    return r;
}

inline AlgebraElement add_elements(const AlgebraElement& x, const AlgebraElement& y) {
    require(x.d == y.d && x.L == y.L, "bad-argument", "add_elements: mismatched elements");
    AlgebraElement r = x;
    for (const auto& [w, a] : y.terms) {
        auto it = r.terms.find(w);
        if (it == r.terms.end())
            r.terms.emplace(w, a);
        else
            it->second += a;
    }
    return r;
}

// tau(X) = Tr(A_e): the trace against the vacuum vector of the left regular
// representation, semifinite in the H^2 leg
inline complexd tau(const AlgebraElement& x) {
    const auto it = x.terms.find(Word{});
    return it == x.terms.end() ? complexd{0.0, 0.0} : it->second.trace();
}

inline double real_checked(complexd v, const char* who) {
    require(std::abs(v.imag()) <= 1e-8 * (1.0 + std::abs(v.real())), "not-real",
            std::string(who) + ": imaginary residue above tolerance");
    return v.real();
}

// tau(X^p) for self-adjoint X, by repeated convolution with pruning
inline double tau_moment(const AlgebraElement& x, int p, int p_cap = 8, double prune = 1e-14) {
    require(p >= 0, "bad-argument", "tau_moment: negative power");
    require(p <= p_cap, "moment-power-cap", "tau_moment: power exceeds the configured cap");
    if (p == 0) return static_cast<double>(x.L);
    AlgebraElement acc = x;
    for (int k = 1; k < p; ++k) acc = algebra_mul(acc, x, prune);
    return real_checked(tau(acc), "tau_moment");
}

// m_0..m_pmax with shared partial products
struct MomentSequence {
    std::vector<double> values;  // values[p] = tau(X^p)
};

inline MomentSequence moment_sequence(const AlgebraElement& x, int pmax, double prune = 1e-14) {
    require(pmax >= 0, "bad-argument", "moment_sequence: negative power");
    MomentSequence seq;
    seq.values.push_back(static_cast<double>(x.L));
    if (pmax == 0) return seq;
    AlgebraElement acc = x;
    seq.values.push_back(real_checked(tau(acc), "moment_sequence"));
    for (int p = 2; p <= pmax; ++p) {
        acc = algebra_mul(acc, x, prune);
        seq.values.push_back(real_checked(tau(acc), "moment_sequence"));
    }
    return seq;
}

// support of X^p with the coefficient traces only: the homomorphism-independent
// part of E[Tr pi_N(X^p)], reusable across Monte Carlo trials
inline std::vector<std::pair<Word, complexd>> power_word_traces(const AlgebraElement& x, int p,
                                                                double prune = 1e-14) {
    require(p >= 1, "bad-argument", "power_word_traces: power must be >= 1");
    AlgebraElement acc = x;
    for (int k = 1; k < p; ++k) acc = algebra_mul(acc, x, prune);
    std::vector<std::pair<Word, complexd>> out;
    out.reserve(acc.terms.size());
    for (const auto& [w, a] : acc.terms) out.emplace_back(w, a.trace());
    return out;
}

// sum over the support of X of Tr(A^X_w A^Y_{w^{-1}}): tau(X Y) without
// forming the full product
inline complexd tau_product(const AlgebraElement& x, const AlgebraElement& y) {
    require(x.d == y.d && x.L == y.L, "bad-argument", "tau_product: mismatched elements");
    complexd acc{0.0, 0.0};
    for (const auto& [w, a] : x.terms) {
        const auto it = y.terms.find(inverse_word(w));
        if (it != y.terms.end()) acc += (a * it->second).trace();
    }
    return acc;
}

inline double spectral_mass(const AlgebraElement& x) {
    double m = 0.0;
    for (const auto& [w, a] : x.terms) m += singular_values_dense(a).front();
    return m;
}

struct SmoothedTrace {
    double value;
    double remainder;
};

inline constexpr int tau_smooth_degree_cap = 4096;
inline constexpr std::size_t tau_smooth_support_cap = 200000;

// tau(X psi(X)) for self-adjoint X with spectrum in [0, K], psi given by its
// Chebyshev coefficients on [0, K] (psi(x) = sum_n c_n T_n(2x/K - 1)).
// psi(0) = 0 is enforced by construction: the constant sum_n c_n T_n(-1) is
// subtracted from c_0. Returns the partial sum at `degree` plus the
// truncation remainder bound (tail coefficient sum x tau(X), the measure mass).
inline SmoothedTrace tau_smooth(const AlgebraElement& x, std::vector<double> cheb, double K,
                                int degree, double prune = 1e-14) {
    require(K > 0.0, "bad-argument", "tau_smooth: K must be positive");
    require(degree >= 0 && degree <= tau_smooth_degree_cap, "degree-cap",
            "tau_smooth: degree outside the supported range");
    require(!cheb.empty(), "bad-argument", "tau_smooth: empty coefficient list");
    require(K + 1e-9 >= spectral_mass(x), "bad-argument",
            "tau_smooth: K below the spectral enclosure sum ||A_w||");

    double at0 = 0.0;
    for (std::size_t n = 0; n < cheb.size(); ++n) at0 += (n % 2 == 0 ? cheb[n] : -cheb[n]);
    cheb[0] -= at0;

    const double mass = std::abs(tau(x));
    const int deg = std::min<int>(degree, static_cast<int>(cheb.size()) - 1);
    double remainder = 0.0;
    for (std::size_t n = static_cast<std::size_t>(deg) + 1; n < cheb.size(); ++n)
        remainder += std::abs(cheb[n]);
    remainder *= mass;

    // y = (2/K) x - 1; three-term recurrence T_{n+1} = 2 y T_n - T_{n-1}
    AlgebraElement y = scale_element(x, complexd(2.0 / K, 0.0));
    {
        auto it = y.terms.find(Word{});
        if (it == y.terms.end())
            y.terms[{}] = -Eigen::MatrixXcd::Identity(y.L, y.L);
        else
            it->second -= Eigen::MatrixXcd::Identity(y.L, y.L);
    }

    AlgebraElement tprev = identity_element(x.d, x.L);
    double value = cheb[0] * real_checked(tau_product(x, tprev), "tau_smooth");
    if (deg == 0) return {value, remainder};

    AlgebraElement tcur = y;
    value += cheb[1] * real_checked(tau_product(x, tcur), "tau_smooth");
    for (int n = 2; n <= deg; ++n) {
        AlgebraElement tnext =
            add_elements(scale_element(algebra_mul(y, tcur, prune), 2.0), scale_element(tprev, -1.0));
        for (auto it = tnext.terms.begin(); it != tnext.terms.end();)
            it = it->second.norm() < prune ? tnext.terms.erase(it) : std::next(it);
        require(tnext.terms.size() <= tau_smooth_support_cap, "support-explosion",
                "tau_smooth: recurrence support exceeded the cap");
        tprev = std::move(tcur);
        tcur = std::move(tnext);
        value += cheb[static_cast<std::size_t>(n)] *
                 real_checked(tau_product(x, tcur), "tau_smooth");
    }
    return {value, remainder};
}

// enumerate the ball {|w| <= R} of F_d in breadth-first order; the word at
// index 0 is the identity
inline std::vector<Word> ball_words(int d, int R) {
    require(d >= 1 && R >= 0, "bad-argument", "ball_words: bad parameters");
    std::vector<Word> words{Word{}};
    std::size_t level_begin = 0;
    for (int k = 0; k < R; ++k) {
        const std::size_t level_end = words.size();
        for (std::size_t i = level_begin; i < level_end; ++i)
            for (int g = 1; g <= d; ++g)
                for (int sg : {g, -g}) {
                    if (!words[i].empty() && words[i].back() == -sg) continue;
                    Word w = words[i];
                    w.push_back(sg);
                    words.push_back(std::move(w));
                }
        level_begin = level_end;
    }
    return words;
}

inline constexpr std::size_t cayley_ball_dim_cap = 20000;

// left-multiplication matrix of X on the span of {f (x) delta_g : |g| <= R};
// block (h, g) = A_w whenever w g = h inside the ball. Finite Cayley-ball
// sketch of lambda(X); its central block reproduces tau_moment exactly for
// R >= p * maxlen by locality of convolution on the tree.
inline Eigen::MatrixXcd cayley_ball_matrix(const AlgebraElement& x, int R) {
    require(R >= 1, "bad-argument", "cayley_ball_matrix: R must be >= 1");
    const std::vector<Word> words = ball_words(x.d, R);
    require(words.size() * static_cast<std::size_t>(x.L) <= cayley_ball_dim_cap,
            "ball-too-large", "cayley_ball_matrix: matrix dimension exceeds the cap");
    std::map<Word, int> index;
    for (std::size_t i = 0; i < words.size(); ++i) index[words[i]] = static_cast<int>(i);

    const int L = x.L;
    const auto n = static_cast<Eigen::Index>(words.size()) * L;
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t ig = 0; ig < words.size(); ++ig)
        for (const auto& [w, a] : x.terms) {
            const Word h = concat_reduced(w, words[ig]);
            const auto it = index.find(h);
            if (it == index.end()) continue;
            b.block(static_cast<Eigen::Index>(it->second) * L,
                    static_cast<Eigen::Index>(ig) * L, L, L) += a;
        }
    return b;
}

}  // namespace twistop
