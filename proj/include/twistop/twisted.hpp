#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "algebra.hpp"
#include "assembly.hpp"
#include "freegroup.hpp"
#include "spectra.hpp"

namespace twistop {

// dense N*L x N*L twisted transfer matrix sum_j U_{sigma_j} (x) M_j, with
// U_sigma the permutation matrix (U_sigma)_{ab} = [a == sigma(b)]
struct TwistedMatrix {
    Eigen::MatrixXcd data;
    int N{0};
    int L{0};
    int d{0};
    std::uint64_t hom_seed{0};
};

inline TwistedMatrix build_twisted_matrix(const std::vector<TruncatedOperator>& ops,
                                          const RandomHom& hom) {
    require(!ops.empty(), "bad-argument", "build_twisted_matrix: no operators");
    require(static_cast<int>(ops.size()) == hom.d, "bad-argument",
            "build_twisted_matrix: operator count differs from the homomorphism rank");
    const int L = ops[0].L;
    for (const auto& op : ops)
        require(op.L == L, "bad-argument", "build_twisted_matrix: mixed truncation sizes");

    TwistedMatrix m;
    m.N = hom.N;
    m.L = L;
    m.d = hom.d;
    m.hom_seed = hom.seed;
    m.data = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(hom.N) * L,
                                    static_cast<Eigen::Index>(hom.N) * L);
    for (int j = 0; j < hom.d; ++j)
        for (int b = 0; b < hom.N; ++b) {
            const int a = hom.gen[j][b];
            m.data.block(static_cast<Eigen::Index>(a) * L, static_cast<Eigen::Index>(b) * L,
                         L, L) += ops[j].entries;
        }
    return m;
}

inline std::vector<double> singular_values(const TwistedMatrix& m) {
    return singular_values_dense(m.data);
}

inline std::vector<complexd> eigenvalues(const TwistedMatrix& m) {
    return eigenvalues_dense(m.data);
}

// counting function N(r) = #{values >= 1/r}
inline int counting_function(const std::vector<double>& values, double r) {
    require(r > 0.0, "bad-argument", "counting_function: r must be positive");
    const double thr = 1.0 / r;
    int c = 0;
    for (double v : values) c += v >= thr;
    return c;
}

// ||L_N||_HS^2 through the trace formula
//   sum_{k1,k2} F_N(a_{k2}^{-1} a_{k1}) H[k1,k2],
// with the pair agreement count F_N(a_{k2}^{-1}a_{k1}) = #{x : sigma_{k1}(x) = sigma_{k2}(x)}
inline double hs_norm_trace_formula(const Eigen::MatrixXcd& h, const RandomHom& hom) {
    require(h.rows() == h.cols() && h.rows() == hom.d, "bad-argument",
            "hs_norm_trace_formula: overlap matrix size differs from the homomorphism rank");
    complexd acc{0.0, 0.0};
    for (int k1 = 0; k1 < hom.d; ++k1)
        for (int k2 = 0; k2 < hom.d; ++k2) {
            int f = 0;
            if (k1 == k2) {
                f = hom.N;
            } else {
                const auto& p1 = hom.gen[k1];
                const auto& p2 = hom.gen[k2];
                for (int x = 0; x < hom.N; ++x) f += p1[x] == p2[x];
            }
            acc += static_cast<double>(f) * h(k1, k2);
        }
    require(std::abs(acc.imag()) <= 1e-10 * (1.0 + std::abs(acc.real())), "not-real",
            "hs_norm_trace_formula: imaginary residue above tolerance");
    return acc.real();
}

namespace detail {

// isometry C^{N-1} -> V_N = {sum of coordinates = 0} (Helmert columns)
inline Eigen::MatrixXd helmert_columns(int n) {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n - 1);
    for (int k = 1; k < n; ++k) {
        const double s = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
        for (int i = 0; i < k; ++i) q(i, k - 1) = s;
        q(k, k - 1) = -static_cast<double>(k) * s;
    }
    return q;
}

}  // namespace detail

// compression of the twisted matrix to V_N (x) H^2_L; the twisted matrix
// leaves V_N (x) H^2_L invariant because permutation matrices fix the
// all-ones vector
inline Eigen::MatrixXcd restrict_to_VN(const TwistedMatrix& m) {
    require(m.N >= 2, "bad-argument", "restrict_to_VN: need N >= 2");
    const Eigen::MatrixXd q = detail::helmert_columns(m.N);
    Eigen::MatrixXcd qk = Eigen::MatrixXcd::Zero(m.data.rows(),
                                                 static_cast<Eigen::Index>(m.N - 1) * m.L);
    for (int i = 0; i < m.N; ++i)
        for (int k = 0; k < m.N - 1; ++k)
            if (q(i, k) != 0.0)
                qk.block(static_cast<Eigen::Index>(i) * m.L,
                         static_cast<Eigen::Index>(k) * m.L, m.L, m.L) =
                    q(i, k) * Eigen::MatrixXcd::Identity(m.L, m.L);
    return qk.adjoint() * m.data * qk;
}

// norm of the constants-to-V_N coupling block; zero in exact arithmetic
inline double constant_block_residual(const TwistedMatrix& m) {
    require(m.N >= 2, "bad-argument", "constant_block_residual: need N >= 2");
    const Eigen::MatrixXd q = detail::helmert_columns(m.N);
    const double c0 = 1.0 / std::sqrt(static_cast<double>(m.N));
    Eigen::MatrixXcd ones_block = Eigen::MatrixXcd::Zero(m.data.rows(), m.L);
    for (int i = 0; i < m.N; ++i)
        ones_block.block(static_cast<Eigen::Index>(i) * m.L, 0, m.L, m.L) =
            c0 * Eigen::MatrixXcd::Identity(m.L, m.L);
    Eigen::MatrixXcd qk = Eigen::MatrixXcd::Zero(m.data.rows(),
                                                 static_cast<Eigen::Index>(m.N - 1) * m.L);
    for (int i = 0; i < m.N; ++i)
        for (int k = 0; k < m.N - 1; ++k)
            if (q(i, k) != 0.0)
                qk.block(static_cast<Eigen::Index>(i) * m.L,
                         static_cast<Eigen::Index>(k) * m.L, m.L, m.L) =
                    q(i, k) * Eigen::MatrixXcd::Identity(m.L, m.L);
    return (ones_block.adjoint() * m.data * qk).norm();
}

// Tr(pi_N(w)|V_N) = F_N(w) - 1, so for X^p = sum_w A_w lambda(w):
//   Tr((pi_N(X)|V_N)^p) = sum_w Tr(A_w) (F_N(w) - 1).
// The word/trace list is homomorphism-independent; evaluate it per trial.
inline double trace_power_from_terms(const std::vector<std::pair<Word, complexd>>& terms,
                                     const RandomHom& hom) {
    complexd acc{0.0, 0.0};
    for (const auto& [w, tr] : terms)
        acc += tr * static_cast<double>(fixed_points(hom, w) - 1);
    require(std::abs(acc.imag()) <= 1e-8 * (1.0 + std::abs(acc.real())), "not-real",
            "trace_power_from_terms: imaginary residue above tolerance");
    return acc.real();
}

inline double trace_power_restricted(const AlgebraElement& x, const RandomHom& hom, int p,
                                     int p_cap = 8) {
    require(p >= 1, "bad-argument", "trace_power_restricted: power must be >= 1");
    require(p <= p_cap, "moment-power-cap",
            "trace_power_restricted: power exceeds the configured cap");
    require(x.d == hom.d, "bad-argument",
            "trace_power_restricted: element rank differs from the homomorphism rank");
    return trace_power_from_terms(power_word_traces(x, p), hom);
}

// pair products P[i*d+j] = M_i^* M_j, precomputed once and reused across
// Monte Carlo seeds when only counts of singular values are needed
struct GramPairBlocks {
    int d{0};
    int L{0};
    bool real{false};
    std::vector<Eigen::MatrixXcd> p;
    std::vector<Eigen::MatrixXd> pr;
};

inline GramPairBlocks gram_pair_blocks(const std::vector<TruncatedOperator>& ops) {
    require(!ops.empty(), "bad-argument", "gram_pair_blocks: no operators");
    GramPairBlocks g;
    g.d = static_cast<int>(ops.size());
    g.L = ops[0].L;
    g.real = true;
    for (const auto& op : ops) {
        require(op.L == g.L, "bad-argument", "gram_pair_blocks: mixed truncation sizes");
        g.real = g.real && effectively_real(op.entries);
    }
    for (int i = 0; i < g.d; ++i)
        for (int j = 0; j < g.d; ++j)
            g.p.push_back(ops[i].entries.adjoint() * ops[j].entries);
    if (g.real)
        for (const auto& m : g.p) g.pr.emplace_back(m.real());
    return g;
}

// A = L_N^* L_N assembled block-sparse: block (b1, b2) += P_ij exactly when
// sigma_j^{-1}(sigma_i(b1)) = b2. Only d^2 blocks per block-row are nonzero,
// so assembly is O(d^2 N L^2) while the factorization dominates.
template <class Mat, class Block>
void fill_gram_product(Mat& a, const std::vector<Block>& p, const RandomHom& hom, int L) {
    const int d = hom.d;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const auto& blk = p[static_cast<std::size_t>(i) * d + j];
            for (int b1 = 0; b1 < hom.N; ++b1) {
                const int b2 = hom.gen_inv[j][hom.gen[i][b1]];
                a.block(static_cast<Eigen::Index>(b1) * L, static_cast<Eigen::Index>(b2) * L,
                        L, L) += blk;
            }
        }
}

inline Eigen::MatrixXcd gram_product_matrix(const std::vector<TruncatedOperator>& ops,
                                            const RandomHom& hom) {
    const GramPairBlocks g = gram_pair_blocks(ops);
    require(g.d == hom.d, "bad-argument",
            "gram_product_matrix: operator count differs from the homomorphism rank");
    const auto n = static_cast<Eigen::Index>(hom.N) * g.L;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
    fill_gram_product(a, g.p, hom, g.L);
    return a;
}

// #{singular values of L_N >= 1/r} computed as the inertia count of
// L_N^* L_N - (1/r)^2 I, without forming L_N or its SVD
inline int weyl_count(const GramPairBlocks& g, const RandomHom& hom, double r) {
    require(r > 0.0, "bad-argument", "weyl_count: r must be positive");
    require(g.d == hom.d, "bad-argument",
            "weyl_count: pair blocks rank differs from the homomorphism rank");
    const auto n = static_cast<Eigen::Index>(hom.N) * g.L;
    const double t = 1.0 / (r * r);
    if (g.real) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        fill_gram_product(a, g.pr, hom, g.L);
        return count_eigenvalues_above(std::move(a), t);
    }
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
    fill_gram_product(a, g.p, hom, g.L);
    return count_eigenvalues_above(std::move(a), t);
}

}  // namespace twistop
