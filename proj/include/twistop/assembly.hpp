#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "quadrature.hpp"
#include "system.hpp"

namespace twistop {

// Galerkin truncation of the weighted composition operator
//   (L_j f)(z) = e^{G(gamma_j z)} f(gamma_j z)
// in the orthonormal basis: entries[k,l] = <L_j e_l, e_k>.
struct TruncatedOperator {
    Eigen::MatrixXcd entries;
    int L{0};
    int branch{-1};
    double rho{0.0};
    double tail_bound{0.0};
    bool coarse_warning{false};
};

namespace detail {

inline void require_same_disc(const Disc& a, const Disc& b, const char* who) {
    const double scale = 1.0 + std::abs(a.center) + a.radius;
    require(std::abs(a.center - b.center) <= 1e-12 * scale &&
                std::abs(a.radius - b.radius) <= 1e-12 * scale,
            "bad-argument", std::string(who) + ": quadrature rule built on a different disc");
}

// E[n, l] = e_l(p_n); columns built by running the monomial recurrence
inline Eigen::MatrixXcd basis_matrix(const Disc& d, const std::vector<complexd>& pts, int L) {
    Eigen::MatrixXcd e(static_cast<Eigen::Index>(pts.size()), L);
    for (std::size_t n = 0; n < pts.size(); ++n) {
        const complexd u = (pts[n] - d.center) / d.radius;
        complexd m{1.0, 0.0};
        for (int l = 0; l < L; ++l) {
            e(static_cast<Eigen::Index>(n), l) =
                std::sqrt((l + 1) / std::numbers::pi) * m / d.radius;
            m *= u;
        }
    }
    return e;
}

}  // namespace detail

// Columns of the truncation obey ||column l|| <= C sqrt(l+1) rho^l (the image
// of the branch sits in a rho-fraction subdisc). The tail bound sums that
// envelope over the discarded columns l >= L, with C fitted on the computed
// ones; the coarse_warning flags a last column escaping the envelope fitted
// on the first half, which indicates an under-resolved quadrature.
inline TruncatedOperator assemble_weighted_composition(const BranchSystem& sys, int j, int L,
                                                       const QuadratureRule& quad) {
    require(sys.validation.has_value(), "unvalidated-system",
            "assemble_weighted_composition: run validate_system first");
    require(j >= 0 && j < static_cast<int>(sys.branches.size()), "bad-argument",
            "assemble_weighted_composition: branch index out of range");
    require(L >= 1, "bad-argument", "assemble_weighted_composition: L must be >= 1");
    detail::require_same_disc(sys.domain, quad.disc, "assemble_weighted_composition");

    const std::size_t nn = quad.nodes.size();
    std::vector<complexd> pts(nn), mapped(nn);
    Eigen::VectorXcd wf(static_cast<Eigen::Index>(nn));
    for (std::size_t n = 0; n < nn; ++n) {
        pts[n] = quad.nodes[n].z;
        mapped[n] = apply_map(sys.branches[j], pts[n]);
        wf[static_cast<Eigen::Index>(n)] = quad.nodes[n].w * weight_factor(sys, j, pts[n]);
    }

    Eigen::MatrixXcd e = detail::basis_matrix(sys.domain, pts, L);
    Eigen::MatrixXcd phi = detail::basis_matrix(sys.domain, mapped, L);
    phi.array().colwise() *= wf.array();

    TruncatedOperator op;
    op.entries = e.adjoint() * phi;
    op.L = L;
    op.branch = j;
    op.rho = sys.validation->branch_rhos[static_cast<std::size_t>(j)];

    const double rho = op.rho;
    auto envelope = [rho](int l) { return std::sqrt(l + 1.0) * std::pow(rho, l); };
    double c_all = 0.0, c_head = 0.0;
    for (int l = 0; l < L; ++l) {
        const double env = envelope(l);
        const double cn = op.entries.col(l).norm();
        if (env < 1e-280 || cn < 1e-280) continue;
        c_all = std::max(c_all, cn / env);
        if (l < L / 2 || L < 4) c_head = std::max(c_head, cn / env);
    }
    double tail = 0.0;
    for (int l = L; l < L + 4000000; ++l) {
        const double term = envelope(l);
        tail += term;
        if (term <= 1e-17 * tail || term < 1e-300) break;
    }
    op.tail_bound = c_all * tail;
    if (L >= 4 && c_head > 0.0)
        op.coarse_warning = op.entries.col(L - 1).norm() > 10.0 * c_head * envelope(L - 1);
    return op;
}

// H[i,j] = integral over the domain of
//   e^{G(gamma_i z)} conj(e^{G(gamma_j z)}) B(gamma_i z, gamma_j z) dm(z),
// the Hilbert-Schmidt cross-overlap of the branch operators: H[i,j] = Tr(M_j^* M_i).
inline Eigen::MatrixXcd overlap_matrix(const BranchSystem& sys, const QuadratureRule& quad) {
    require(sys.validation.has_value(), "unvalidated-system",
            "overlap_matrix: run validate_system first");
    detail::require_same_disc(sys.domain, quad.disc, "overlap_matrix");

    const int d = static_cast<int>(sys.branches.size());
    const std::size_t nn = quad.nodes.size();
    std::vector<std::vector<complexd>> mapped(d, std::vector<complexd>(nn));
    std::vector<std::vector<complexd>> wf(d, std::vector<complexd>(nn));
    for (int j = 0; j < d; ++j)
        for (std::size_t n = 0; n < nn; ++n) {
            mapped[j][n] = apply_map(sys.branches[j], quad.nodes[n].z);
            wf[j][n] = weight_factor(sys, j, quad.nodes[n].z);
        }

    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            complexd acc{0.0, 0.0};
            for (std::size_t n = 0; n < nn; ++n)
                acc += quad.nodes[n].w * wf[i][n] * std::conj(wf[j][n]) *
                       bergman_kernel(sys.domain, mapped[i][n], mapped[j][n]);
            h(i, j) = acc;
            h(j, i) = std::conj(acc);
        }
    return h;
}

inline double truncation_tail_bound(const TruncatedOperator& op) { return op.tail_bound; }

inline std::vector<TruncatedOperator> assemble_all(const BranchSystem& sys, int L,
                                                   const QuadratureRule& quad) {
    std::vector<TruncatedOperator> ops;
    ops.reserve(sys.branches.size());
    for (int j = 0; j < static_cast<int>(sys.branches.size()); ++j)
        ops.push_back(assemble_weighted_composition(sys, j, L, quad));
    return ops;
}

}  // namespace twistop
