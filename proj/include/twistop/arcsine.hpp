#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "algebra.hpp"
#include "assembly.hpp"
#include "disc.hpp"
#include "spectra.hpp"

namespace twistop {

// rank-one limit of high-index composition pairs: the operator
//   (delta_0 f)(z) = Vol(D) B(z,0) <f, B(.,0)>
// truncated to the basis, entries[k,l] = Vol * e_l(0) conj(e_k(0)).
// Its single nonzero eigenvalue is Vol * B(0,0); on D(1,3/2) that is 81/25.
inline Eigen::MatrixXcd delta0_matrix(const Disc& d, int L) {
    require(L >= 1, "bad-argument", "delta0_matrix: L must be >= 1");
    require_strict_interior(d, complexd{0.0, 0.0}, "delta0_matrix");
    Eigen::VectorXcd u(L);
    for (int k = 0; k < L; ++k) u[k] = std::conj(basis_eval(d, k, complexd{0.0, 0.0}));
    return d.area() * (u * u.adjoint());
}

// Z0 = delta_0 (x) (2 e + u + u^{-1}) with u = a_1^{-1} a_2: the explicit
// limit element whose tracial spectral data is the shifted arcsine law
inline AlgebraElement z0_element(const Disc& d, int L) {
    const Eigen::MatrixXcd d0 = delta0_matrix(d, L);
    AlgebraElement z{2, L, {}};
    z.terms[Word{}] = 2.0 * d0;
    z.terms[Word{-1, 2}] = d0;
    z.terms[Word{-2, 1}] = d0;
    return z;
}

// tau-weighted spectral density of Z0 on D(1,3/2):
//   d mu_{Z0}(x) = (25/(81 pi)) x / sqrt(4 - (25x/81 - 2)^2) dx on [0, 324/25].
// The probability-normalized spectral distribution of Z0 is d mu / x.
inline double arcsine_density(double x) {
    constexpr double top = 324.0 / 25.0;
    if (x <= 0.0 || x >= top) return 0.0;
    const double t = 25.0 * x / 81.0 - 2.0;
    return (25.0 / (81.0 * std::numbers::pi)) * x / std::sqrt(4.0 - t * t);
}

namespace detail {

inline double binomial_ld(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    long double b = 1.0L;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return static_cast<double>(b);
}

}  // namespace detail

// p-th moment of the spectral distribution d mu_{Z0} / x, equal to tau(Z0^p):
//   (81/25)^p sum_{k even <= p} C(p,k) 2^(p-k) C(k, k/2)
// (odd Haar-unitary moments vanish; even ones are central binomials)
inline double arcsine_moment(int p) {
    require(p >= 0, "bad-argument", "arcsine_moment: negative power");
    long double s = 0.0L;
    for (int k = 0; k <= p; k += 2)
        s += static_cast<long double>(detail::binomial_ld(p, k)) *
             std::pow(2.0L, p - k) * detail::binomial_ld(k, k / 2);
    return static_cast<double>(std::pow(81.0L / 25.0L, p) * s);
}

// mass of d mu_{Z0} / x on [a, b]:
//   (1/pi) [ arcsin((25b - 162)/162) - arcsin((25a - 162)/162) ]
inline double arcsine_count(double a, double b) {
    constexpr double top = 324.0 / 25.0;
    require(0.0 < a && a < b && b <= top * (1.0 + 1e-12), "bad-argument",
            "arcsine_count: need 0 < a < b <= 324/25");
    auto prim = [](double x) {
        return std::asin(std::clamp((25.0 * x - 162.0) / 162.0, -1.0, 1.0));
    };
    return (prim(b) - prim(a)) / std::numbers::pi;
}

// tau((U + U*)^k) for a Haar unitary U: 0 for odd k, C(k, k/2) for even k
inline double haar_sum_moment(int k) {
    require(k >= 0, "bad-argument", "haar_sum_moment: negative power");
    if (k % 2 == 1) return 0.0;
    return detail::binomial_ld(k, k / 2);
}

// trace-norm distance || M_i^* M_j - delta_0 ||_1 between a composition pair
// and the rank-one limit; decreases as the branch indices grow
inline double delta0_distance(const TruncatedOperator& mi, const TruncatedOperator& mj,
                              const Disc& domain) {
    require(mi.L == mj.L, "bad-argument", "delta0_distance: mixed truncation sizes");
    const Eigen::MatrixXcd diff =
        mi.entries.adjoint() * mj.entries - delta0_matrix(domain, mi.L);
    const std::vector<double> s = singular_values_dense(diff);
    double nrm = 0.0;
    for (double v : s) nrm += v;
    return nrm;
}

}  // namespace twistop
