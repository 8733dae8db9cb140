#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "disc.hpp"
#include "errors.hpp"

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace twistop {

inline bool effectively_real(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return true;
    const double mi = m.imag().cwiseAbs().maxCoeff();
    const double mr = m.real().cwiseAbs().maxCoeff();
    return mi <= 1e-13 * (1.0 + mr);
}

// all singular values, descending (LAPACK order); real input takes the
// cheaper real path
inline std::vector<double> singular_values_dense(Eigen::MatrixXcd a) {
    const auto m = static_cast<lapack_int>(a.rows());
    const auto n = static_cast<lapack_int>(a.cols());
    std::vector<double> s(static_cast<std::size_t>(std::min(m, n)));
    lapack_int info;
    if (effectively_real(a)) {
        Eigen::MatrixXd ar = a.real();
        info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, ar.data(), m, s.data(),
                              nullptr, m, nullptr, n);
    } else {
        info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, a.data(), m, s.data(),
                              nullptr, m, nullptr, n);
    }
    require(info == 0, "lapack-error", "gesdd failed to converge");
    return s;
}

// eigenvalues of a general square matrix, sorted by modulus descending
// (ties broken by real then imaginary part, for reproducible output)
inline std::vector<complexd> eigenvalues_dense(Eigen::MatrixXcd a) {
    require(a.rows() == a.cols(), "bad-argument", "eigenvalues_dense: square matrix required");
    const auto n = static_cast<lapack_int>(a.rows());
    std::vector<complexd> w(static_cast<std::size_t>(n));
    lapack_int info;
    if (effectively_real(a)) {
        Eigen::MatrixXd ar = a.real();
        std::vector<double> wr(n), wi(n);
        info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, ar.data(), n, wr.data(),
                             wi.data(), nullptr, n, nullptr, n);
        for (lapack_int i = 0; i < n; ++i) w[i] = complexd(wr[i], wi[i]);
    } else {
        info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, w.data(),
                             nullptr, n, nullptr, n);
    }
    require(info == 0, "lapack-error", "geev failed to converge");
    std::sort(w.begin(), w.end(), [](complexd x, complexd y) {
        const double ax = std::abs(x), ay = std::abs(y);
        if (ax != ay) return ax > ay;
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
    return w;
}

// eigenvalues of a Hermitian matrix, ascending
inline std::vector<double> hermitian_eigenvalues(Eigen::MatrixXcd a) {
    require(a.rows() == a.cols(), "bad-argument", "hermitian_eigenvalues: square matrix required");
    const auto n = static_cast<lapack_int>(a.rows());
    std::vector<double> w(static_cast<std::size_t>(n));
    lapack_int info;
    if (effectively_real(a)) {
        Eigen::MatrixXd ar = a.real();
        info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, ar.data(), n, w.data());
    } else {
        info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data());
    }
    require(info == 0, "lapack-error", "heevd failed to converge");
    return w;
}

namespace detail {

// count positive eigenvalues from the block-diagonal D of a Bunch-Kaufman
// factorization (Sylvester inertia); works for the real and complex variants
template <class Mat>
int positive_inertia(const Mat& a, const std::vector<lapack_int>& ipiv) {
    const auto n = static_cast<lapack_int>(a.rows());
    int pos = 0;
    for (lapack_int k = 0; k < n;) {
        if (ipiv[k] > 0) {
            if (std::real(a(k, k)) > 0.0) ++pos;
            ++k;
        } else {
            // 2x2 block [[p, conj(q)], [q, r]]: det < 0 gives one eigenvalue of
            // each sign; det > 0 gives two with the sign of the trace
            const double p = std::real(a(k, k));
            const double r = std::real(a(k + 1, k + 1));
            const double q2 = std::norm(a(k + 1, k));
            const double det = p * r - q2;
            if (det < 0.0)
                pos += 1;
            else if (p + r > 0.0)
                pos += 2;
            k += 2;
        }
    }
    return pos;
}

}  // namespace detail

// #{eigenvalues of the symmetric matrix a that are > t}, via the inertia of
// a - t I computed from an LDL^T factorization. O(n^3/3) flops -- much cheaper
// than a full spectrum when only a count is needed.
inline int count_eigenvalues_above(Eigen::MatrixXd a, double t) {
    require(a.rows() == a.cols(), "bad-argument", "count_eigenvalues_above: square matrix");
    const auto n = static_cast<lapack_int>(a.rows());
    a.diagonal().array() -= t;
    std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
    const lapack_int info = LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', n, a.data(), n, ipiv.data());
    require(info >= 0, "lapack-error", "dsytrf failed");
    return detail::positive_inertia(a, ipiv);
}

inline int count_eigenvalues_above(Eigen::MatrixXcd a, double t) {
    require(a.rows() == a.cols(), "bad-argument", "count_eigenvalues_above: square matrix");
    if (effectively_real(a)) return count_eigenvalues_above(Eigen::MatrixXd(a.real()), t);
    const auto n = static_cast<lapack_int>(a.rows());
    a.diagonal().array() -= complexd(t, 0.0);
    std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
    const lapack_int info = LAPACKE_zhetrf(LAPACK_COL_MAJOR, 'L', n, a.data(), n, ipiv.data());
    require(info >= 0, "lapack-error", "zhetrf failed");
    return detail::positive_inertia(a, ipiv);
}

}  // namespace twistop
