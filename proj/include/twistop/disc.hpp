#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <utility>

#include "errors.hpp"

namespace twistop {

using complexd = std::complex<double>;

// closed disc D(x, r) hosting the Bergman space H^2(D(x,r))
struct Disc {
    complexd center{0.0, 0.0};
    double radius{1.0};

    double area() const { return std::numbers::pi * radius * radius; }
};

inline void require_strict_interior(const Disc& d, complexd z, const char* who) {
    if (!(std::abs(z - d.center) <= d.radius * (1.0 - 1e-12)))
        fail("point-outside-disc", std::string(who) + ": point is not strictly inside the disc");
}

// Bergman kernel of D(x,r):
//   B(z,w) = 1 / (pi r^2 (1 - q)^2),  q = (z-x) conj(w-x) / r^2
inline complexd bergman_kernel(const Disc& d, complexd z, complexd w) {
    require_strict_interior(d, z, "bergman_kernel");
    require_strict_interior(d, w, "bergman_kernel");
    const complexd q = (z - d.center) * std::conj(w - d.center) / (d.radius * d.radius);
    const complexd om = 1.0 - q;
    return 1.0 / (std::numbers::pi * d.radius * d.radius * om * om);
}

// orthonormal Hilbert basis of H^2(D(x,r)):
//   e_l(z) = sqrt((l+1)/pi) (z-x)^l / r^(l+1)
// (unit L^2(dm) norm for every r; sums to the kernel: sum e_l(z) conj(e_l(w)) = B(z,w))
inline complexd basis_eval(const Disc& d, int ell, complexd z) {
    require(ell >= 0, "bad-argument", "basis_eval: negative basis index");
    const complexd u = (z - d.center) / d.radius;
    complexd m{1.0, 0.0};
    for (int k = 0; k < ell; ++k) m *= u;
    return std::sqrt((ell + 1) / std::numbers::pi) * m / d.radius;
}

// envelope for the on-diagonal kernel:
//   1/(pi r^2) <= B(z,z) <= 1/(pi dist(z, boundary)^2)
inline std::pair<double, double> kernel_diag_bounds(const Disc& d, complexd z) {
    require_strict_interior(d, z, "kernel_diag_bounds");
    const double dist = d.radius - std::abs(z - d.center);
    return {1.0 / (std::numbers::pi * d.radius * d.radius),
            1.0 / (std::numbers::pi * dist * dist)};
}

}  // namespace twistop
