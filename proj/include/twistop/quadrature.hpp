#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "disc.hpp"
#include "errors.hpp"

namespace twistop {

struct QuadratureNode {
    complexd z;
    double w;
};

// product rule on a disc: Gauss-Legendre in the radial variable (Jacobian
// absorbed into the weights) x uniform trapezoid in the angle
struct QuadratureRule {
    Disc disc;
    int n_radial{0};
    int n_angular{0};
    std::vector<QuadratureNode> nodes;

    double weight_sum() const {
        double s = 0.0;
        for (const auto& n : nodes) s += n.w;
        return s;
    }
};

// Gauss-Legendre nodes/weights on [-1,1], Newton iteration on the recurrence
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // i-th root of P_n counted from +1 downward
        double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * t * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (t * p0 - p1) / (t * t - 1.0);
            const double dt = p0 / pp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * pp * pp);
    }
}

// Integrates radial polynomials of degree <= 2 n_radial - 2 and angular
// harmonics |k| < n_angular exactly; in particular all products
// e_k conj(e_l) with k + l <= 2 n_radial - 2, |k - l| < n_angular.
inline QuadratureRule quadrature_nodes(const Disc& disc, int n_radial, int n_angular) {
    require(n_radial >= 8, "bad-argument", "quadrature_nodes: n_radial must be >= 8");
    require(n_angular >= 16, "bad-argument", "quadrature_nodes: n_angular must be >= 16");
    require(disc.radius > 0.0, "bad-argument", "quadrature_nodes: radius must be positive");

    std::vector<double> gx, gw;
    gauss_legendre(n_radial, gx, gw);

    QuadratureRule rule;
    rule.disc = disc;
    rule.n_radial = n_radial;
    rule.n_angular = n_angular;
    rule.nodes.reserve(static_cast<std::size_t>(n_radial) * n_angular);

    const double r2 = disc.radius * disc.radius;
    const double dth = 2.0 * std::numbers::pi / n_angular;
    for (int i = 0; i < n_radial; ++i) {
        const double s = 0.5 * (gx[i] + 1.0);   // radial fraction in (0,1)
        const double ws = 0.5 * gw[i];
        const double wz = ws * s * r2 * dth;    // includes the Jacobian s r^2
        for (int k = 0; k < n_angular; ++k) {
            const double th = dth * k;
            const complexd dir{std::cos(th), std::sin(th)};
            rule.nodes.push_back({disc.center + disc.radius * s * dir, wz});
        }
    }
    return rule;
}

}  // namespace twistop
