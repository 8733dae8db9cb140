#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "disc.hpp"
#include "errors.hpp"

namespace twistop {

struct MobiusMap {
    complexd a{0.0}, b{0.0}, c{0.0}, d{0.0};
    complexd operator()(complexd z) const { return (a * z + b) / (c * z + d); }
};

struct AffineMap {
    complexd fixed_point{0.0};
    complexd multiplier{0.0};  // |multiplier| < 1 for a strict contraction
    complexd operator()(complexd z) const {
        return fixed_point + multiplier * (z - fixed_point);
    }
};

using BranchMap = std::variant<MobiusMap, AffineMap>;

inline complexd apply_map(const BranchMap& m, complexd z) {
    return std::visit([z](const auto& f) { return f(z); }, m);
}

// inverse branches of the Gauss map: gamma_j(z) = 1/(j+z)
inline MobiusMap gauss_branch(int j) {
    require(j >= 1, "bad-argument", "gauss_branch: index must be >= 1");
    return MobiusMap{0.0, 1.0, 1.0, static_cast<double>(j)};
}

enum class WeightKind { zero, polynomial, mayer };

// weight G for the factors e^{G(gamma_j z)}:
//   zero:        G = 0
//   polynomial:  G(w) = sum_k c_k ((w - center)/radius)^k
//   mayer:       G(w) = 2 sigma Log w, i.e. e^G = w^(2 sigma) (principal branch);
//                on gauss branches this is the classical (j+z)^(-2 sigma)
struct WeightSpec {
    WeightKind kind{WeightKind::zero};
    std::vector<complexd> coefficients;
    double sigma{0.0};
};

struct ValidationReport {
    double margin{0.0};  // min_j dist(gamma_j(closure), boundary)
    double rho{0.0};     // max_j sup_closure |gamma_j - center| / radius
    int samples{0};
    std::vector<double> branch_margins;
    std::vector<double> branch_rhos;
    std::vector<double> branch_weight_sups;  // sup_closure |e^{G(gamma_j z)}|
    std::vector<std::string> warnings;
};

struct BranchSystem {
    Disc domain;
    std::vector<BranchMap> branches;
    WeightSpec weight;
    std::optional<ValidationReport> validation;
};

inline complexd weight_factor(const BranchSystem& sys, int j, complexd z) {
    require(j >= 0 && j < static_cast<int>(sys.branches.size()), "bad-argument",
            "weight_factor: branch index out of range");
    const complexd w = apply_map(sys.branches[j], z);
    switch (sys.weight.kind) {
        case WeightKind::zero:
            return {1.0, 0.0};
        case WeightKind::polynomial: {
            const complexd u = (w - sys.domain.center) / sys.domain.radius;
            complexd g{0.0, 0.0}, m{1.0, 0.0};
            for (const complexd& c : sys.weight.coefficients) {
                g += c * m;
                m *= u;
            }
            return std::exp(g);
        }
        case WeightKind::mayer:
            return std::pow(w, complexd(2.0 * sys.weight.sigma, 0.0));
    }
    return {1.0, 0.0};
}

// maximum of a real function over the boundary circle: coarse scan plus
// golden-section refinement around the best bracket. Deterministic for a
// fixed sample count, hence bit-identical reports on re-validation.
template <class F>
double boundary_max(const Disc& d, int samples, F&& fn) {
    const double tau = 2.0 * std::numbers::pi;
    auto at = [&](double th) {
        return fn(d.center + d.radius * complexd{std::cos(th), std::sin(th)});
    };
    double best_val = -1e300;
    int best_k = 0;
    for (int k = 0; k < samples; ++k) {
        const double v = at(tau * k / samples);
        if (v > best_val) {
            best_val = v;
            best_k = k;
        }
    }
    double lo = tau * (best_k - 1) / samples;
    double hi = tau * (best_k + 1) / samples;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = at(x1), f2 = at(x2);
    for (int it = 0; it < 200 && (hi - lo) > 1e-13; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = at(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = at(x1);
        }
    }
    return std::max(best_val, std::max(f1, f2));
}

// Checks that every branch maps the closed domain strictly inside itself and
// records contraction data. Branch maps are holomorphic on a neighbourhood of
// the closure (Mobius poles are rejected if they touch the closed disc), so
// all suprema are attained on the boundary circle by the maximum principle.
inline ValidationReport validate_system(BranchSystem& sys, int boundary_samples = 256) {
    require(boundary_samples >= 64, "bad-argument",
            "validate_system: need at least 64 boundary samples");
    require(!sys.branches.empty(), "bad-argument", "validate_system: no branches");

    const Disc& dom = sys.domain;
    ValidationReport rep;
    rep.samples = boundary_samples;
    rep.margin = 1e300;
    rep.rho = 0.0;

    for (std::size_t j = 0; j < sys.branches.size(); ++j) {
        if (const auto* mob = std::get_if<MobiusMap>(&sys.branches[j])) {
            if (std::abs(mob->c) > 0.0) {
                const complexd pole = -mob->d / mob->c;
                if (std::abs(pole - dom.center) <= dom.radius * (1.0 + 1e-12))
                    fail("validation-failed",
                         "validate_system: branch " + std::to_string(j) +
                             " has a pole touching the closed domain");
            } else if (std::abs(mob->d) == 0.0) {
                fail("validation-failed", "validate_system: degenerate Mobius branch");
            }
        }
        const auto& br = sys.branches[j];
        const double sup_dist = boundary_max(dom, boundary_samples, [&](complexd z) {
            return std::abs(apply_map(br, z) - dom.center);
        });
        const double margin_j = dom.radius - sup_dist;
        const double rho_j = sup_dist / dom.radius;
        if (!(margin_j > 0.0))
            fail("validation-failed",
                 "validate_system: branch " + std::to_string(j) +
                     " does not map the closed domain strictly inside itself");
        const double wsup_j = boundary_max(dom, boundary_samples, [&](complexd z) {
            return std::abs(weight_factor(sys, static_cast<int>(j), z));
        });
        rep.branch_margins.push_back(margin_j);
        rep.branch_rhos.push_back(rho_j);
        rep.branch_weight_sups.push_back(wsup_j);
        rep.margin = std::min(rep.margin, margin_j);
        rep.rho = std::max(rep.rho, rho_j);
    }
    if (sys.branches.size() == 1)
        rep.warnings.push_back(
            "single-branch system: Hilbert-Schmidt fluctuation statistics are degenerate");
    sys.validation = rep;
    return rep;
}

// Schur-type norm bound M0 = sum_j sup|e^{G(gamma_j .)}| sqrt(Vol/pi) / margin_j;
// every twisted matrix built from the system has top singular value <= M0.
inline double operator_norm_bound(const BranchSystem& sys) {
    require(sys.validation.has_value(), "unvalidated-system",
            "operator_norm_bound: run validate_system first");
    const auto& rep = *sys.validation;
    double m0 = 0.0;
    for (std::size_t j = 0; j < sys.branches.size(); ++j)
        m0 += rep.branch_weight_sups[j] *
              std::sqrt(sys.domain.area() / std::numbers::pi) / rep.branch_margins[j];
    return m0;
}

}  // namespace twistop
