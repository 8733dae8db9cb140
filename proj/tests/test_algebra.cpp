#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <twistop/algebra.hpp>
#include <twistop/arcsine.hpp>
#include <twistop/prng.hpp>

using namespace twistop;

namespace {

AlgebraElement letter(int d, int L, int g, const Eigen::MatrixXcd& a) {
    AlgebraElement x{d, L, {}};
    x.terms[Word{g}] = a;
    return x;
}

Eigen::MatrixXcd random_block(int L, Rng& rng) {
    Eigen::MatrixXcd a(L, L);
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j)
            a(i, j) = complexd{2.0 * rng.unit() - 1.0, 2.0 * rng.unit() - 1.0};
    return a;
}

AlgebraElement random_element(int d, int L, Rng& rng) {
    AlgebraElement x{d, L, {}};
    const int nterms = 2 + static_cast<int>(rng.below(3));
    for (int t = 0; t < nterms; ++t) {
        Word w;
        const int len = static_cast<int>(rng.below(4));
        for (int k = 0; k < len; ++k) {
            const int g = static_cast<int>(rng.below(d)) + 1;
            w.push_back(rng.below(2) ? g : -g);
        }
        w = reduce_word(w);
        auto it = x.terms.find(w);
        if (it == x.terms.end())
            x.terms.emplace(std::move(w), random_block(L, rng));
        else
            it->second += random_block(L, rng);
    }
    return x;
}

// scalar-coefficient model of the explicit limit element: (81/25)(2e + u + u^{-1});
// its tau-spectral distribution is the full arcsine law without truncation error
AlgebraElement scalar_limit_element() {
    const double lam = 81.0 / 25.0;
    AlgebraElement x{2, 1, {}};
    x.terms[Word{}] = 2.0 * lam * Eigen::MatrixXcd::Identity(1, 1);
    x.terms[Word{-1, 2}] = lam * Eigen::MatrixXcd::Identity(1, 1);
    x.terms[Word{-2, 1}] = lam * Eigen::MatrixXcd::Identity(1, 1);
    return x;
}

// C^2 smoothstep ramp: 0 below 0, 1 above 1
double ramp(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

std::vector<double> chebyshev_fit(double K, int m, auto&& g) {
    // Chebyshev-Gauss projection of g on [0, K]
    std::vector<double> c(static_cast<std::size_t>(m), 0.0);
    std::vector<double> gv(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const double th = std::numbers::pi * (i + 0.5) / m;
        gv[static_cast<std::size_t>(i)] = g(K * (std::cos(th) + 1.0) / 2.0);
    }
    for (int n = 0; n < m; ++n) {
        double acc = 0.0;
        for (int i = 0; i < m; ++i)
            acc += gv[static_cast<std::size_t>(i)] *
                   std::cos(n * std::numbers::pi * (i + 0.5) / m);
        c[static_cast<std::size_t>(n)] = (n == 0 ? 1.0 : 2.0) * acc / m;
    }
    return c;
}

}  // namespace

TEST_CASE("convolution products reduce words") {
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(3, 3);
    const AlgebraElement a = letter(2, 3, 1, id);
    const AlgebraElement ainv = letter(2, 3, -1, id);
    const AlgebraElement prod = algebra_mul(a, ainv);
    REQUIRE(prod.terms.size() == 1);
    CHECK(prod.terms.count(Word{}) == 1);
    CHECK((prod.terms.at(Word{}) - id).norm() == 0.0);

    const AlgebraElement ab = algebra_mul(a, letter(2, 3, 2, 2.0 * id));
    REQUIRE(ab.terms.size() == 1);
    CHECK(ab.terms.count(Word{1, 2}) == 1);

    // mismatched shapes are rejected
    CHECK_THROWS_AS(algebra_mul(a, letter(2, 4, 1, Eigen::MatrixXcd::Identity(4, 4))), error);

    // pruning drops negligible blocks
    const AlgebraElement tiny = algebra_mul(letter(2, 3, 1, 1e-20 * id), ainv, 1e-14);
    CHECK(tiny.terms.empty());
}

TEST_CASE("gram element support and self-adjointness") {
    BranchSystem sys;
    sys.domain = Disc{complexd{1.0, 0.0}, 1.5};
    sys.branches = {gauss_branch(2), gauss_branch(3)};
    validate_system(sys);
    const QuadratureRule quad = quadrature_nodes(sys.domain, 64, 128);
    const std::vector<TruncatedOperator> ops = assemble_all(sys, 40, quad);
    const AlgebraElement x = gram_element(ops);

    REQUIRE(x.terms.size() == 3);
    CHECK(x.terms.count(Word{}) == 1);
    CHECK(x.terms.count(Word{-1, 2}) == 1);
    CHECK(x.terms.count(Word{-2, 1}) == 1);

    const AlgebraElement xs = adjoint_element(x);
    for (const auto& [w, a] : x.terms) {
        REQUIRE(xs.terms.count(w) == 1);
        CHECK((xs.terms.at(w) - a).norm() < 1e-12 * (1.0 + a.norm()));
    }

    // tau of the gram element is the overlap trace
    const Eigen::MatrixXcd h = overlap_matrix(sys, quad);
    CHECK(std::abs(tau(x).real() - (h(0, 0) + h(1, 1)).real()) < 1e-8);
    CHECK(std::abs(tau(x).imag()) < 1e-12);
}

TEST_CASE("tau is faithful on the convolution algebra") {
    Rng rng(20260815);
    for (int it = 0; it < 100; ++it) {
        const AlgebraElement x = random_element(2, 4, rng);
        const AlgebraElement xsx = algebra_mul(adjoint_element(x), x, 0.0);
        double frob = 0.0;
        for (const auto& [w, a] : x.terms) frob += a.squaredNorm();
        CHECK(tau(xsx).real() == Catch::Approx(frob).epsilon(1e-10));
        CHECK(std::abs(tau(xsx).imag()) < 1e-10 * (1.0 + frob));
    }
}

TEST_CASE("moments of the explicit limit element") {
    const Disc dom{complexd{1.0, 0.0}, 1.5};
    const AlgebraElement z0 = z0_element(dom, 40);
    CHECK(tau_moment(z0, 1) == Catch::Approx(162.0 / 25.0).epsilon(1e-11));
    CHECK(tau_moment(z0, 2) == Catch::Approx(39366.0 / 625.0).epsilon(1e-11));
    for (int p = 1; p <= 6; ++p)
        CHECK(tau_moment(z0, p, 6) == Catch::Approx(arcsine_moment(p)).epsilon(1e-10));

    const MomentSequence seq = moment_sequence(z0, 6);
    REQUIRE(seq.values.size() == 7);
    CHECK(seq.values[0] == 40.0);
    for (int p = 1; p <= 6; ++p)
        CHECK(seq.values[static_cast<std::size_t>(p)] ==
              Catch::Approx(tau_moment(z0, p, 6)).epsilon(1e-12));

    try {
        tau_moment(z0, 9);
        FAIL("expected moment-power-cap");
    } catch (const error& e) {
        CHECK(e.code() == "moment-power-cap");
    }
}

TEST_CASE("moment positivity of a gram element") {
    BranchSystem sys;
    sys.domain = Disc{complexd{1.0, 0.0}, 1.5};
    sys.branches = {gauss_branch(2), gauss_branch(3)};
    validate_system(sys);
    const QuadratureRule quad = quadrature_nodes(sys.domain, 48, 96);
    const AlgebraElement x = gram_element(assemble_all(sys, 20, quad));

    const MomentSequence seq = moment_sequence(x, 8);
    for (double m : seq.values) CHECK(m > 0.0);
    // Hankel matrix (m_{i+j})_{0<=i,j<=4} is PSD up to rounding
    Eigen::MatrixXcd hank(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            hank(i, j) = seq.values[static_cast<std::size_t>(i + j)];
    const std::vector<double> eigs = hermitian_eigenvalues(hank);
    CHECK(eigs.front() >= -1e-8 * eigs.back());
}

TEST_CASE("trace pairing bypasses the full product") {
    Rng rng(5309);
    for (int it = 0; it < 20; ++it) {
        const AlgebraElement x = random_element(2, 3, rng);
        const AlgebraElement y = random_element(2, 3, rng);
        const complexd direct = tau(algebra_mul(x, y, 0.0));
        const complexd paired = tau_product(x, y);
        CHECK(std::abs(direct - paired) < 1e-10 * (1.0 + std::abs(direct)));
    }
}

TEST_CASE("spectral mass of the limit element") {
    const AlgebraElement x = scalar_limit_element();
    CHECK(spectral_mass(x) == Catch::Approx(324.0 / 25.0).epsilon(1e-12));
    CHECK(tau(x).real() == Catch::Approx(162.0 / 25.0).epsilon(1e-14));
}

TEST_CASE("smoothed traces against explicit polynomials") {
    BranchSystem sys;
    sys.domain = Disc{complexd{1.0, 0.0}, 1.5};
    sys.branches = {gauss_branch(2), gauss_branch(3)};
    validate_system(sys);
    const QuadratureRule quad = quadrature_nodes(sys.domain, 48, 96);
    const AlgebraElement x = gram_element(assemble_all(sys, 12, quad));
    const double k = spectral_mass(x);

    SECTION("psi(x) = x reproduces the second moment") {
        // x = (K/2) T_0(y) + (K/2) T_1(y) on [0, K]
        const SmoothedTrace st = tau_smooth(x, {k / 2.0, k / 2.0}, k, 1);
        CHECK(st.remainder == 0.0);
        CHECK(st.value == Catch::Approx(tau_moment(x, 2)).epsilon(1e-9));
    }
    SECTION("zero function") {
        const SmoothedTrace st = tau_smooth(x, {0.0, 0.0, 0.0}, k, 2);
        CHECK(st.value == 0.0);
        CHECK(st.remainder == 0.0);
    }
    SECTION("constant shift is killed by the psi(0) = 0 normalization") {
        // psi = 1 has coefficients {1}; enforcement subtracts it entirely
        const SmoothedTrace st = tau_smooth(x, {1.0}, k, 0);
        CHECK(st.value == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("tail coefficients feed the remainder") {
        const SmoothedTrace st = tau_smooth(x, {k / 2.0, k / 2.0, 0.0, 1e-3}, k, 1);
        CHECK(st.remainder == Catch::Approx(1e-3 * tau_moment(x, 1)).epsilon(1e-9));
    }
    SECTION("parameter validation") {
        CHECK_THROWS_AS(tau_smooth(x, {1.0}, 0.5 * k, 0), error);
        CHECK_THROWS_AS(tau_smooth(x, {}, k, 0), error);
        CHECK_THROWS_AS(tau_smooth(x, {1.0}, k, tau_smooth_degree_cap + 1), error);
    }
}

TEST_CASE("smoothed counting brackets the arcsine interval mass") {
    const AlgebraElement x = scalar_limit_element();
    const double k = spectral_mass(x);  // = 324/25, the top of the support
    const double a = 3.0, b = 9.0, delta = 0.8;

    // x * psi(x) = s(x), a C^2 plateau: 1 on [a,b], 0 outside [a-delta, b+delta]
    auto plateau = [&](double t) {
        return ramp((t - (a - delta)) / delta) * (1.0 - ramp((t - b) / delta));
    };
    auto g = [&](double t) {
        const double s = plateau(t);
        return s == 0.0 ? 0.0 : s / t;
    };
    const std::vector<double> coef = chebyshev_fit(k, 2048, g);
    const SmoothedTrace st = tau_smooth(x, coef, k, 512);

    const double inner = arcsine_count(a, b);
    const double outer = arcsine_count(a - delta, b + delta);
    CHECK(st.value >= inner - st.remainder - 0.02);
    CHECK(st.value <= outer + st.remainder + 0.02);
    // the remainder itself must be small enough for the bracket to mean something
    CHECK(st.remainder < 0.05);
}

TEST_CASE("cayley ball sketches") {
    SECTION("ball enumeration sizes") {
        CHECK(ball_words(2, 0).size() == 1);
        CHECK(ball_words(2, 1).size() == 5);
        CHECK(ball_words(2, 2).size() == 17);
        CHECK(ball_words(2, 3).size() == 53);
        CHECK(ball_words(1, 3).size() == 7);
    }
    SECTION("scalar multiple of the identity word") {
        AlgebraElement x{2, 2, {}};
        x.terms[Word{}] = 3.0 * Eigen::MatrixXcd::Identity(2, 2);
        const Eigen::MatrixXcd b = cayley_ball_matrix(x, 2);
        CHECK((b - 3.0 * Eigen::MatrixXcd::Identity(b.rows(), b.cols())).norm() == 0.0);
    }
    SECTION("central block reproduces tau moments by locality") {
        Rng rng(777);
        AlgebraElement x{2, 3, {}};
        const Eigen::MatrixXcd a0 = random_block(3, rng);
        const Eigen::MatrixXcd a1 = random_block(3, rng);
        const Eigen::MatrixXcd a2 = random_block(3, rng);
        x.terms[Word{}] = a0 + a0.adjoint();
        x.terms[Word{1}] = a1;
        x.terms[Word{-1}] = a1.adjoint();
        x.terms[Word{2}] = a2;
        x.terms[Word{-2}] = a2.adjoint();
        const Eigen::MatrixXcd b = cayley_ball_matrix(x, 3);
        Eigen::MatrixXcd bp = b * b * b;
        const double central = bp.block(0, 0, 3, 3).trace().real();
        CHECK(central == Catch::Approx(tau_moment(x, 3)).epsilon(1e-10));
    }
    SECTION("ball spectrum of the limit element stays in the arcsine range") {
        const Eigen::MatrixXcd b = cayley_ball_matrix(scalar_limit_element(), 6);
        CHECK((b - b.adjoint()).norm() < 1e-12);
        const std::vector<double> eigs = hermitian_eigenvalues(b);
        CHECK(eigs.front() >= -1e-9);
        CHECK(eigs.back() <= 324.0 / 25.0 + 1e-9);
    }
    SECTION("dimension cap") {
        AlgebraElement x{2, 2, {}};
        x.terms[Word{}] = Eigen::MatrixXcd::Identity(2, 2);
        CHECK_THROWS_AS(cayley_ball_matrix(x, 10), error);
    }
}
