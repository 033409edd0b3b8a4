#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "wqed/basis.hpp"
#include "wqed/model.hpp"
#include "wqed/spectral.hpp"

using namespace wqed;

namespace {

LatticeParams make_params(int n, double u = 0.0, double h = 0.0) {
    LatticeParams p;
    p.sites = n;
    p.interaction = u;
    p.quasiperiodic = h;
    return p;
}

} // namespace

TEST_CASE("two-particle basis enumeration", "[model]") {
    TwoParticleBasis basis(4);
    REQUIRE(basis.dim() == 10);
    REQUIRE(basis.states.front() == std::pair<int, int>{1, 1});
    REQUIRE(basis.states.back() == std::pair<int, int>{4, 4});
    // Lexicographic order and consistent index map.
    for (int s = 0; s < basis.dim(); ++s) {
        const auto [i, j] = basis.states[s];
        REQUIRE(i <= j);
        REQUIRE(basis.index(i, j) == s);
        REQUIRE(basis.index(j, i) == s);
        REQUIRE(basis.norm[s] == Approx(i == j ? 1.0 / std::sqrt(2.0) : 1.0));
        if (s > 0) REQUIRE(basis.states[s - 1] < basis.states[s]);
    }
    REQUIRE(TwoParticleBasis(15).dim() == 120);
}

TEST_CASE("h1 matrices match hand-built anchors", "[model]") {
    SECTION("N=2 zero potential") {
        const auto h = build_h1(make_params(2));
        REQUIRE(h.matrix(0, 0) == cplx(0.0, 0.0));
        REQUIRE(h.matrix(0, 1) == cplx(1.0, 0.0));
        REQUIRE(h.matrix(1, 0) == cplx(1.0, 0.0));
        REQUIRE(h.matrix(1, 1) == cplx(0.0, 0.0));
    }
    SECTION("N=3, h=2, b=1/2 forces eps_j = 2 cos(pi j)") {
        auto p = make_params(3, 0.0, 2.0);
        p.incommensuration = 0.5;
        const auto h = build_h1(p);
        REQUIRE(h.matrix(0, 0).real() == Approx(-2.0).margin(1e-12));
        REQUIRE(h.matrix(1, 1).real() == Approx(2.0).margin(1e-12));
        REQUIRE(h.matrix(2, 2).real() == Approx(-2.0).margin(1e-12));
        REQUIRE(h.matrix(0, 1).real() == Approx(1.0));
        REQUIRE(h.matrix(1, 2).real() == Approx(1.0));
        REQUIRE(h.matrix(0, 2) == cplx(0.0, 0.0));
    }
    SECTION("N=15, h=1: eps_1 against extended-precision evaluation") {
        const auto h = build_h1(make_params(15, 0.0, 1.0));
        const long double b = 0.61803398874989484820L;
        const long double expected = std::cos(2.0L * 3.14159265358979323846264338327950288L * b);
        REQUIRE(h.matrix(0, 0).real() ==
                Approx(static_cast<double>(expected)).epsilon(1e-14));
    }
}

TEST_CASE("h2 matrix for N=2 carries bosonic factors", "[model]") {
    auto p = make_params(2, 3.0, 0.7);
    TwoParticleBasis basis(2);
    const auto h = build_h2(p, basis);
    const double e1 = p.onsite(1), e2 = p.onsite(2);
    const double s2 = std::sqrt(2.0);
    REQUIRE(h.matrix(0, 0).real() == Approx(2 * e1 + 3.0));
    REQUIRE(h.matrix(1, 1).real() == Approx(e1 + e2));
    REQUIRE(h.matrix(2, 2).real() == Approx(2 * e2 + 3.0));
    REQUIRE(h.matrix(0, 1).real() == Approx(s2));
    REQUIRE(h.matrix(1, 2).real() == Approx(s2));
    REQUIRE(h.matrix(0, 2) == cplx(0.0, 0.0));
}

TEST_CASE("sector Hamiltonians are real symmetric", "[model]") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uh(0.0, 4.0);
    std::uniform_real_distribution<double> uu(0.0, 10.0);
    for (int trial = 0; trial < 5; ++trial) {
        auto p = make_params(6, uu(rng), uh(rng));
        const auto h1 = build_h1(p);
        REQUIRE(h1.matrix.imag().norm() == 0.0);
        REQUIRE((h1.matrix - h1.matrix.transpose()).norm() == 0.0);
        TwoParticleBasis basis(6);
        const auto h2 = build_h2(p, basis);
        REQUIRE(h2.matrix.imag().norm() == 0.0);
        REQUIRE((h2.matrix - h2.matrix.transpose()).norm() == 0.0);
    }
}

TEST_CASE("U=0 two-particle eigenvalues are pairwise sums", "[model]") {
    auto p = make_params(6, 0.0, 1.3);
    const auto s1 = eig_hermitian(build_h1(p));
    TwoParticleBasis basis(6);
    const auto s2 = eig_hermitian(build_h2(p, basis));
    std::vector<double> sums;
    for (int a = 0; a < 6; ++a)
        for (int b = a; b < 6; ++b) sums.push_back(s1.values(a) + s1.values(b));
    std::sort(sums.begin(), sums.end());
    REQUIRE(static_cast<int>(sums.size()) == s2.values.size());
    for (int k = 0; k < s2.values.size(); ++k)
        REQUIRE(s2.values(k) == Approx(sums[k]).margin(1e-10));
}

TEST_CASE("effective Hamiltonian anchors", "[model]") {
    SECTION("N=1 degenerate configuration gets both decay terms") {
        auto p = make_params(1, 0.0, 0.5);
        const auto h = build_effective(p, 1);
        REQUIRE(h.dim() == 1);
        REQUIRE(h.matrix(0, 0).real() == Approx(p.onsite(1)));
        REQUIRE(h.matrix(0, 0).imag() == Approx(-p.coupling));
    }
    SECTION("N=2 eigenvalues +-J - i kappa/2") {
        auto p = make_params(2);
        const auto spec = eig_biorthogonal(build_effective(p, 1));
        REQUIRE(spec.values(0).real() == Approx(-1.0).margin(1e-12));
        REQUIRE(spec.values(1).real() == Approx(1.0).margin(1e-12));
        REQUIRE(spec.values(0).imag() == Approx(-p.coupling / 2).margin(1e-12));
        REQUIRE(spec.values(1).imag() == Approx(-p.coupling / 2).margin(1e-12));
    }
    SECTION("uniform loss shifts every two-particle eigenvalue by -i gamma") {
        auto p = make_params(4, 2.0, 0.9);
        const auto base = eig_biorthogonal(build_effective(p, 2, false));
        p.loss = 0.3;
        const auto lossy = eig_biorthogonal(build_effective(p, 2, true));
        for (int k = 0; k < base.values.size(); ++k) {
            REQUIRE(lossy.values(k).real() == Approx(base.values(k).real()).margin(1e-10));
            REQUIRE(lossy.values(k).imag() ==
                    Approx(base.values(k).imag() - p.loss).margin(1e-10));
        }
    }
    SECTION("kappa = 0, gamma = 0 reduces to the closed sector") {
        auto p = make_params(5, 1.5, 0.4);
        p.coupling = 0.0;
        TwoParticleBasis basis(5);
        const auto closed = build_h2(p, basis);
        const auto open = build_effective(p, 2, true);
        REQUIRE((closed.matrix - open.matrix).norm() == 0.0);
    }
}

TEST_CASE("Schrieffer-Wolff doublon model", "[model]") {
    SECTION("h=0 gives a uniform chain shifted by U") {
        auto p = make_params(5, 4.0, 0.0);
        const auto m = build_sw_doublon(p);
        REQUIRE(m.predicted_transition == Approx(0.5));
        for (double jd : m.hoppings_eff) REQUIRE(jd == Approx(2.0 / 4.0));
        for (int j = 0; j < 5; ++j) REQUIRE(m.matrix(j, j) == Approx(4.0));
    }
    SECTION("predicted transitions") {
        REQUIRE(build_sw_doublon(make_params(4, 10.0, 0.1)).predicted_transition ==
                Approx(0.2));
        REQUIRE(build_sw_doublon(make_params(4, 3.5, 0.1)).predicted_transition ==
                Approx(4.0 / 7.0));
    }
    SECTION("resonant denominator raises") {
        auto p = make_params(3, 2.0, 1.0);
        p.incommensuration = 0.5; // eps = (-1, 1, -1) => |eps_2 - eps_1| = 2 = U
        REQUIRE_THROWS_AS(build_sw_doublon(p), ResonantDenominator);
    }
    SECTION("doublon band matches top of the exact spectrum at large U") {
        // Frozen regression bound: exact diagonalization at U = 50 J, h = J
        // gives max_err * U / J^2 = 4.14 (4.34 at U = 20 J).
        const double frozen_c = 4.5;
        for (double u : {20.0, 50.0}) {
            auto p = make_params(10, u, 1.0);
            const auto sw = build_sw_doublon(p);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sw_eig(sw.matrix);
            TwoParticleBasis basis(10);
            const auto exact = eig_hermitian(build_h2(p, basis));
            const int d2 = static_cast<int>(exact.values.size());
            double max_err = 0.0;
            for (int k = 0; k < 10; ++k)
                max_err = std::max(max_err, std::abs(sw_eig.eigenvalues()(k) -
                                                     exact.values(d2 - 10 + k)));
            REQUIRE(max_err <= frozen_c / u);
        }
    }
}

TEST_CASE("creation operator acts with bosonic amplitudes", "[model]") {
    TwoParticleBasis basis(3);
    SECTION("a_1^dag |0> is the unit one-particle vector") {
        Eigen::VectorXcd vac(1);
        vac << 1.0;
        const auto v = apply_creation(1, vac, basis);
        REQUIRE(v.size() == 3);
        REQUIRE(v(0) == cplx(1.0, 0.0));
        REQUIRE(v.tail(2).norm() == 0.0);
    }
    SECTION("a_1^dag |1> = sqrt(2) |1,1>") {
        Eigen::VectorXcd one = Eigen::VectorXcd::Zero(3);
        one(0) = 1.0;
        const auto v = apply_creation(1, one, basis);
        REQUIRE(v(basis.index(1, 1)).real() == Approx(std::sqrt(2.0)));
        REQUIRE(std::abs(v.norm() - std::sqrt(2.0)) < 1e-15);
    }
    SECTION("a_1^dag |2> = |1,2>") {
        Eigen::VectorXcd one = Eigen::VectorXcd::Zero(3);
        one(1) = 1.0;
        const auto v = apply_creation(1, one, basis);
        REQUIRE(v(basis.index(1, 2)) == cplx(1.0, 0.0));
        REQUIRE(v.norm() == Approx(1.0));
    }
    SECTION("annihilation is the adjoint map") {
        std::mt19937 rng(3);
        std::normal_distribution<double> g(0.0, 1.0);
        const Eigen::MatrixXd c = creation_matrix_1to2(2, basis);
        Eigen::VectorXcd u(basis.dim()), v(3);
        for (int k = 0; k < u.size(); ++k) u(k) = cplx(g(rng), g(rng));
        for (int k = 0; k < v.size(); ++k) v(k) = cplx(g(rng), g(rng));
        const cplx lhs = u.dot(c.cast<cplx>() * v);              // <u, a^dag v>
        const cplx rhs = (c.transpose().cast<cplx>() * u).dot(v); // <a u, v>
        REQUIRE(std::abs(lhs - rhs) < 1e-12);
    }
}
