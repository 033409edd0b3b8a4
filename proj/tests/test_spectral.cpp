#include <catch2/catch.hpp>

#include <cmath>
#include <numbers>
#include <random>

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

TEST_CASE("hermitian eigensolve anchors", "[spectral]") {
    SECTION("N=2 free dimer") {
        const auto s = eig_hermitian(build_h1(make_params(2)));
        REQUIRE(s.values(0) == Approx(-1.0));
        REQUIRE(s.values(1) == Approx(1.0));
        // columns orthonormal, equal weight on both sites up to phase
        REQUIRE(std::abs(s.vectors(0, 0)) == Approx(1.0 / std::sqrt(2.0)));
        REQUIRE((s.vectors.transpose() * s.vectors -
                 Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-10);
    }
    SECTION("N=2, U=0 two-particle values (-2, 0, 2)") {
        TwoParticleBasis basis(2);
        const auto s = eig_hermitian(build_h2(make_params(2), basis));
        REQUIRE(s.values(0) == Approx(-2.0).margin(1e-12));
        REQUIRE(s.values(1) == Approx(0.0).margin(1e-12));
        REQUIRE(s.values(2) == Approx(2.0).margin(1e-12));
    }
    SECTION("N=15 open chain plane waves") {
        const auto s = eig_hermitian(build_h1(make_params(15)));
        std::vector<double> expected;
        for (int mu = 1; mu <= 15; ++mu)
            expected.push_back(2.0 * std::cos(std::numbers::pi * mu / 16.0));
        std::sort(expected.begin(), expected.end());
        for (int k = 0; k < 15; ++k)
            REQUIRE(s.values(k) == Approx(expected[k]).margin(1e-12));
    }
    SECTION("reconstruction residual") {
        auto p = make_params(8, 2.7, 1.9);
        TwoParticleBasis basis(8);
        const auto ham = build_h2(p, basis);
        const auto s = eig_hermitian(ham);
        const Eigen::MatrixXd h = ham.matrix.real();
        const Eigen::MatrixXd rebuilt =
            s.vectors * s.values.asDiagonal() * s.vectors.transpose();
        REQUIRE((h - rebuilt).norm() <= 1e-10 * h.norm());
    }
}

TEST_CASE("biorthogonal eigensolve", "[spectral]") {
    SECTION("N=1: xi = eps - i kappa, trivial vectors") {
        auto p = make_params(1, 0.0, 0.8);
        const auto s = eig_biorthogonal(build_effective(p, 1));
        REQUIRE(s.values(0).real() == Approx(p.onsite(1)));
        REQUIRE(s.values(0).imag() == Approx(-p.coupling));
        REQUIRE(std::abs(s.right(0, 0) * s.right(0, 0) - cplx(1.0, 0.0)) < 1e-12);
    }
    SECTION("biorthonormality and passivity for a generic system") {
        auto p = make_params(7, 3.5, 1.1);
        p.loss = 0.05;
        for (int sector : {1, 2}) {
            const auto s = eig_biorthogonal(build_effective(p, sector, true));
            const int d = static_cast<int>(s.values.size());
            REQUIRE((s.left() * s.right - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs()
                        .maxCoeff() < 1e-8);
            // Bendixson bound: Im xi within the range of the anti-Hermitian part.
            for (int k = 0; k < d; ++k) {
                REQUIRE(s.values(k).imag() <= 1e-12);
                REQUIRE(s.values(k).imag() >=
                        -(p.coupling + p.loss * sector) - 1e-12);
            }
        }
    }
    SECTION("kappa -> 0 recovers the closed spectrum") {
        auto p = make_params(6, 2.0, 0.7);
        const auto closed = eig_hermitian(build_h1(p));
        p.coupling = 1e-6;
        const auto open = eig_biorthogonal(build_effective(p, 1));
        for (int k = 0; k < 6; ++k)
            REQUIRE(std::abs(open.values(k) - closed.values(k)) < 1e-5);
    }
    SECTION("exceptional point is reported, not silently ignored") {
        // Complex-symmetric defective 2x2: double eigenvalue i with a single,
        // self-orthogonal eigenvector.
        SectorHamiltonian ham;
        ham.sector = 1;
        ham.hermitian = false;
        ham.matrix.resize(2, 2);
        ham.matrix << cplx(0.0, 2.0), cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.0);
        REQUIRE_THROWS_AS(eig_biorthogonal(ham), NearDefective);
    }
}

TEST_CASE("resolvent elements", "[spectral]") {
    SECTION("single site") {
        auto p = make_params(1, 0.0, 0.4);
        const auto s = eig_hermitian(build_h1(p));
        const cplx e(0.3, 0.1);
        REQUIRE(std::abs(resolvent_element(e, 0, 0, s) - 1.0 / (e - p.onsite(1))) < 1e-14);
    }
    SECTION("J=0 doublon diagonal") {
        auto p = make_params(3, 2.5, 1.2);
        p.hopping = 0.0;
        TwoParticleBasis basis(3);
        const auto s = eig_hermitian(build_h2(p, basis));
        const cplx e(0.9, 0.2);
        const int idx = basis.index(2, 2);
        const cplx expected = 1.0 / (e - 2.0 * p.onsite(2) - p.interaction);
        REQUIRE(std::abs(resolvent_element(e, idx, idx, s) - expected) < 1e-12);
    }
    SECTION("random queries against the dense inverse") {
        auto p = make_params(3, 1.7, 2.2);
        TwoParticleBasis basis(3);
        const auto ham = build_h2(p, basis);
        const auto s = eig_hermitian(ham);
        const int d = static_cast<int>(s.values.size());
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> ur(-4.0, 8.0);
        std::uniform_real_distribution<double> ui(1e-3, 1.0);
        std::uniform_int_distribution<int> us(0, d - 1);
        for (int trial = 0; trial < 100; ++trial) {
            const cplx e(ur(rng), ui(rng));
            const Eigen::MatrixXcd inv =
                (e * Eigen::MatrixXcd::Identity(d, d) - ham.matrix).inverse();
            const int bra = us(rng), ket = us(rng);
            REQUIRE(std::abs(resolvent_element(e, bra, ket, s) - inv(bra, ket)) < 1e-10);
        }
    }
    SECTION("pole proximity raises") {
        const auto s = eig_hermitian(build_h1(make_params(2)));
        REQUIRE_THROWS_AS(resolvent_element(cplx(1.0, 0.0), 0, 0, s), PoleProximity);
    }
}

TEST_CASE("participation ratio", "[spectral]") {
    SECTION("J=0 nondegenerate eigenstates are Fock states") {
        auto p = make_params(5, 3.3, 1.7);
        p.hopping = 0.0;
        TwoParticleBasis basis(5);
        const auto s = eig_hermitian(build_h2(p, basis));
        for (int alpha = 1; alpha <= s.values.size(); ++alpha) {
            const auto r = participation_ratio(alpha, s);
            REQUIRE(r.value == Approx(1.0).margin(1e-10));
            REQUIRE(r.log_dim == Approx(0.0).margin(1e-10));
        }
    }
    SECTION("equal-weight synthetic state gives R = d2") {
        const int d = 10;
        HermitianSpectrum s;
        s.sector = 2;
        s.values = Eigen::VectorXd::LinSpaced(d, 0.0, 9.0);
        s.vectors = Eigen::MatrixXd::Identity(d, d);
        s.vectors.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(d)));
        const auto r = participation_ratio(1, s);
        REQUIRE(r.value == Approx(static_cast<double>(d)));
        REQUIRE(r.log_dim == Approx(1.0));
    }
    SECTION("delocalised doublon band: log_d2 R approaches log_d2 N") {
        auto p = make_params(15, 10.0, 0.0);
        TwoParticleBasis basis(15);
        const auto s = eig_hermitian(build_h2(p, basis));
        const auto r = participation_ratio(120, s);
        const double target = std::log(15.0) / std::log(120.0);
        REQUIRE(std::abs(r.log_dim - target) < 0.1 * target);
    }
}

TEST_CASE("residue route reproduces the participation ratio", "[spectral]") {
    SECTION("random parameters, N <= 4") {
        std::mt19937 rng(23);
        std::uniform_real_distribution<double> uh(0.3, 3.0);
        std::uniform_real_distribution<double> uu(0.5, 8.0);
        for (int n : {2, 3, 4}) {
            auto p = make_params(n, uu(rng), uh(rng));
            TwoParticleBasis basis(n);
            const auto s = eig_hermitian(build_h2(p, basis));
            for (int alpha = 1; alpha <= s.values.size(); ++alpha) {
                const double inv_r = pr_inverse_via_residues(alpha, s);
                const auto r = participation_ratio(alpha, s);
                REQUIRE(inv_r == Approx(1.0 / r.value).margin(1e-10));
            }
        }
    }
    SECTION("degenerate eigenvalue raises") {
        // N=3, U=0, h=0: pairwise sums collide at zero energy.
        TwoParticleBasis basis(3);
        const auto s = eig_hermitian(build_h2(make_params(3), basis));
        bool raised = false;
        for (int alpha = 1; alpha <= s.values.size(); ++alpha) {
            try {
                pr_inverse_via_residues(alpha, s);
            } catch (const DegenerateEigenvalue&) {
                raised = true;
            }
        }
        REQUIRE(raised);
    }
}

TEST_CASE("localisation lengths", "[spectral]") {
    SECTION("J=0 reports the infinity sentinel") {
        auto p = make_params(4, 0.0, 1.5);
        p.hopping = 0.0;
        const auto s1 = eig_hermitian(build_h1(p));
        REQUIRE(std::isinf(localisation_length_1p(cplx(0.2, 0.1), s1, 4)));
        TwoParticleBasis basis(4);
        const auto s2 = eig_hermitian(build_h2(p, basis));
        REQUIRE(std::isinf(localisation_length_2p(cplx(0.2, 0.1), s2, basis)));
    }
    SECTION("N=2 closed form") {
        auto p = make_params(2, 0.0, 0.9);
        const auto s = eig_hermitian(build_h1(p));
        const cplx e(0.4, 0.2);
        const double e1 = p.onsite(1), e2 = p.onsite(2);
        const cplx g_n1 = 1.0 / ((e - e1) * (e - e2) - 1.0); // <2|G|1> numerator J=1
        const double expected = -0.5 * std::log(std::norm(g_n1));
        REQUIRE(localisation_length_1p(e, s, 2) == Approx(expected).margin(1e-12));
    }
    SECTION("two-particle element against the dense inverse") {
        auto p = make_params(3, 2.1, 1.4);
        TwoParticleBasis basis(3);
        const auto ham = build_h2(p, basis);
        const auto s = eig_hermitian(ham);
        const cplx e(1.3, 0.125);
        const int d = basis.dim();
        const Eigen::MatrixXcd inv =
            (e * Eigen::MatrixXcd::Identity(d, d) - ham.matrix).inverse();
        const double expected =
            -std::log(std::norm(inv(basis.index(3, 3), basis.index(1, 1)))) / (2.0 * 2.0);
        REQUIRE(localisation_length_2p(e, s, basis) == Approx(expected).margin(1e-10));
    }
    SECTION("deep AA regime approaches ln(h/2J)") {
        auto p = make_params(144, 0.0, 3.0);
        const auto s = eig_hermitian(build_h1(p));
        const cplx e(s.values(72), 0.125); // mid-spectrum, eta = kappa/2
        const double inv_l1 = localisation_length_1p(e, s, p.sites);
        REQUIRE(inv_l1 == Approx(std::log(1.5)).margin(0.12));
    }
    SECTION("pole proximity propagates") {
        const auto s = eig_hermitian(build_h1(make_params(3, 0.0, 1.0)));
        REQUIRE_THROWS_AS(localisation_length_1p(cplx(s.values(1), 0.0), s, 3),
                          PoleProximity);
    }
}
