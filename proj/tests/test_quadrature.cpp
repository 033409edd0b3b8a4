#include <catch2/catch.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "wqed/quadrature.hpp"
#include "wqed/rational.hpp"

using namespace wqed;

TEST_CASE("adaptive panels reach polynomial and oscillatory targets", "[quadrature]") {
    SECTION("cubic") {
        const auto r = integrate_adaptive([](double x) { return cplx(x * x * x, 0.0); },
                                          0.0, 2.0);
        REQUIRE(r.value.real() == Approx(4.0).epsilon(1e-12));
    }
    SECTION("complex exponential") {
        const auto r = integrate_adaptive([](double x) { return std::exp(cplx(0.0, x)); },
                                          0.0, std::numbers::pi);
        REQUIRE(r.value.real() == Approx(0.0).margin(1e-10));
        REQUIRE(r.value.imag() == Approx(2.0).epsilon(1e-10));
    }
    SECTION("narrow Lorentzian needs its breakpoint") {
        const double s = 1e-4, k = 0.37;
        auto f = [&](double x) {
            return cplx(s / std::numbers::pi / ((x - k) * (x - k) + s * s), 0.0);
        };
        const auto r = integrate_adaptive(f, -50.0, 50.0, {k});
        REQUIRE(r.value.real() == Approx(1.0).epsilon(1e-4));
    }
    SECTION("subdivision limit raises") {
        QuadratureOptions opt;
        opt.rel_tol = 1e-12;
        opt.max_subdivisions = 3;
        auto f = [](double x) { return cplx(std::sqrt(std::abs(x)), 0.0); };
        REQUIRE_THROWS_AS(integrate_adaptive(f, -1.0, 1.0, {}, opt), IntegrationFailure);
    }
}

TEST_CASE("closed-form line integrals agree with quadrature", "[quadrature]") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ur(-2.0, 2.0);
    std::uniform_real_distribution<double> ui(0.05, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<cplx> poles;
        const int n = 2 + trial % 3;
        for (int k = 0; k < n; ++k)
            poles.emplace_back(ur(rng), (k % 2 == 0 ? -1.0 : 1.0) * ui(rng));
        const cplx closed = line_integral_simple_poles(poles);
        auto f = [&](double x) {
            cplx acc(1.0, 0.0);
            for (auto z : poles) acc /= (x - z);
            return acc;
        };
        QuadratureOptions opt;
        opt.rel_tol = 1e-10;
        opt.max_subdivisions = 20000;
        std::vector<double> breaks;
        for (auto z : poles) breaks.push_back(z.real());
        const double big = 3000.0;
        const auto quad = integrate_adaptive(f, -big, big, breaks, opt);
        // Two-pole integrands decay as q^-2, so both window tails contribute
        // 1/big each at leading order; higher pole counts decay faster.
        const cplx tails = (n == 2) ? cplx(2.0 / big, 0.0) : cplx(0.0, 0.0);
        REQUIRE(std::abs(closed - quad.value - tails) <
                2e-5 * std::max(1.0, std::abs(closed)));
    }
}

TEST_CASE("pole-residue amplitudes", "[quadrature]") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> ur(-1.5, 1.5);

    ReducedAmplitude amp;
    std::vector<cplx> poles{{-0.7, -0.3}, {0.4, -0.55}, {1.1, 0.2}, {-0.2, 0.6}};
    std::vector<cplx> residues{{0.8, 0.1}, {-0.5, 0.4}, {0.3, -0.7}, {-0.6, 0.2}};
    for (std::size_t k = 0; k < poles.size(); ++k) amp.add(poles[k], residues[k]);

    SECTION("evaluation matches the explicit sum") {
        for (int trial = 0; trial < 20; ++trial) {
            const cplx q(ur(rng), 0.0);
            cplx expect(0.0, 0.0);
            for (std::size_t k = 0; k < poles.size(); ++k)
                expect += residues[k] / (q - poles[k]);
            REQUIRE(std::abs(amp.evaluate(q) - expect) < 1e-14);
        }
    }
    SECTION("duplicate pole insertion merges residues") {
        ReducedAmplitude other = amp;
        other.add(poles[0], cplx(0.25, 0.0));
        const cplx q(0.9, 0.0);
        REQUIRE(std::abs(other.evaluate(q) - amp.evaluate(q) - 0.25 / (q - poles[0])) < 1e-14);
    }
    SECTION("integral of |f|^2 matches wide-window quadrature") {
        const double closed = amp.integrate_abs2();
        auto f = [&](double x) { return cplx(std::norm(amp.evaluate(cplx(x, 0.0))), 0.0); };
        QuadratureOptions opt;
        opt.rel_tol = 1e-10;
        opt.max_subdivisions = 40000;
        const double big = 4000.0;
        const auto quad = integrate_adaptive(f, -big, big, {-0.7, -0.2, 0.4, 1.1}, opt);
        // |f|^2 ~ |sum of residues|^2 / x^2 far out; add both analytic tails.
        cplx rsum(0.0, 0.0);
        for (auto r : residues) rsum += r;
        const double tails = 2.0 * std::norm(rsum) / big;
        REQUIRE(closed == Approx(quad.value.real() + tails).epsilon(1e-5));
        REQUIRE(closed > 0.0);
    }
}
