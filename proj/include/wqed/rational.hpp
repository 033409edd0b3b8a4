// rational.hpp — Pole-residue forms and closed-form line integrals
//
// Every momentum convolution in the scattering module reduces to integrals of
// rational functions whose poles sit strictly off the real axis. Products of
// simple poles are integrated by partial fractions; |f|^2 of a pole-residue
// form integrates by pairing poles across the two half-planes.

#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "wqed/errors.hpp"

namespace wqed {

using cplx = std::complex<double>;

// Rational function of one momentum variable with only simple poles and no
// polynomial part: f(q) = sum_k residue_k / (q - pole_k).
struct ReducedAmplitude {
    std::vector<cplx> poles;
    std::vector<cplx> residues;

    void add(cplx pole, cplx residue) {
        if (residue == cplx(0.0, 0.0)) return;
        for (std::size_t k = 0; k < poles.size(); ++k) {
            if (poles[k] == pole) {
                residues[k] += residue;
                return;
            }
        }
        poles.push_back(pole);
        residues.push_back(residue);
    }

    cplx evaluate(cplx q) const {
        cplx acc(0.0, 0.0);
        for (std::size_t k = 0; k < poles.size(); ++k) acc += residues[k] / (q - poles[k]);
        return acc;
    }

    // integral over the real line of |f(p)|^2. Pairs (a, b) contribute only
    // when both poles lie in the same half-plane; the pair denominator
    // z_a - conj(z_b) then has nonzero imaginary part, so the sum is regular.
    double integrate_abs2() const {
        cplx acc(0.0, 0.0);
        const cplx two_pi_i(0.0, 2.0 * std::acos(-1.0));
        for (std::size_t a = 0; a < poles.size(); ++a) {
            const bool a_lower = poles[a].imag() < 0.0;
            if (poles[a].imag() == 0.0)
                throw IntegrationFailure("ReducedAmplitude: pole on the real axis");
            for (std::size_t b = 0; b < poles.size(); ++b) {
                const bool b_lower = poles[b].imag() < 0.0;
                if (a_lower != b_lower) continue;
                const cplx term = residues[a] * std::conj(residues[b]) /
                                  (poles[a] - std::conj(poles[b]));
                acc += a_lower ? -two_pi_i * term : two_pi_i * term;
            }
        }
        return acc.real();
    }
};

// integral over the real line of prod_k 1/(q - z_k) for >= 2 distinct poles,
// none real. Closing the contour below gives -2 pi i times the sum of lower
// half-plane residues.
inline cplx line_integral_simple_poles(const std::vector<cplx>& z) {
    if (z.size() < 2)
        throw IntegrationFailure("line_integral_simple_poles: integrand does not decay");
    const cplx minus_two_pi_i(0.0, -2.0 * std::acos(-1.0));
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i].imag() == 0.0)
            throw IntegrationFailure("line_integral_simple_poles: pole on the real axis");
        if (z[i].imag() > 0.0) continue;
        cplx res(1.0, 0.0);
        for (std::size_t j = 0; j < z.size(); ++j) {
            if (j == i) continue;
            const cplx d = z[i] - z[j];
            if (d == cplx(0.0, 0.0))
                throw IntegrationFailure("line_integral_simple_poles: coincident poles");
            res /= d;
        }
        acc += res;
    }
    return minus_two_pi_i * acc;
}

// Smallest pairwise distance among poles in the same half-plane; used to
// decide whether the closed-form path is numerically safe.
inline double min_same_half_separation(const std::vector<cplx>& z) {
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = i + 1; j < z.size(); ++j) {
            if ((z[i].imag() < 0.0) != (z[j].imag() < 0.0)) continue;
            dmin = std::min(dmin, std::abs(z[i] - z[j]));
        }
    return dmin;
}

} // namespace wqed
