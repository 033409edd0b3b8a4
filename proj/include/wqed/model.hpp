// model.hpp — Hamiltonians of the waveguide-coupled Bose-Hubbard chain
//
// Builds the closed one- and two-particle sector matrices, the non-Hermitian
// effective Hamiltonian with end-site decay (optionally with uniform local
// loss), and the closed-form doublon-subspace effective model.

#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wqed/basis.hpp"
#include "wqed/errors.hpp"
#include "wqed/params.hpp"

namespace wqed {

struct SectorHamiltonian {
    int sector{1};             // particle number M, 1 or 2
    bool hermitian{true};      // true for closed sectors, false for effective ones
    Eigen::MatrixXcd matrix;   // dense d_M x d_M

    int dim() const { return static_cast<int>(matrix.rows()); }
};

// Closed one-particle sector: tridiagonal, diag eps_j, off-diagonal J.
inline SectorHamiltonian build_h1(const LatticeParams& p) {
    p.validate();
    const int n = p.sites;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (int j = 1; j <= n; ++j) h(j - 1, j - 1) = p.onsite(j);
    for (int j = 0; j + 1 < n; ++j) {
        h(j, j + 1) = p.hopping;
        h(j + 1, j) = p.hopping;
    }
    return SectorHamiltonian{1, true, std::move(h)};
}

// Closed two-particle sector in the normalized pair basis.
// Diagonal: eps_i + eps_j + U delta_ij.  Hopping carries bosonic factors:
// |i,i> <-> |i,i+-1> couples with sqrt(2) J, singly occupied neighbors with J.
inline SectorHamiltonian build_h2(const LatticeParams& p, const TwoParticleBasis& basis) {
    p.validate();
    if (basis.sites != p.sites)
        throw InvalidParams("build_h2: basis does not match params.N");
    const int d2 = basis.dim();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d2, d2);
    for (int s = 0; s < d2; ++s) {
        const auto [i, j] = basis.states[s];
        h(s, s) = p.onsite(i) + p.onsite(j) + (i == j ? p.interaction : 0.0);
        // Move one particle from site `from` to neighbor `to`; the amplitude is
        // J sqrt(n_from) sqrt(n_to + 1) in the occupation representation.
        auto hop = [&](int from, int other) {
            for (int to : {from - 1, from + 1}) {
                if (to < 1 || to > basis.sites) continue;
                const int t = basis.index(std::min(to, other), std::max(to, other));
                const double n_from = (from == other) ? 2.0 : 1.0;
                const double n_to = (to == other) ? 1.0 : 0.0;
                h(t, s) += p.hopping * std::sqrt(n_from) * std::sqrt(n_to + 1.0);
            }
        };
        if (i == j) {
            hop(i, i);
        } else {
            hop(i, j);
            hop(j, i);
        }
    }
    return SectorHamiltonian{2, true, std::move(h)};
}

// Effective Hamiltonian: H_sector - i(kappa/2)(n_1 + n_N), projected to the
// sector, plus, when include_loss, the uniform term -i(gamma/2) sum_i n_i
// which equals -i(gamma/2) M identity in the M-particle sector.
inline SectorHamiltonian build_effective(const LatticeParams& p, int sector,
                                         bool include_loss = false) {
    p.validate();
    if (sector != 1 && sector != 2)
        throw InvalidParams("build_effective: sector must be 1 or 2");
    const cplx half_kappa(0.0, -0.5 * p.coupling);
    SectorHamiltonian ham;
    if (sector == 1) {
        ham = build_h1(p);
        ham.matrix(0, 0) += half_kappa;
        ham.matrix(p.sites - 1, p.sites - 1) += half_kappa;
    } else {
        const TwoParticleBasis basis(p.sites);
        ham = build_h2(p, basis);
        for (int s = 0; s < basis.dim(); ++s) {
            const auto [i, j] = basis.states[s];
            const int n_edges = (i == 1) + (j == 1) + (i == p.sites) + (j == p.sites);
            ham.matrix(s, s) += half_kappa * static_cast<double>(n_edges);
        }
    }
    if (include_loss) {
        const cplx shift(0.0, -0.5 * p.loss * sector);
        ham.matrix.diagonal().array() += shift;
    }
    ham.hermitian = false;
    return ham;
}

// Doublon-subspace effective model obtained by decoupling the doubly occupied
// states from the singly occupied ones at second order in J/U.
struct DoublonEffectiveModel {
    Eigen::MatrixXd matrix;            // N x N, real symmetric
    double quasiperiodic_eff{0.0};     // h_D = 2h
    std::vector<double> hoppings_eff;  // J_Dj per bond
    double predicted_transition{0.0};  // h/J = 2J/U
};

inline DoublonEffectiveModel build_sw_doublon(const LatticeParams& p) {
    p.validate();
    if (!(p.interaction > 0.0))
        throw InvalidParams("build_sw_doublon: U must be > 0");
    const int n = p.sites;
    DoublonEffectiveModel m;
    m.quasiperiodic_eff = 2.0 * p.quasiperiodic;
    m.predicted_transition = 2.0 * p.hopping / p.interaction;
    m.matrix = Eigen::MatrixXd::Zero(n, n);
    for (int j = 1; j <= n; ++j)
        m.matrix(j - 1, j - 1) = m.quasiperiodic_eff *
                                     std::cos(2.0 * std::numbers::pi * p.incommensuration * j) +
                                 p.interaction;
    m.hoppings_eff.reserve(n > 0 ? n - 1 : 0);
    const double u2 = p.interaction * p.interaction;
    for (int j = 1; j < n; ++j) {
        const double de = p.onsite(j + 1) - p.onsite(j);
        const double denom = u2 - de * de;
        if (std::abs(denom) < 1e-9)
            throw ResonantDenominator("build_sw_doublon: U^2 - (eps_{j+1}-eps_j)^2 vanishes at bond " +
                                      std::to_string(j));
        const double jd = 2.0 * p.hopping * p.hopping * p.interaction / denom;
        m.hoppings_eff.push_back(jd);
        m.matrix(j - 1, j) = jd;
        m.matrix(j, j - 1) = jd;
    }
    return m;
}

} // namespace wqed
