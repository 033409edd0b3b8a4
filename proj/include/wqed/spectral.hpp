// spectral.hpp — Eigendecompositions, resolvents, and localisation functionals

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "wqed/basis.hpp"
#include "wqed/errors.hpp"
#include "wqed/model.hpp"

namespace wqed {

struct HermitianSpectrum {
    int sector{1};
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // orthonormal columns
};

// Paired right/left eigenvectors of a complex-symmetric sector Hamiltonian.
// Since H_eff = H_eff^T, left eigenvectors are plain transposes of the right
// ones; columns are normalized so that v^T v = 1 (complex, no conjugation).
struct BiorthogonalSpectrum {
    int sector{1};
    Eigen::VectorXcd values;  // sorted by (Re, Im) ascending
    Eigen::MatrixXcd right;   // right eigenvectors in columns
    double condition{1.0};    // condition number of the right-eigenvector matrix

    // Left eigenvector row alpha is right.col(alpha).transpose().
    Eigen::MatrixXcd left() const { return right.transpose(); }
};

inline HermitianSpectrum eig_hermitian(const SectorHamiltonian& ham) {
    if (!ham.hermitian)
        throw InvalidParams("eig_hermitian: Hamiltonian is not flagged Hermitian");
    const Eigen::MatrixXd h = ham.matrix.real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success)
        throw ConvergenceFailure("eig_hermitian: solver did not converge");
    return HermitianSpectrum{ham.sector, solver.eigenvalues(), solver.eigenvectors()};
}

inline BiorthogonalSpectrum eig_biorthogonal(const SectorHamiltonian& ham,
                                             double condition_limit = 1e8) {
    const Eigen::MatrixXcd& h = ham.matrix;
    const double asym = (h - h.transpose()).norm();
    if (asym > 1e-12 * std::max(1.0, h.norm()))
        throw InvalidParams("eig_biorthogonal: matrix is not complex symmetric");
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success)
        throw ConvergenceFailure("eig_biorthogonal: solver did not converge");

    const int d = static_cast<int>(h.rows());
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    const auto& vals = solver.eigenvalues();
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (vals(a).real() != vals(b).real()) return vals(a).real() < vals(b).real();
        return vals(a).imag() < vals(b).imag();
    });

    BiorthogonalSpectrum spec;
    spec.sector = ham.sector;
    spec.values.resize(d);
    spec.right.resize(d, d);
    for (int k = 0; k < d; ++k) {
        spec.values(k) = vals(order[k]);
        Eigen::VectorXcd v = solver.eigenvectors().col(order[k]);
        const cplx s = (v.transpose() * v)(0, 0);
        if (std::abs(s) < 1e-12 * v.squaredNorm())
            throw NearDefective("eig_biorthogonal: self-orthogonal eigenvector (exceptional point)");
        spec.right.col(k) = v / std::sqrt(s);
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(spec.right);
    const double smin = svd.singularValues()(d - 1);
    spec.condition = (smin > 0.0) ? svd.singularValues()(0) / smin
                                  : std::numeric_limits<double>::infinity();
    if (spec.condition > condition_limit)
        throw NearDefective("eig_biorthogonal: right-eigenvector condition " +
                            std::to_string(spec.condition) + " exceeds limit");
    return spec;
}

// <bra| (E - H)^-1 |ket> via the spectral sum over a Hermitian spectrum.
// bra/ket are linear indices into the sector's normalized Fock basis.
inline cplx resolvent_element(cplx energy, int bra, int ket, const HermitianSpectrum& spec) {
    const int d = static_cast<int>(spec.values.size());
    if (bra < 0 || bra >= d || ket < 0 || ket >= d)
        throw InvalidParams("resolvent_element: basis index out of range");
    cplx acc(0.0, 0.0);
    for (int b = 0; b < d; ++b) {
        const cplx den = energy - spec.values(b);
        if (std::abs(den) < 1e-12)
            throw PoleProximity("resolvent_element: E within 1e-12 of an eigenvalue");
        acc += spec.vectors(bra, b) * spec.vectors(ket, b) / den;
    }
    return acc;
}

// Participation ratio R(alpha) = 1 / sum_{i<=j} |c_{ij}^alpha|^4 and its
// d2-logarithm. alpha is 1-based, matching the energy-ordered labelling.
struct ParticipationRatio {
    double value{0.0};
    double log_dim{0.0}; // log_{d2} R
};

inline ParticipationRatio participation_ratio(int alpha, const HermitianSpectrum& spec) {
    const int d = static_cast<int>(spec.values.size());
    if (alpha < 1 || alpha > d)
        throw InvalidParams("participation_ratio: alpha out of range");
    double sum4 = 0.0;
    for (int s = 0; s < d; ++s) {
        const double c2 = spec.vectors(s, alpha - 1) * spec.vectors(s, alpha - 1);
        sum4 += c2 * c2;
    }
    ParticipationRatio r;
    r.value = 1.0 / sum4;
    r.log_dim = std::log(r.value) / std::log(static_cast<double>(d));
    return r;
}

// Inverse participation ratio through the residues of the diagonal resolvent
// elements: sum_{i<=j} |Res_{E->E_alpha} <i,j|G(E)|i,j>|^2. The residue at a
// nondegenerate eigenvalue is extracted from the pole-weight decomposition of
// each diagonal element, so this exercises the resolvent route rather than
// reading the eigenvector directly.
inline double pr_inverse_via_residues(int alpha, const HermitianSpectrum& spec) {
    const int d = static_cast<int>(spec.values.size());
    if (alpha < 1 || alpha > d)
        throw InvalidParams("pr_inverse_via_residues: alpha out of range");
    const double scale = std::max(spec.values.cwiseAbs().maxCoeff(), 1.0);
    const double e_alpha = spec.values(alpha - 1);
    for (int b = 0; b < d; ++b) {
        if (b != alpha - 1 && std::abs(spec.values(b) - e_alpha) < 1e-9 * scale)
            throw DegenerateEigenvalue("pr_inverse_via_residues: eigenvalue " +
                                       std::to_string(alpha) + " is degenerate");
    }
    double acc = 0.0;
    for (int s = 0; s < d; ++s) {
        // Diagonal element <s|G(E)|s> = sum_b w_{sb} / (E - E_b); the residue at
        // E_alpha is the weight attached to the matching pole.
        double residue = 0.0;
        for (int b = 0; b < d; ++b) {
            if (std::abs(spec.values(b) - e_alpha) < 1e-9 * scale)
                residue += spec.vectors(s, b) * spec.vectors(s, b);
        }
        acc += residue * residue;
    }
    return acc;
}

namespace detail {

inline double localisation_length_inv(cplx energy, int bra, int ket,
                                      const HermitianSpectrum& spec, int n_sites) {
    if (n_sites < 2)
        throw InvalidParams("localisation length: N must be >= 2");
    const cplx g = resolvent_element(energy, bra, ket, spec);
    const double mag2 = std::norm(g);
    if (!(mag2 > 0.0)) return std::numeric_limits<double>::infinity();
    return -std::log(mag2) / (2.0 * (n_sites - 1));
}

} // namespace detail

// 1/lambda_1 = -(1 / 2(N-1)) ln |<N|G(E)|1>|^2 at the supplied complex energy.
inline double localisation_length_1p(cplx energy, const HermitianSpectrum& spec, int n_sites) {
    if (spec.sector != 1 || spec.values.size() != n_sites)
        throw InvalidParams("localisation_length_1p: spectrum is not a matching 1-particle sector");
    return detail::localisation_length_inv(energy, n_sites - 1, 0, spec, n_sites);
}

// 1/lambda_2 via the two-particle resolvent element <N,N|G(E)|1,1>.
inline double localisation_length_2p(cplx energy, const HermitianSpectrum& spec,
                                     const TwoParticleBasis& basis) {
    if (spec.sector != 2 || spec.values.size() != basis.dim())
        throw InvalidParams("localisation_length_2p: spectrum is not a matching 2-particle sector");
    const int n = basis.sites;
    return detail::localisation_length_inv(energy, basis.index(n, n), basis.index(1, 1),
                                           spec, n);
}

} // namespace wqed
