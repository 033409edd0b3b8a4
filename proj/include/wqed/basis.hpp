// basis.hpp — Two-particle Fock basis and bosonic ladder maps

#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wqed/errors.hpp"

namespace wqed {

using cplx = std::complex<double>;

// Ordered pairs |i,j> with 1 <= i <= j <= N, enumerated lexicographically:
// (1,1), (1,2), ..., (1,N), (2,2), ..., (N,N).
// States are normalized, |i,j> = a_i^dag a_j^dag / sqrt(1 + delta_ij) |0>.
struct TwoParticleBasis {
    int sites{0};
    std::vector<std::pair<int, int>> states; // 1-based site pairs
    std::map<std::pair<int, int>, int> index_of;
    std::vector<double> norm; // 1 / sqrt(1 + delta_ij)

    TwoParticleBasis() = default;

    explicit TwoParticleBasis(int n_sites) : sites(n_sites) {
        if (n_sites < 1) throw InvalidParams("TwoParticleBasis: N must be >= 1");
        states.reserve(static_cast<std::size_t>(n_sites) * (n_sites + 1) / 2);
        for (int i = 1; i <= n_sites; ++i) {
            for (int j = i; j <= n_sites; ++j) {
                index_of[{i, j}] = static_cast<int>(states.size());
                states.emplace_back(i, j);
                norm.push_back(i == j ? 1.0 / std::sqrt(2.0) : 1.0);
            }
        }
    }

    int dim() const { return static_cast<int>(states.size()); }

    // Linear index of |i,j| without ordering assumptions on (i, j).
    int index(int i, int j) const {
        if (i > j) std::swap(i, j);
        return index_of.at({i, j});
    }
};

// Creation operator a_site^dag as a matrix from the (M)-particle sector to
// the (M+1)-particle sector, M in {0, 1}, in the normalized Fock bases:
//   a_j^dag |0> = |j>,   a_j^dag |m> = sqrt(1 + delta_jm) |min(j,m), max(j,m)>.
inline Eigen::MatrixXd creation_matrix_0to1(int site, int n_sites) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n_sites, 1);
    c(site - 1, 0) = 1.0;
    return c;
}

inline Eigen::MatrixXd creation_matrix_1to2(int site, const TwoParticleBasis& basis) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(basis.dim(), basis.sites);
    for (int m = 1; m <= basis.sites; ++m) {
        const double amp = (m == site) ? std::sqrt(2.0) : 1.0;
        c(basis.index(site, m), m - 1) = amp;
    }
    return c;
}

// Apply a_site^dag to a sector-M amplitude vector (M = 0 or 1).
inline Eigen::VectorXcd apply_creation(int site, const Eigen::VectorXcd& vec,
                                       const TwoParticleBasis& basis) {
    if (site < 1 || site > basis.sites)
        throw InvalidParams("apply_creation: site out of range");
    if (vec.size() == 1) {
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(basis.sites);
        out(site - 1) = vec(0);
        return out;
    }
    if (vec.size() == basis.sites) {
        return creation_matrix_1to2(site, basis).cast<cplx>() * vec;
    }
    throw InvalidParams("apply_creation: vector is not a 0- or 1-particle sector amplitude");
}

} // namespace wqed
