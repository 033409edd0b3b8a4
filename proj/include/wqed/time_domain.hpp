// time_domain.hpp — Matrix-exponential oracle for the spectral amplitudes
//
// Independently verifies the spectral-sum Green's functions by propagating
// the effective Hamiltonian on a uniform time grid (scaling-and-squaring
// exponential per step, composite Simpson transform to momentum space). No
// eigendecomposition is involved anywhere on this path.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "wqed/errors.hpp"
#include "wqed/model.hpp"
#include "wqed/scattering.hpp"
#include "wqed/spectral.hpp"

namespace wqed {

class TimeDomainOracle {
public:
    TimeDomainOracle(const LatticeParams& p, double tmax, int nsteps)
        : params_(p), tmax_(tmax), nsteps_(nsteps) {
        p.validate();
        if (p.sites > 4)
            throw InvalidParams("TimeDomainOracle: N <= 4 cost guard");
        if (nsteps < 2 || nsteps % 2 != 0)
            throw InvalidParams("TimeDomainOracle: nsteps must be even and >= 2");
        if (!(tmax > 0.0)) throw InvalidParams("TimeDomainOracle: tmax must be > 0");
        dt_ = tmax / nsteps;
        basis_ = TwoParticleBasis(p.sites);
        const cplx m_i_dt(0.0, -dt_);
        u1_ = (m_i_dt * build_effective(p, 1, true).matrix).exp();
        u2_ = (m_i_dt * build_effective(p, 2, true).matrix).exp();
        for (Port port : {Port::left, Port::right}) {
            const int s = (port == Port::left) ? 1 : p.sites;
            annih_[port == Port::left ? 0 : 1] =
                creation_matrix_1to2(s, basis_).transpose().cast<cplx>();
        }
    }

    // Largest tmax * min |Im xi| margin the grid provides; callers size tmax
    // from the effective spectra so that decay is complete.
    static double recommended_tmax(const LatticeParams& p, double margin = 20.0) {
        double min_decay = std::numeric_limits<double>::infinity();
        for (int sector : {1, 2}) {
            const auto spec = eig_biorthogonal(build_effective(p, sector, true));
            for (int k = 0; k < spec.values.size(); ++k) {
                const double decay = -spec.values(k).imag();
                if (decay > 1e-12) min_decay = std::min(min_decay, decay);
            }
        }
        return margin / min_decay;
    }

    // Comparable to g2_reduced: -i kappa times the transform of the one-photon
    // propagator matrix element.
    cplx two_point(double q, const PortPair& ports) const {
        const int in = site_index(ports.input);
        const int out = site_index(ports.output);
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(params_.sites);
        v(in) = 1.0;
        cplx acc(0.0, 0.0);
        const cplx step_phase = std::exp(cplx(0.0, q * dt_));
        cplx phase(1.0, 0.0);
        for (int n = 0; n <= nsteps_; ++n) {
            acc += simpson_weight(n) * phase * v(out);
            if (n < nsteps_) {
                v = u1_ * v;
                phase *= step_phase;
            }
        }
        if (v.norm() > 1e-8)
            throw InsufficientDecay("TimeDomainOracle::two_point: propagator has not decayed at tmax");
        const cplx m_i(0.0, -1.0);
        return cplx(0.0, -params_.coupling) * m_i * acc * (dt_ / 3.0);
    }

    // Comparable to g4_g2: the four permutation terms of the fully resonant
    // two-photon diagram, each a product of three nested transforms.
    cplx four_point_g2(double p1, double p2, double q1, double q2,
                       const TwoPhotonPorts& ports) const {
        detail::check_shell(p1, p2, q1, q2);
        const double total = q1 + q2;
        const int n1 = params_.sites;
        const int d2 = basis_.dim();
        const int c = site_index(ports.input);
        const int a = site_index(ports.out1);
        const int b = site_index(ports.out2);

        // One stepping pass accumulating every needed frequency transform.
        Eigen::VectorXcd col = Eigen::VectorXcd::Zero(n1); // E1(t) e_c
        col(c) = 1.0;
        Eigen::VectorXcd row_a = Eigen::VectorXcd::Zero(n1); // E1(t)^T e_a
        row_a(a) = 1.0;
        Eigen::VectorXcd row_b = Eigen::VectorXcd::Zero(n1);
        row_b(b) = 1.0;
        Eigen::MatrixXcd e2 = Eigen::MatrixXcd::Identity(d2, d2);

        Eigen::VectorXcd col_q1 = Eigen::VectorXcd::Zero(n1);
        Eigen::VectorXcd col_q2 = Eigen::VectorXcd::Zero(n1);
        Eigen::VectorXcd row_a_p1 = Eigen::VectorXcd::Zero(n1);
        Eigen::VectorXcd row_b_p2 = Eigen::VectorXcd::Zero(n1);
        Eigen::MatrixXcd m2 = Eigen::MatrixXcd::Zero(d2, d2);

        const cplx ph_q1 = std::exp(cplx(0.0, q1 * dt_));
        const cplx ph_q2 = std::exp(cplx(0.0, q2 * dt_));
        const cplx ph_p1 = std::exp(cplx(0.0, p1 * dt_));
        const cplx ph_p2 = std::exp(cplx(0.0, p2 * dt_));
        const cplx ph_tot = std::exp(cplx(0.0, total * dt_));
        cplx cq1(1.0, 0.0), cq2(1.0, 0.0), cp1(1.0, 0.0), cp2(1.0, 0.0), ct(1.0, 0.0);

        const Eigen::MatrixXcd u1_t = u1_.transpose();
        for (int n = 0; n <= nsteps_; ++n) {
            const double w = simpson_weight(n);
            col_q1 += (w * cq1) * col;
            col_q2 += (w * cq2) * col;
            row_a_p1 += (w * cp1) * row_a;
            row_b_p2 += (w * cp2) * row_b;
            m2 += (w * ct) * e2;
            if (n < nsteps_) {
                col = u1_ * col;
                row_a = u1_t * row_a;
                row_b = u1_t * row_b;
                e2 = u2_ * e2;
                cq1 *= ph_q1;
                cq2 *= ph_q2;
                cp1 *= ph_p1;
                cp2 *= ph_p2;
                ct *= ph_tot;
            }
        }
        if (col.norm() > 1e-8 || e2.norm() > 1e-8 * d2)
            throw InsufficientDecay("TimeDomainOracle::four_point_g2: propagator has not decayed at tmax");

        const cplx m_i_dt3 = cplx(0.0, -1.0) * (dt_ / 3.0);
        col_q1 *= m_i_dt3;
        col_q2 *= m_i_dt3;
        row_a_p1 *= m_i_dt3;
        row_b_p2 *= m_i_dt3;
        m2 *= m_i_dt3;

        const auto& ann_a = annih_[a == 0 ? 0 : 1];
        const auto& ann_b = annih_[b == 0 ? 0 : 1];
        const Eigen::MatrixXcd crea_c =
            creation_matrix_1to2(c + 1, basis_).cast<cplx>();

        // Permutations: (q_i absorbed first) x (p_j emitted first at its port).
        const Eigen::MatrixXcd mid = m2 * crea_c;
        const cplx t_q1_first_a = (row_b_p2.transpose() * ann_a * mid * col_q1)(0, 0);
        const cplx t_q1_first_b = (row_a_p1.transpose() * ann_b * mid * col_q1)(0, 0);
        const cplx t_q2_first_a = (row_b_p2.transpose() * ann_a * mid * col_q2)(0, 0);
        const cplx t_q2_first_b = (row_a_p1.transpose() * ann_b * mid * col_q2)(0, 0);

        const double kappa = params_.coupling;
        return cplx(0.0, -kappa * kappa / (2.0 * std::numbers::pi)) *
               (t_q1_first_a + t_q1_first_b + t_q2_first_a + t_q2_first_b);
    }

private:
    int site_index(Port p) const { return p == Port::left ? 0 : params_.sites - 1; }

    double simpson_weight(int n) const {
        if (n == 0 || n == nsteps_) return 1.0;
        return (n % 2 == 1) ? 4.0 : 2.0;
    }

    LatticeParams params_;
    double tmax_, dt_{0.0};
    int nsteps_;
    TwoParticleBasis basis_;
    Eigen::MatrixXcd u1_, u2_;
    Eigen::MatrixXcd annih_[2]; // a_site as 1p x 2p map, for site 1 and site N
};

} // namespace wqed
