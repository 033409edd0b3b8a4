// scattering.hpp — Few-photon scattering amplitudes and transmission probabilities
//
// Amplitudes are spectral sums over the biorthogonal eigensystem of the
// effective Hamiltonian. All wavepacket convolutions are rational-function
// integrals done in closed form by residue calculus; the final output
// integrals over (P, p1) run through nested adaptive quadrature. Permutation
// terms with coincident-momentum singularities are paired algebraically, so
// no regulator is ever introduced.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "wqed/basis.hpp"
#include "wqed/errors.hpp"
#include "wqed/model.hpp"
#include "wqed/params.hpp"
#include "wqed/quadrature.hpp"
#include "wqed/rational.hpp"
#include "wqed/spectral.hpp"

namespace wqed {

enum class Port { left, right }; // waveguide at site 1, waveguide at site N

// One-photon scattering geometry.
struct PortPair {
    Port input{Port::left};
    Port output{Port::right};
    bool reflection() const { return input == output; }
};

// Two-photon geometry: both photons enter through `input`; `out1`/`out2` are
// the detection waveguides of the two output momenta.
struct TwoPhotonPorts {
    Port input{Port::left};
    Port out1{Port::right};
    Port out2{Port::right};

    static TwoPhotonPorts transmission() { return {Port::left, Port::right, Port::right}; }
    static TwoPhotonPorts from(const PortPair& p) { return {p.input, p.output, p.output}; }
};

struct WavepacketSpec {
    enum class Shape { lorentzian, delta_pulse };
    double center{0.0};
    double width{0.01};
    Shape shape{Shape::lorentzian};

    // chi_k(q) = sqrt(sigma/pi) / (q - k + i sigma)
    cplx amplitude(double q) const {
        return std::sqrt(width / std::numbers::pi) / cplx(q - center, width);
    }
};

// Normalisation constant of the two-photon Lorentzian input.
inline double input_norm(double k1, double k2, double sigma) {
    const double dk = k1 - k2;
    return 1.0 + 4.0 * sigma * sigma / (dk * dk + 4.0 * sigma * sigma);
}

// ---------------------------------------------------------------------------
// GreenEvaluator: precomputed coupling-amplitude chains
// ---------------------------------------------------------------------------

class GreenEvaluator {
public:
    explicit GreenEvaluator(const LatticeParams& p)
        : params_(p), basis_(p.sites) {
        p.validate();
        if (!(p.coupling > 0.0))
            throw InvalidParams("GreenEvaluator: kappa must be > 0");
        s1_ = eig_biorthogonal(build_effective(p, 1, true));
        s2_ = eig_biorthogonal(build_effective(p, 2, true));
        build_chains();
    }

    // Rebuild from previously computed effective spectra (cache reload); the
    // coupling chains are deterministic functions of the spectra.
    GreenEvaluator(const LatticeParams& p, BiorthogonalSpectrum s1, BiorthogonalSpectrum s2)
        : params_(p), basis_(p.sites), s1_(std::move(s1)), s2_(std::move(s2)) {
        p.validate();
        if (!(p.coupling > 0.0))
            throw InvalidParams("GreenEvaluator: kappa must be > 0");
        if (s1_.values.size() != p.sites || s2_.values.size() != basis_.dim())
            throw InvalidParams("GreenEvaluator: spectra do not match params");
        build_chains();
    }

    const LatticeParams& params() const { return params_; }
    const TwoParticleBasis& basis() const { return basis_; }
    const BiorthogonalSpectrum& one_particle() const { return s1_; }
    const BiorthogonalSpectrum& two_particle() const { return s2_; }
    int dim1() const { return static_cast<int>(s1_.values.size()); }
    int dim2() const { return static_cast<int>(s2_.values.size()); }

    int site(Port p) const { return p == Port::left ? 1 : params_.sites; }

    // <0| a_port |xi_mu^(1)> over mu.
    const Eigen::VectorXcd& edge(Port p) const { return edge_[idx(p)]; }

    // t_mu^(out,in) = <0|a_out|xi_mu><bar xi_mu|a_in^dag|0>
    Eigen::VectorXcd t_vector(Port out, Port in) const {
        return edge_[idx(out)].cwiseProduct(edge_[idx(in)]);
    }

    // A state whose coupling to a port sits at eigensolver-noise level is
    // treated as fully decoupled; its (real) eigenvalue must never reach a
    // denominator, where an exactly resonant query would produce 0 * inf.
    bool decoupled(int mu, Port c) const {
        return std::abs(edge_[idx(c)](mu)) <= 1e-13 * edge_[idx(c)].norm();
    }

    // g_{out,in}(z) = sum_mu t_mu / (z - xi_mu), decoupled terms skipped.
    cplx g_smooth(cplx z, Port out, Port in) const {
        const auto t = t_vector(out, in);
        cplx acc(0.0, 0.0);
        for (int m = 0; m < dim1(); ++m) {
            if (decoupled(m, out) || decoupled(m, in)) continue;
            acc += t(m) / (z - s1_.values(m));
        }
        return acc;
    }

    // W_{nu beta mu}^{(y,x;c)} matrix element, for regression tests.
    cplx w_element(int nu, int beta, int mu, Port y, Port x, Port c) const {
        return edge_[idx(y)](nu) * emit_[idx(x)](nu, beta) *
               absorb_[idx(c)](beta, mu) * edge_[idx(c)](mu);
    }

    // K_{nu mu}^{(y,x,c)}(P) = sum_beta W_{nu beta mu} / (P - xi_beta^(2)).
    Eigen::MatrixXcd collapsed_kernel(cplx total_energy, Port y, Port x, Port c) const {
        const int d2 = dim2();
        double min_dist = std::numeric_limits<double>::infinity();
        for (int b = 0; b < d2; ++b)
            min_dist = std::min(min_dist, std::abs(total_energy - s2_.values(b)));
        const Eigen::VectorXcd wy = edge_[idx(y)];
        const Eigen::VectorXcd wc = edge_[idx(c)];
        if (min_dist > 1e-12) {
            Eigen::VectorXcd inv(d2);
            for (int b = 0; b < d2; ++b) inv(b) = 1.0 / (total_energy - s2_.values(b));
            Eigen::MatrixXcd k = emit_[idx(x)] * inv.asDiagonal() * absorb_[idx(c)];
            return wy.asDiagonal() * k * wc.asDiagonal();
        }
        // A pole was hit exactly; keep only zero-weight channels (decoupled
        // states), otherwise the query is genuinely singular.
        Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(dim1(), dim1());
        for (int b = 0; b < d2; ++b) {
            const Eigen::VectorXcd col = wy.cwiseProduct(emit_[idx(x)].col(b));
            const Eigen::VectorXcd row = absorb_[idx(c)].row(b).transpose().cwiseProduct(wc);
            const double weight = col.norm() * row.norm();
            const cplx den = total_energy - s2_.values(b);
            if (weight == 0.0) continue;
            if (den == cplx(0.0, 0.0))
                throw PoleProximity("collapsed_kernel: total energy on a coupled two-particle pole");
            k += (col / den) * row.transpose();
        }
        return k;
    }

private:
    static int idx(Port p) { return p == Port::left ? 0 : 1; }

    void build_chains() {
        const auto& r1 = s1_.right;
        const auto& r2 = s2_.right;
        for (Port port : {Port::left, Port::right}) {
            const int i = idx(port);
            const int s = site(port);
            edge_[i] = r1.row(s - 1).transpose();
            // Eigensolver noise on genuinely decoupled states is flushed to an
            // exact zero; downstream pole skips rely on it.
            const double floor = 1e-13 * edge_[i].norm();
            for (int m = 0; m < edge_[i].size(); ++m)
                if (std::abs(edge_[i](m)) <= floor) edge_[i](m) = cplx(0.0, 0.0);
            const Eigen::MatrixXd c = creation_matrix_1to2(s, basis_);
            emit_[i] = r1.transpose() * c.transpose().cast<cplx>() * r2;   // <xi1|a_s|xi2>
            absorb_[i] = r2.transpose() * c.cast<cplx>() * r1;             // <xi2|a_s^dag|xi1>
        }
    }

    LatticeParams params_;
    TwoParticleBasis basis_;
    BiorthogonalSpectrum s1_, s2_;
    Eigen::VectorXcd edge_[2];
    Eigen::MatrixXcd emit_[2];   // d1 x d2
    Eigen::MatrixXcd absorb_[2]; // d2 x d1
};

// ---------------------------------------------------------------------------
// Two-point functions
// ---------------------------------------------------------------------------

// Delta-stripped two-point Green's function, sum_mu (-i kappa) t_mu / (q - xi_mu).
inline cplx g2_reduced(double q, const PortPair& ports, const GreenEvaluator& ev) {
    const cplx m_i_kappa(0.0, -ev.params().coupling);
    return m_i_kappa * ev.g_smooth(q, ports.output, ports.input);
}

struct OnePhotonElement {
    int identity_coeff{0}; // 1 for reflection geometry
    cplx smooth;           // the Green's-function part

    cplx total() const { return static_cast<double>(identity_coeff) + smooth; }
};

inline OnePhotonElement s1_element(double q, const PortPair& ports, const GreenEvaluator& ev) {
    return OnePhotonElement{ports.reflection() ? 1 : 0, g2_reduced(q, ports, ev)};
}

// ---------------------------------------------------------------------------
// Four-point functions (delta-stripped, total momentum on shell)
// ---------------------------------------------------------------------------

namespace detail {

inline void check_shell(double p1, double p2, double q1, double q2) {
    const double scale = std::max({1.0, std::abs(p1), std::abs(p2), std::abs(q1), std::abs(q2)});
    if (std::abs(p1 + p2 - q1 - q2) > 1e-9 * scale)
        throw InvalidParams("four-point amplitude: momenta violate p1+p2 = q1+q2");
}

// Paired permutation sum S_xy(u,v); the (u - v)^-1 singularity of the raw
// permutation terms has been cancelled algebraically:
//   S_xy(u,v) = -sum_{mu nu} t^x_mu t^y_nu (P - xi_mu - xi_nu) /
//               [(u-xi_mu)(v-xi_mu)(P-u-xi_nu)(P-v-xi_nu)]
inline cplx paired_sum(cplx u, cplx v, cplx total, const Eigen::VectorXcd& tx,
                       const Eigen::VectorXcd& ty, const Eigen::VectorXcd& xi) {
    cplx a(0.0, 0.0), a_xi(0.0, 0.0), b(0.0, 0.0), b_xi(0.0, 0.0);
    const int d = static_cast<int>(xi.size());
    for (int m = 0; m < d; ++m) {
        if (tx(m) != cplx(0.0, 0.0)) {
            const cplx f = tx(m) / ((u - xi(m)) * (v - xi(m)));
            a += f;
            a_xi += f * xi(m);
        }
        if (ty(m) != cplx(0.0, 0.0)) {
            const cplx f = ty(m) / ((total - u - xi(m)) * (total - v - xi(m)));
            b += f;
            b_xi += f * xi(m);
        }
    }
    return -(total * a * b - a_xi * b - a * b_xi);
}

} // namespace detail

// G^(1): two independent one-photon transitions, all four {q}x{p} permutations.
inline cplx g4_g1(double p1, double p2, double q1, double q2,
                  const TwoPhotonPorts& ports, const GreenEvaluator& ev) {
    detail::check_shell(p1, p2, q1, q2);
    const double total = q1 + q2;
    const auto ta = ev.t_vector(ports.out1, ports.input);
    const auto tb = ev.t_vector(ports.out2, ports.input);
    const auto& xi = ev.one_particle().values;
    const double kappa = ev.params().coupling;
    const cplx pref = cplx(0.0, -kappa * kappa / (2.0 * std::numbers::pi));
    return pref * (detail::paired_sum(q1, p1, total, ta, tb, xi) +
                   detail::paired_sum(q1, p2, total, tb, ta, xi));
}

// G^(2): a single fully two-photon transition through the two-particle sector.
inline cplx g4_g2(double p1, double p2, double q1, double q2,
                  const TwoPhotonPorts& ports, const GreenEvaluator& ev) {
    detail::check_shell(p1, p2, q1, q2);
    const double total = q1 + q2;
    const auto& xi = ev.one_particle().values;
    const int d1 = ev.dim1();
    // Decoupled states drop out of the kernel columns; skip them so their
    // real eigenvalues cannot meet an exactly resonant momentum.
    Eigen::VectorXcd d(d1);
    for (int m = 0; m < d1; ++m)
        d(m) = ev.decoupled(m, ports.input)
                   ? cplx(0.0, 0.0)
                   : 1.0 / (q1 - xi(m)) + 1.0 / (q2 - xi(m));
    const Eigen::VectorXcd fba =
        ev.collapsed_kernel(total, ports.out2, ports.out1, ports.input) * d;
    const Eigen::VectorXcd fab =
        ev.collapsed_kernel(total, ports.out1, ports.out2, ports.input) * d;
    cplx acc(0.0, 0.0);
    for (int n = 0; n < d1; ++n) {
        if (fba(n) == cplx(0.0, 0.0) && fab(n) == cplx(0.0, 0.0)) continue;
        acc += fba(n) / (p2 - xi(n)) + fab(n) / (p1 - xi(n));
    }
    const double kappa = ev.params().coupling;
    return cplx(0.0, -kappa * kappa / (2.0 * std::numbers::pi)) * acc;
}

inline cplx g4_total(double p1, double p2, double q1, double q2,
                     const TwoPhotonPorts& ports, const GreenEvaluator& ev) {
    return g4_g1(p1, p2, q1, q2, ports, ev) + g4_g2(p1, p2, q1, q2, ports, ev);
}

// ---------------------------------------------------------------------------
// Wavepacket convolution kernel at fixed total output energy P
// ---------------------------------------------------------------------------

enum class ConvolutionMethod { residue, quadrature };

struct IntegrationStrategy {
    double rel_tol{1e-6};
    int max_subdivisions{4000};
    double outer_window_sigmas{50.0};
    double resonance_pad{10.0};      // units of kappa on both sides
    double wavepacket_pad{60.0};     // units of sigma around input momenta
    ConvolutionMethod method{ConvolutionMethod::residue};
};

namespace detail {

// All p1-independent pieces of the amplitude A(p1, P-p1) for a fixed total
// output energy P, input (k1,k2,sigma), and ports. Built once per P; the
// amplitude evaluation is then O(d1).
class RhoKernel {
public:
    RhoKernel(double total, double k1, double k2, double sigma,
              const TwoPhotonPorts& ports, const GreenEvaluator& ev,
              const IntegrationStrategy& strat)
        : total_(total), k1_(k1), k2_(k2), sigma_(sigma), ports_(ports), ev_(&ev),
          strat_(strat) {
        const auto& xi = ev.one_particle().values;
        const int d1 = ev.dim1();
        xi_ = xi;
        ta_ = ev.t_vector(ports.out1, ports.input);
        tb_ = ev.t_vector(ports.out2, ports.input);
        const cplx z1(k1, -sigma);
        const cplx z2(total - k2, sigma);

        double min_sep = std::numeric_limits<double>::infinity();
        for (int m = 0; m < d1; ++m) {
            min_sep = std::min(min_sep, std::abs(z1 - xi(m)));
            min_sep = std::min(min_sep, std::abs(cplx(k2, sigma) - std::conj(xi(m))));
        }
        use_residues_ = (strat.method == ConvolutionMethod::residue) && min_sep > 1e-8;

        kba_ = ev.collapsed_kernel(total, ports.out2, ports.out1, ports.input);
        kab_ = ev.collapsed_kernel(total, ports.out1, ports.out2, ports.input);

        if (use_residues_) {
            // chi_{k1}(q) chi_{k2}(P-q) = -(sigma/pi) / ((q - z1)(q - z2)).
            // Every amplitude chain through state mu carries the input-edge
            // factor, so decoupled states are dropped from all structures.
            const double pref = -sigma / std::numbers::pi;
            Eigen::VectorXcd a2 = Eigen::VectorXcd::Zero(d1);
            Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d1, d1);
            for (int mu = 0; mu < d1; ++mu) {
                if (ev.decoupled(mu, ports.input)) continue;
                a2(mu) = pref * (line_integral_simple_poles({z1, z2, xi(mu)}) -
                                 line_integral_simple_poles({z1, z2, total_ - xi(mu)}));
                for (int nu = 0; nu < d1; ++nu) {
                    if (ev.decoupled(nu, ports.input)) continue;
                    m(mu, nu) = -pref *
                                line_integral_simple_poles({z1, z2, xi(mu), total_ - xi(nu)});
                }
            }
            fba_ = kba_ * a2;
            fab_ = kab_ * a2;
            row_ab_ = ta_.cwiseProduct(m * tb_);
            col_ab_ = tb_.cwiseProduct(m.transpose() * ta_);
            row_ba_ = tb_.cwiseProduct(m * ta_);
            col_ba_ = ta_.cwiseProduct(m.transpose() * tb_);
        }
    }

    double total_energy() const { return total_; }

    // Full two-photon detection amplitude at output momenta (p1, P - p1).
    cplx amplitude(double p1) const {
        const double p2 = total_ - p1;
        return disconnected(p1, p2) +
               (use_residues_ ? connected_residue(p1, p2) : connected_quadrature(p1, p2));
    }

    double rho(double p1) const {
        return std::norm(amplitude(p1)) / input_norm(k1_, k2_, sigma_);
    }

    bool closed_form() const { return use_residues_; }

private:
    cplx disconnected(double p1, double p2) const {
        const WavepacketSpec w1{k1_, sigma_, WavepacketSpec::Shape::lorentzian};
        const WavepacketSpec w2{k2_, sigma_, WavepacketSpec::Shape::lorentzian};
        const cplx sa = smooth_s(p1, ports_.out1);
        const cplx sb = smooth_s(p2, ports_.out2);
        return sa * sb *
               (w1.amplitude(p1) * w2.amplitude(p2) + w1.amplitude(p2) * w2.amplitude(p1));
    }

    cplx smooth_s(double p, Port out) const {
        const double id = (out == ports_.input) ? 1.0 : 0.0;
        return id + g2_reduced(p, PortPair{ports_.input, out}, *ev_);
    }

    cplx connected_residue(double p1, double p2) const {
        const int d1 = static_cast<int>(xi_.size());
        const cplx zero(0.0, 0.0);
        cplx acc_g2(0.0, 0.0), acc_g1(0.0, 0.0);
        for (int n = 0; n < d1; ++n) {
            if (fba_(n) == zero && fab_(n) == zero && row_ab_(n) == zero &&
                col_ab_(n) == zero && row_ba_(n) == zero && col_ba_(n) == zero)
                continue;
            const cplx inv_p1 = 1.0 / (p1 - xi_(n));
            const cplx inv_p2 = 1.0 / (p2 - xi_(n));
            acc_g2 += fba_(n) * inv_p2 + fab_(n) * inv_p1;
            acc_g1 -= row_ab_(n) * inv_p1 + col_ab_(n) * inv_p2; // int chi chi S_ab(q, p1)
            acc_g1 -= row_ba_(n) * inv_p2 + col_ba_(n) * inv_p1; // int chi chi S_ba(q, p2)
        }
        const double kappa = ev_->params().coupling;
        return cplx(0.0, -kappa * kappa / (2.0 * std::numbers::pi)) * (acc_g1 + acc_g2);
    }

    cplx connected_quadrature(double p1, double p2) const {
        const WavepacketSpec w1{k1_, sigma_, WavepacketSpec::Shape::lorentzian};
        const WavepacketSpec w2{k2_, sigma_, WavepacketSpec::Shape::lorentzian};
        auto f = [&](double q) {
            return w1.amplitude(q) * w2.amplitude(total_ - q) *
                   (g4_g1(p1, p2, q, total_ - q, ports_, *ev_) +
                    g4_g2(p1, p2, q, total_ - q, ports_, *ev_));
        };
        std::vector<double> breaks{k1_, total_ - k2_};
        double lo = std::min(k1_, total_ - k2_), hi = std::max(k1_, total_ - k2_);
        for (int m = 0; m < xi_.size(); ++m) {
            breaks.push_back(xi_(m).real());
            breaks.push_back(total_ - xi_(m).real());
            lo = std::min({lo, xi_(m).real(), total_ - xi_(m).real()});
            hi = std::max({hi, xi_(m).real(), total_ - xi_(m).real()});
        }
        // Verification path: wide window, tight tolerance, and analytic q^-4
        // tail corrections so the cross-check resolves 1e-6 relative even on
        // strongly cancelling amplitudes.
        const double pad = strat_.wavepacket_pad * sigma_ +
                           strat_.resonance_pad * ev_->params().coupling + 25.0;
        QuadratureOptions opt;
        opt.rel_tol = std::min(1e-11, strat_.rel_tol * 0.01);
        opt.max_subdivisions = std::max(strat_.max_subdivisions, 40000);
        double centroid = 0.0;
        for (double x : breaks) centroid += x;
        centroid /= static_cast<double>(breaks.size());
        const double a = lo - pad, b = hi + pad;
        const cplx tails = f(b) * (b - centroid) / 3.0 + f(a) * (centroid - a) / 3.0;
        return integrate_adaptive(f, a, b, breaks, opt).value + tails;
    }

    double total_, k1_, k2_, sigma_;
    TwoPhotonPorts ports_;
    const GreenEvaluator* ev_;
    IntegrationStrategy strat_;
    bool use_residues_{true};
    Eigen::VectorXcd xi_, ta_, tb_;
    Eigen::MatrixXcd kba_, kab_;
    Eigen::VectorXcd fba_, fab_, row_ab_, col_ab_, row_ba_, col_ba_;
};

} // namespace detail

// Conditional probability density rho(p1, p2 | k1, k2) for Lorentzian inputs.
inline double rho_conditional(double p1, double p2, double k1, double k2, double sigma,
                              const TwoPhotonPorts& ports, const GreenEvaluator& ev,
                              const IntegrationStrategy& strat = {}) {
    if (!(sigma > 0.0)) throw InvalidParams("rho_conditional: sigma must be > 0");
    detail::RhoKernel kernel(p1 + p2, k1, k2, sigma, ports, ev, strat);
    return kernel.rho(p1);
}

struct TransmissionDiagnostics {
    bool clamped_negative{false};
    double raw_value{0.0};
    int outer_evaluations{0};
};

// P(k1,k2) = 1/2 int dp1 dp2 rho(p1,p2|k1,k2), evaluated as nested adaptive
// quadrature in (P = p1+p2, p1) with analytic tail estimates beyond the
// truncated windows.
inline double transmission_probability(double k1, double k2, double sigma,
                                       const TwoPhotonPorts& ports, const GreenEvaluator& ev,
                                       const IntegrationStrategy& strat = {},
                                       TransmissionDiagnostics* diag = nullptr) {
    if (!(sigma > 0.0)) throw InvalidParams("transmission_probability: sigma must be > 0");
    const auto& xi1 = ev.one_particle().values;
    const auto& xi2 = ev.two_particle().values;
    const double kappa = ev.params().coupling;

    const double pc = k1 + k2;
    const double pw = strat.outer_window_sigmas * sigma;
    const double plo = pc - pw, phi = pc + pw;
    std::vector<double> pbreaks{pc};
    for (int b = 0; b < xi2.size(); ++b)
        if (xi2(b).real() > plo && xi2(b).real() < phi) pbreaks.push_back(xi2(b).real());

    // Inner integral over p1 at fixed P, with pole-decay tails.
    auto inner = [&](double total) {
        detail::RhoKernel kernel(total, k1, k2, sigma, ports, ev, strat);
        std::vector<double> breaks{k1, k2, total - k1, total - k2};
        for (int m = 0; m < xi1.size(); ++m) {
            breaks.push_back(xi1(m).real());
            breaks.push_back(total - xi1(m).real());
        }
        double lo = *std::min_element(breaks.begin(), breaks.end());
        double hi = *std::max_element(breaks.begin(), breaks.end());
        double centroid = 0.0;
        for (double x : breaks) centroid += x;
        centroid /= static_cast<double>(breaks.size());
        const double pad = strat.wavepacket_pad * sigma + strat.resonance_pad * kappa;
        lo -= pad;
        hi += pad;
        QuadratureOptions opt;
        opt.rel_tol = strat.rel_tol * 0.1;
        opt.max_subdivisions = strat.max_subdivisions;
        auto f = [&](double p1) { return cplx(kernel.rho(p1), 0.0); };
        const auto res = integrate_adaptive(f, lo, hi, breaks, opt);
        // rho decays like |p1 - centroid|^-4 beyond the last pole.
        const double tail = kernel.rho(hi) * (hi - centroid) / 3.0 +
                            kernel.rho(lo) * (centroid - lo) / 3.0;
        return res.value.real() + tail;
    };

    QuadratureOptions outer_opt;
    outer_opt.rel_tol = strat.rel_tol;
    outer_opt.max_subdivisions = strat.max_subdivisions;
    int evals = 0;
    auto fouter = [&](double total) {
        ++evals;
        return cplx(inner(total), 0.0);
    };
    const auto outer = integrate_adaptive(fouter, plo, phi, pbreaks, outer_opt);
    // The outer integrand decays like (P - pc)^-2; estimate both tails from
    // the boundary values.
    const double tail = inner(phi) * pw + inner(plo) * pw;
    double p = 0.5 * (outer.value.real() + tail);

    if (diag) {
        diag->raw_value = p;
        diag->outer_evaluations = evals;
        diag->clamped_negative = false;
    }
    if (p < 0.0) {
        if (p < -1e-6)
            throw IntegrationFailure("transmission_probability: negative probability beyond tolerance");
        if (diag) diag->clamped_negative = true;
        return 0.0;
    }
    if (p > 1.0 + 1e-6)
        throw ProbabilityOverflow("transmission_probability: probability " + std::to_string(p) +
                                  " exceeds 1");
    return p;
}

// ---------------------------------------------------------------------------
// Delta-pulse input (closed-form three-term expression)
// ---------------------------------------------------------------------------

// Pole-residue form of the connected amplitude p -> G4(p, E-p; k1, k2).
inline ReducedAmplitude reduced_g4_in_p(double k1, double k2, const TwoPhotonPorts& ports,
                                        const GreenEvaluator& ev, bool g2_only = false) {
    const double total = k1 + k2;
    const auto& xi = ev.one_particle().values;
    const int d1 = ev.dim1();
    const auto ta = ev.t_vector(ports.out1, ports.input);
    const auto tb = ev.t_vector(ports.out2, ports.input);
    const double kappa = ev.params().coupling;
    const cplx pref(0.0, -kappa * kappa / (2.0 * std::numbers::pi));

    Eigen::VectorXcd d(d1);
    for (int m = 0; m < d1; ++m)
        d(m) = ev.decoupled(m, ports.input)
                   ? cplx(0.0, 0.0)
                   : 1.0 / (k1 - xi(m)) + 1.0 / (k2 - xi(m));
    const Eigen::VectorXcd uba =
        ev.collapsed_kernel(total, ports.out2, ports.out1, ports.input) * d;
    const Eigen::VectorXcd uab =
        ev.collapsed_kernel(total, ports.out1, ports.out2, ports.input) * d;

    const cplx ga_k1 = ev.g_smooth(k1, ports.out1, ports.input);
    const cplx ga_k2 = ev.g_smooth(k2, ports.out1, ports.input);
    const cplx gb_k1 = ev.g_smooth(k1, ports.out2, ports.input);
    const cplx gb_k2 = ev.g_smooth(k2, ports.out2, ports.input);

    ReducedAmplitude amp;
    for (int m = 0; m < d1; ++m) {
        // c / (p - xi_m) contributes pole xi_m with residue c;
        // c / (P - p - xi_m) contributes pole P - xi_m with residue -c.
        cplx res_lower = pref * uab(m);
        cplx res_upper = -pref * uba(m);
        if (!g2_only) {
            // From S_ab(k1, p):   -t^a gb(k2)/(k1-xi) at xi,  -ga(k1) t^b/(k2-xi) at P-xi
            // From S_ba(k1, P-p): -gb(k1) t^a/(k2-xi) at xi,  -t^b ga(k2)/(k1-xi) at P-xi
            if (ta(m) != cplx(0.0, 0.0))
                res_lower += pref * (-ta(m) * gb_k2 / (k1 - xi(m)) -
                                     gb_k1 * ta(m) / (k2 - xi(m)));
            if (tb(m) != cplx(0.0, 0.0))
                res_upper += -pref * (-ga_k1 * tb(m) / (k2 - xi(m)) -
                                      tb(m) * ga_k2 / (k1 - xi(m)));
        }
        amp.add(xi(m), res_lower);
        amp.add(total - xi(m), res_upper);
    }
    return amp;
}

// Three-term delta-pulse probability; `resonant_only` keeps only the fully
// resonant two-photon diagram inside the integral term.
inline double delta_pulse_probability(double k1, double k2, const TwoPhotonPorts& ports,
                                      const GreenEvaluator& ev, bool resonant_only = false) {
    auto smooth_s = [&](double p, Port out) {
        const double id = (out == ports.input) ? 1.0 : 0.0;
        return id + g2_reduced(p, PortPair{ports.input, out}, ev);
    };
    const auto amp = reduced_g4_in_p(k1, k2, ports, ev, resonant_only);
    const double integral = 0.5 * amp.integrate_abs2();
    if (resonant_only) return integral;

    const cplx disc1 = smooth_s(k1, ports.out1) * smooth_s(k2, ports.out2);
    const cplx disc2 = smooth_s(k2, ports.out1) * smooth_s(k1, ports.out2);
    const cplx g4_12 = g4_total(k1, k2, k1, k2, ports, ev);
    const cplx g4_21 = g4_total(k2, k1, k1, k2, ports, ev);
    const double direct = 0.5 * (std::norm(disc1) + std::norm(disc2));
    const double cross = (std::conj(disc1) * g4_12 + std::conj(disc2) * g4_21).real();
    return direct + cross + integral;
}

} // namespace wqed
