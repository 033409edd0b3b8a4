// observables.hpp — Transmission maps, participation maps, and scaling sweeps
//
// Resonant input paths are built from the closed-system energies while the
// scattering amplitudes run through the effective Hamiltonian, matching the
// resonance condition stated in closed-system energies.

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wqed/model.hpp"
#include "wqed/scattering.hpp"
#include "wqed/spectral.hpp"
#include "wqed/version.hpp"

namespace wqed {

// Closed spectra plus the scattering evaluator for one parameter point.
struct SystemBundle {
    LatticeParams params;
    HermitianSpectrum closed1;
    HermitianSpectrum closed2;
    GreenEvaluator evaluator;

    explicit SystemBundle(const LatticeParams& p)
        : params(p),
          closed1(eig_hermitian(build_h1(p))),
          closed2(eig_hermitian(build_h2(p, TwoParticleBasis(p.sites)))),
          evaluator(p) {}

    SystemBundle(const LatticeParams& p, HermitianSpectrum c1, HermitianSpectrum c2,
                 GreenEvaluator ev)
        : params(p), closed1(std::move(c1)), closed2(std::move(c2)),
          evaluator(std::move(ev)) {}
};

struct ResonantPathSet {
    int alpha{1};
    std::vector<std::pair<double, double>> paths; // (k1, k2), k1 + k2 = E_alpha^(2)
};

inline ResonantPathSet resonant_paths(int alpha, const HermitianSpectrum& closed1,
                                      const HermitianSpectrum& closed2) {
    if (alpha < 1 || alpha > closed2.values.size())
        throw InvalidParams("resonant_paths: alpha out of range");
    ResonantPathSet set;
    set.alpha = alpha;
    const double e2 = closed2.values(alpha - 1);
    set.paths.reserve(closed1.values.size());
    for (int mu = 0; mu < closed1.values.size(); ++mu) {
        const double k1 = closed1.values(mu);
        set.paths.emplace_back(k1, e2 - k1);
    }
    return set;
}

struct ObservableSettings {
    WavepacketSpec::Shape pulse{WavepacketSpec::Shape::lorentzian};
    IntegrationStrategy integration{};
    TwoPhotonPorts ports{TwoPhotonPorts::transmission()};
};

namespace detail {

inline double path_probability(double k1, double k2, const SystemBundle& sys,
                               const ObservableSettings& s) {
    if (s.pulse == WavepacketSpec::Shape::delta_pulse)
        return delta_pulse_probability(k1, k2, s.ports, sys.evaluator);
    return transmission_probability(k1, k2, sys.params.pulse_width, s.ports,
                                    sys.evaluator, s.integration);
}

} // namespace detail

// T^(2)(alpha): transmission probability averaged over the d1 resonant paths.
inline double t2(int alpha, const SystemBundle& sys, const ObservableSettings& s = {}) {
    const auto set = resonant_paths(alpha, sys.closed1, sys.closed2);
    double acc = 0.0;
    for (std::size_t idx = 0; idx < set.paths.size(); ++idx) {
        try {
            acc += detail::path_probability(set.paths[idx].first, set.paths[idx].second,
                                            sys, s);
        } catch (const IntegrationFailure& e) {
            throw IntegrationFailure(std::string(e.what()) + " (resonant path " +
                                     std::to_string(idx + 1) + ")");
        }
    }
    double value = acc / static_cast<double>(set.paths.size());
    if (value < 0.0 && value > -1e-6) value = 0.0;
    return value;
}

// T^(2)_coh(alpha): single probability at coincident input momenta.
inline double t2_coherent(int alpha, const SystemBundle& sys,
                          const ObservableSettings& s = {}) {
    if (alpha < 1 || alpha > sys.closed2.values.size())
        throw InvalidParams("t2_coherent: alpha out of range");
    const double k = sys.closed2.values(alpha - 1) / 2.0;
    double value = detail::path_probability(k, k, sys, s);
    if (value < 0.0 && value > -1e-6) value = 0.0;
    return value;
}

// 1/Lambda_2 = -ln T^(2) / (2(N-1)) at finite N; infinity sentinel on
// underflow below 1e-300.
inline double effective_lambda2(double t2_value, int n_sites) {
    if (n_sites < 2) throw InvalidParams("effective_lambda2: N must be >= 2");
    if (!(t2_value >= 1e-300)) return std::numeric_limits<double>::infinity();
    return -std::log(t2_value) / (2.0 * (n_sites - 1));
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

enum class AlphaSelector { lowest, middle, highest };

inline int select_alpha(AlphaSelector sel, int d2) {
    switch (sel) {
        case AlphaSelector::lowest: return 1;
        case AlphaSelector::middle: return d2 / 2;
        case AlphaSelector::highest: return d2;
    }
    return d2;
}

struct SweepRecord {
    int n_sites{0};
    double gamma{0.0};
    double h{0.0};
    int alpha{0};
    std::string quantity;
    double value{0.0};
    std::string flags; // empty on success
};

struct SweepResult {
    std::vector<std::string> quantities;
    std::vector<SweepRecord> records;
    nlohmann::json metadata;
};

namespace detail {

inline nlohmann::json params_to_json(const LatticeParams& p) {
    return nlohmann::json{{"N", p.sites},         {"J", p.hopping},
                          {"U", p.interaction},   {"h", p.quasiperiodic},
                          {"b", p.incommensuration}, {"kappa", p.coupling},
                          {"gamma", p.loss},      {"sigma", p.pulse_width}};
}

inline nlohmann::json settings_to_json(const ObservableSettings& s) {
    return nlohmann::json{
        {"pulse", s.pulse == WavepacketSpec::Shape::delta_pulse ? "delta" : "lorentzian"},
        {"integration",
         {{"rel_tol", s.integration.rel_tol},
          {"max_subdivisions", s.integration.max_subdivisions}}}};
}

// One sweep cell: every requested quantity at fixed (params, alpha).
inline void evaluate_cell(const SystemBundle& sys, int alpha,
                          const std::vector<std::string>& quantities,
                          const ObservableSettings& settings,
                          std::vector<SweepRecord>& out) {
    std::optional<double> t2_value;
    for (const auto& q : quantities) {
        SweepRecord rec;
        rec.n_sites = sys.params.sites;
        rec.gamma = sys.params.loss;
        rec.h = sys.params.quasiperiodic;
        rec.alpha = alpha;
        rec.quantity = q;
        try {
            if (q == "t2" || q == "inv_lambda2") {
                if (!t2_value) t2_value = t2(alpha, sys, settings);
                if (q == "t2") {
                    rec.value = *t2_value;
                    // The delta-pulse preview formula is not positive definite
                    // at strongly interacting resonant cells; mark such records.
                    if (rec.value < 0.0 || rec.value > 1.0 + 1e-6)
                        rec.flags = "outside_unit_interval";
                } else {
                    rec.value = effective_lambda2(*t2_value, sys.params.sites);
                    if (!(*t2_value >= 1e-300)) rec.flags = "underflow";
                }
            } else if (q == "t2_coh") {
                rec.value = t2_coherent(alpha, sys, settings);
                if (rec.value < 0.0 || rec.value > 1.0 + 1e-6)
                    rec.flags = "outside_unit_interval";
            } else if (q == "log_pr") {
                rec.value = participation_ratio(alpha, sys.closed2).log_dim;
            } else {
                throw InvalidParams("unknown quantity " + q);
            }
        } catch (const Error& e) {
            rec.value = std::numeric_limits<double>::quiet_NaN();
            rec.flags = std::string("error:") + e.what();
        }
        out.push_back(std::move(rec));
    }
}

} // namespace detail

} // namespace wqed
