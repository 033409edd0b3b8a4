// wqed — few-photon transport maps for a waveguide-coupled Bose-Hubbard chain
//
// Subcommands: spectrum | t2-map | pr-map | t2coh-map | scaling | loss-map |
//              sw-check | verify
// Exit codes: 0 success, 1 config error, 2 compute failure, 3 verification failure.

#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wqed/config.hpp"
#include "wqed/io.hpp"
#include "wqed/model.hpp"
#include "wqed/scattering.hpp"
#include "wqed/spectral.hpp"
#include "wqed/sweeps.hpp"
#include "wqed/time_domain.hpp"

namespace {

using namespace wqed;

struct CliOverrides {
    std::string config_path;
    std::string out_path;
    int workers{-1};
    std::string pulse;
    std::string format;
};

RunConfig resolve(const CliOverrides& cli) {
    RunConfig cfg = cli.config_path.empty() ? parse_config(nlohmann::json::object())
                                            : load_config(cli.config_path);
    if (!cli.out_path.empty()) cfg.out_path = cli.out_path;
    if (cli.workers >= 0) cfg.workers = cli.workers;
    if (!cli.pulse.empty()) {
        if (cli.pulse == "lorentzian")
            cfg.pulse = WavepacketSpec::Shape::lorentzian;
        else if (cli.pulse == "delta")
            cfg.pulse = WavepacketSpec::Shape::delta_pulse;
        else
            throw ConfigError("--pulse must be lorentzian or delta");
    }
    if (!cli.format.empty()) {
        if (cli.format != "csv" && cli.format != "json")
            throw ConfigError("--format must be csv or json");
        cfg.format = cli.format;
    }
    return cfg;
}

ObservableSettings settings_of(const RunConfig& cfg) {
    ObservableSettings s;
    s.pulse = cfg.pulse;
    s.integration = cfg.integration;
    return s;
}

int workers_of(const RunConfig& cfg) {
    return cfg.workers == 0 ? default_workers() : cfg.workers;
}

// Replay metadata embedded in output files. Worker count and output location
// never enter: identical configs must yield byte-identical files whatever the
// parallelism or destination.
nlohmann::json replay_metadata(const RunConfig& cfg) {
    nlohmann::json meta = cfg.resolved;
    meta.erase("workers");
    meta.erase("output");
    return meta;
}

void attach_replay(SweepResult& result, const RunConfig& cfg) {
    result.metadata["replay"] = replay_metadata(cfg);
}

int run_map(const RunConfig& cfg, const std::vector<std::string>& quantities) {
    const int d2 = TwoParticleBasis(cfg.params.sites).dim();
    auto result = mobility_map(cfg.params, cfg.h_grid, cfg.alphas_for(d2), quantities,
                               settings_of(cfg), workers_of(cfg));
    attach_replay(result, cfg);
    write_sweep_file(result, cfg.out_path, cfg.format);
    std::cout << "wrote " << result.records.size() << " records to " << cfg.out_path << "\n";
    return 0;
}

int run_scaling(const RunConfig& cfg) {
    AlphaSelector selector = AlphaSelector::highest;
    if (cfg.alpha_selector)
        selector = *cfg.alpha_selector;
    else if (cfg.alpha_list || cfg.alpha_all)
        throw ConfigError("scaling requires grid.alpha = lowest|middle|highest");
    auto result = scaling_curves(cfg.params, cfg.n_grid, selector, cfg.h_grid,
                                 settings_of(cfg), workers_of(cfg));
    attach_replay(result, cfg);
    write_sweep_file(result, cfg.out_path, cfg.format);
    std::cout << "wrote " << result.records.size() << " records to " << cfg.out_path << "\n";
    return 0;
}

int run_loss_map(const RunConfig& cfg) {
    const int d2 = TwoParticleBasis(cfg.params.sites).dim();
    auto result = loss_sweep(cfg.params, cfg.gamma_grid, cfg.h_grid, cfg.alphas_for(d2),
                             settings_of(cfg), workers_of(cfg));
    attach_replay(result, cfg);
    write_sweep_file(result, cfg.out_path, cfg.format);
    std::cout << "wrote " << result.records.size() << " records to " << cfg.out_path << "\n";
    return 0;
}

int run_spectrum(const RunConfig& cfg) {
    std::ofstream os(cfg.out_path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open output file " + cfg.out_path);
    os << "# " << version_string << "\n";
    os << "# config: " << replay_metadata(cfg).dump() << "\n";
    os << "# operator: " << cfg.spectrum_operator << "\n";
    os << "sector,alpha,re_E,im_E\n";
    const TwoParticleBasis basis(cfg.params.sites);
    for (int sector : {1, 2}) {
        if (cfg.spectrum_operator == "closed") {
            const auto ham = sector == 1 ? build_h1(cfg.params) : build_h2(cfg.params, basis);
            const auto spec = eig_hermitian(ham);
            for (int a = 0; a < spec.values.size(); ++a)
                os << sector << ',' << (a + 1) << ',' << format_double(spec.values(a))
                   << ",0\n";
        } else {
            const bool with_loss = cfg.spectrum_operator == "loss";
            const auto spec = eig_biorthogonal(build_effective(cfg.params, sector, with_loss));
            for (int a = 0; a < spec.values.size(); ++a)
                os << sector << ',' << (a + 1) << ',' << format_double(spec.values(a).real())
                   << ',' << format_double(spec.values(a).imag()) << "\n";
        }
    }
    std::cout << "wrote spectrum to " << cfg.out_path << "\n";
    return 0;
}

int run_sw_check(const RunConfig& cfg) {
    const auto model = build_sw_doublon(cfg.params);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sw(model.matrix);
    const TwoParticleBasis basis(cfg.params.sites);
    const auto exact = eig_hermitian(build_h2(cfg.params, basis));
    const int n = cfg.params.sites;
    const int d2 = basis.dim();

    std::ofstream os(cfg.out_path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open output file " + cfg.out_path);
    os << "# " << version_string << "\n";
    os << "# config: " << replay_metadata(cfg).dump() << "\n";
    os << "# predicted_transition_h_over_J: " << format_double(model.predicted_transition)
       << "\n";
    os << "index,e_doublon,e_exact_top,abs_err\n";
    double max_err = 0.0;
    for (int k = 0; k < n; ++k) {
        const double e_sw = sw.eigenvalues()(k);
        const double e_ex = exact.values(d2 - n + k);
        max_err = std::max(max_err, std::abs(e_sw - e_ex));
        os << (k + 1) << ',' << format_double(e_sw) << ',' << format_double(e_ex) << ','
           << format_double(std::abs(e_sw - e_ex)) << "\n";
    }
    std::cout << "predicted transition h/J = " << model.predicted_transition
              << ", max |e_doublon - e_exact| = " << max_err << "\n";
    return 0;
}

// Deterministic low-discrepancy momenta for the verification suites; the
// compute pipeline itself contains no randomness.
double golden_point(int k, double lo, double hi) {
    const double frac = std::fmod(0.5 + 0.6180339887498949 * k, 1.0);
    return lo + (hi - lo) * frac;
}

struct Suite {
    std::string name;
    double deviation{0.0};
    double tolerance{0.0};
    bool pass() const { return deviation < tolerance; }
};

int run_verify(const RunConfig& cfg) {
    if (cfg.params.sites > 4)
        throw ConfigError("verify: N <= 4 enforced for the oracle suites");
    std::vector<Suite> suites;
    const TwoPhotonPorts trans = TwoPhotonPorts::transmission();

    { // four-point null test in the linear limit
        auto p = cfg.params;
        p.interaction = 0.0;
        p.loss = 0.0;
        const GreenEvaluator ev(p);
        double dev = 0.0;
        for (int k = 0; k < 20; ++k) {
            const double q1 = golden_point(3 * k, -3.0, 3.0);
            const double q2 = golden_point(3 * k + 1, -3.0, 3.0);
            const double p1 = golden_point(3 * k + 2, -3.0, 3.0);
            const double p2 = q1 + q2 - p1;
            dev = std::max(dev, std::abs(g4_g1(p1, p2, q1, q2, trans, ev) +
                                         g4_g2(p1, p2, q1, q2, trans, ev)));
        }
        suites.push_back({"u0_null", dev, 1e-9});
    }

    { // one- and two-photon unitarity without loss
        auto p = cfg.params;
        p.loss = 0.0;
        const GreenEvaluator ev(p);
        double dev1 = 0.0;
        for (int k = 0; k < 50; ++k) {
            const double q = golden_point(k, -3.0, 3.0);
            const cplx t = s1_element(q, {Port::left, Port::right}, ev).total();
            const cplx r = s1_element(q, {Port::left, Port::left}, ev).total();
            dev1 = std::max(dev1, std::abs(std::norm(t) + std::norm(r) - 1.0));
        }
        suites.push_back({"unitarity_1photon", dev1, 1e-10});
        double dev2 = 0.0;
        for (int k = 0; k < 2; ++k) {
            const double k1 = golden_point(2 * k, -1.5, 1.5);
            const double k2 = golden_point(2 * k + 1, -1.5, 1.5);
            double total = 0.0;
            for (Port a : {Port::left, Port::right})
                for (Port b : {Port::left, Port::right})
                    total += transmission_probability(k1, k2, p.pulse_width,
                                                      {Port::left, a, b}, ev,
                                                      cfg.integration);
            dev2 = std::max(dev2, std::abs(total - 1.0));
        }
        suites.push_back({"unitarity_2photon", dev2, 1e-4});
    }

    { // time-domain oracle vs spectral formulas
        auto p = cfg.params;
        const GreenEvaluator ev(p);
        const double tmax = TimeDomainOracle::recommended_tmax(p);
        const TimeDomainOracle oracle(p, tmax, 1 << 15);
        double dev = 0.0;
        for (int k = 0; k < 4; ++k) {
            const double q = golden_point(k, -2.0, 2.0);
            const cplx spectral = g2_reduced(q, {Port::left, Port::right}, ev);
            const cplx td = oracle.two_point(q, {Port::left, Port::right});
            dev = std::max(dev, std::abs(td - spectral) / std::max(0.05, std::abs(spectral)));
        }
        for (int k = 0; k < 3; ++k) {
            const double q1 = golden_point(3 * k, -1.5, 1.5);
            const double q2 = golden_point(3 * k + 1, -1.5, 1.5);
            const double p1 = golden_point(3 * k + 2, -1.5, 1.5);
            const double p2 = q1 + q2 - p1;
            const cplx spectral = g4_g2(p1, p2, q1, q2, trans, ev);
            const cplx td = oracle.four_point_g2(p1, p2, q1, q2, trans);
            dev = std::max(dev, std::abs(td - spectral) / std::max(1e-4, std::abs(spectral)));
        }
        suites.push_back({"time_domain", dev, 1e-3});
    }

    { // residue path vs adaptive quadrature path
        const GreenEvaluator ev(cfg.params);
        IntegrationStrategy quad = cfg.integration;
        quad.method = ConvolutionMethod::quadrature;
        double dev = 0.0;
        for (int k = 0; k < 10; ++k) {
            const double k1 = golden_point(4 * k, -1.5, 1.5);
            const double k2 = golden_point(4 * k + 1, -1.5, 1.5);
            const double p1 = golden_point(4 * k + 2, -1.5, 1.5);
            const double p2 = golden_point(4 * k + 3, -1.5, 1.5);
            const double a = rho_conditional(p1, p2, k1, k2, cfg.params.pulse_width, trans,
                                             ev, cfg.integration);
            const double b = rho_conditional(p1, p2, k1, k2, cfg.params.pulse_width, trans,
                                             ev, quad);
            dev = std::max(dev, std::abs(a - b) / std::max(a, 1e-300));
        }
        suites.push_back({"residue_vs_quadrature", dev, 1e-6});
    }

    bool all_pass = true;
    for (const auto& s : suites) {
        all_pass = all_pass && s.pass();
        std::cout << (s.pass() ? "[PASS] " : "[FAIL] ") << s.name << "  max deviation "
                  << s.deviation << "  tolerance " << s.tolerance << "\n";
    }
    return all_pass ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Few-photon scattering observables for a quasiperiodic Bose-Hubbard chain"};
    app.require_subcommand(1);

    CliOverrides cli;
    app.add_option("--config", cli.config_path, "JSON run configuration");
    app.add_option("--out", cli.out_path, "output file path");
    app.add_option("--workers", cli.workers, "worker threads (0 = all cores)");
    app.add_option("--pulse", cli.pulse, "input pulse: lorentzian | delta");
    app.add_option("--format", cli.format, "output format: csv | json");

    auto* c_spectrum = app.add_subcommand("spectrum", "export closed/effective spectra");
    auto* c_t2 = app.add_subcommand("t2-map", "two-photon transmission map over (h, alpha)");
    auto* c_pr = app.add_subcommand("pr-map", "participation-ratio map over (h, alpha)");
    auto* c_t2c = app.add_subcommand("t2coh-map", "coherent-input transmission map");
    auto* c_scaling = app.add_subcommand("scaling", "log_pr and 1/Lambda_2 vs N and h");
    auto* c_loss = app.add_subcommand("loss-map", "transmission maps per loss rate");
    auto* c_sw = app.add_subcommand("sw-check", "doublon effective model vs exact spectrum");
    auto* c_verify = app.add_subcommand("verify", "run the oracle cross-check suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        const RunConfig cfg = resolve(cli);
        if (c_spectrum->parsed()) return run_spectrum(cfg);
        if (c_t2->parsed()) return run_map(cfg, {"t2"});
        if (c_pr->parsed()) return run_map(cfg, {"log_pr"});
        if (c_t2c->parsed()) return run_map(cfg, {"t2_coh"});
        if (c_scaling->parsed()) return run_scaling(cfg);
        if (c_loss->parsed()) return run_loss_map(cfg);
        if (c_sw->parsed()) return run_sw_check(cfg);
        if (c_verify->parsed()) return run_verify(cfg);
        std::cerr << "no subcommand\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const InvalidParams& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "compute error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
