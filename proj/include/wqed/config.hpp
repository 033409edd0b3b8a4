// config.hpp — JSON run configuration with strict schema validation

#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "wqed/errors.hpp"
#include "wqed/observables.hpp"
#include "wqed/params.hpp"
#include "wqed/scattering.hpp"

namespace wqed {

struct RunConfig {
    LatticeParams params;
    std::vector<double> h_grid;                 // defaults to {params.h}
    std::optional<std::vector<int>> alpha_list; // explicit list
    std::optional<AlphaSelector> alpha_selector;
    bool alpha_all{false};
    std::vector<double> gamma_grid; // defaults to {params.gamma}
    std::vector<int> n_grid;        // defaults to {params.N}
    WavepacketSpec::Shape pulse{WavepacketSpec::Shape::lorentzian};
    IntegrationStrategy integration{};
    int workers{0}; // 0 = available parallelism
    std::string out_path{"wqed_out.csv"};
    std::string format{"csv"};
    std::string spectrum_operator{"effective"}; // closed | effective | loss
    nlohmann::json resolved;                    // fully resolved document for embedding

    std::vector<int> alphas_for(int d2) const {
        if (alpha_list) return *alpha_list;
        if (alpha_selector) return {select_alpha(*alpha_selector, d2)};
        std::vector<int> all(d2);
        for (int a = 1; a <= d2; ++a) all[a - 1] = a;
        return all;
    }
};

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed,
                           const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

inline double need_number(const nlohmann::json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + " must be a number");
    return v.get<double>();
}

inline int need_int(const nlohmann::json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
    return v.get<int>();
}

inline std::vector<double> parse_real_grid(const nlohmann::json& v, const std::string& where) {
    std::vector<double> grid;
    if (v.is_array()) {
        for (const auto& x : v) grid.push_back(need_number(x, where + " entry"));
    } else if (v.is_object()) {
        reject_unknown(v, {"start", "stop", "count"}, where);
        if (!v.contains("start") || !v.contains("stop") || !v.contains("count"))
            throw ConfigError(where + " range needs start, stop, count");
        const double start = need_number(v.at("start"), where + ".start");
        const double stop = need_number(v.at("stop"), where + ".stop");
        const int count = need_int(v.at("count"), where + ".count");
        if (count < 1) throw ConfigError(where + ".count must be >= 1");
        for (int i = 0; i < count; ++i)
            grid.push_back(count == 1 ? start
                                      : start + (stop - start) * i / double(count - 1));
    } else {
        throw ConfigError(where + " must be a list or {start, stop, count}");
    }
    if (grid.empty()) throw ConfigError(where + " must not be empty");
    return grid;
}

} // namespace detail

inline RunConfig parse_config(const nlohmann::json& doc) {
    detail::reject_unknown(doc, {"params", "grid", "pulse", "integration", "workers",
                                 "output", "spectrum"},
                           "config");
    RunConfig cfg;

    if (doc.contains("params")) {
        const auto& p = doc.at("params");
        detail::reject_unknown(p, {"N", "J", "U", "h", "b", "kappa", "gamma", "sigma"},
                               "params");
        if (p.contains("N")) cfg.params.sites = detail::need_int(p.at("N"), "params.N");
        if (p.contains("J")) cfg.params.hopping = detail::need_number(p.at("J"), "params.J");
        if (p.contains("U"))
            cfg.params.interaction = detail::need_number(p.at("U"), "params.U");
        if (p.contains("h"))
            cfg.params.quasiperiodic = detail::need_number(p.at("h"), "params.h");
        if (p.contains("b"))
            cfg.params.incommensuration = detail::need_number(p.at("b"), "params.b");
        if (p.contains("kappa"))
            cfg.params.coupling = detail::need_number(p.at("kappa"), "params.kappa");
        if (p.contains("gamma"))
            cfg.params.loss = detail::need_number(p.at("gamma"), "params.gamma");
        if (p.contains("sigma"))
            cfg.params.pulse_width = detail::need_number(p.at("sigma"), "params.sigma");
    }
    try {
        cfg.params.validate();
    } catch (const InvalidParams& e) {
        throw ConfigError(e.what());
    }

    cfg.h_grid = {cfg.params.quasiperiodic};
    cfg.gamma_grid = {cfg.params.loss};
    cfg.n_grid = {cfg.params.sites};
    if (doc.contains("grid")) {
        const auto& g = doc.at("grid");
        detail::reject_unknown(g, {"h_over_J", "alpha", "gamma", "N"}, "grid");
        if (g.contains("h_over_J"))
            cfg.h_grid = detail::parse_real_grid(g.at("h_over_J"), "grid.h_over_J");
        if (g.contains("gamma"))
            cfg.gamma_grid = detail::parse_real_grid(g.at("gamma"), "grid.gamma");
        if (g.contains("N")) {
            cfg.n_grid.clear();
            if (!g.at("N").is_array()) throw ConfigError("grid.N must be a list");
            for (const auto& x : g.at("N"))
                cfg.n_grid.push_back(detail::need_int(x, "grid.N entry"));
            if (cfg.n_grid.empty()) throw ConfigError("grid.N must not be empty");
        }
        if (g.contains("alpha")) {
            const auto& a = g.at("alpha");
            if (a.is_array()) {
                std::vector<int> list;
                for (const auto& x : a) list.push_back(detail::need_int(x, "grid.alpha entry"));
                cfg.alpha_list = std::move(list);
            } else if (a.is_string()) {
                const std::string s = a.get<std::string>();
                if (s == "all")
                    cfg.alpha_all = true;
                else if (s == "lowest")
                    cfg.alpha_selector = AlphaSelector::lowest;
                else if (s == "middle")
                    cfg.alpha_selector = AlphaSelector::middle;
                else if (s == "highest")
                    cfg.alpha_selector = AlphaSelector::highest;
                else
                    throw ConfigError("grid.alpha string must be all|lowest|middle|highest");
            } else {
                throw ConfigError("grid.alpha must be a list or a selector string");
            }
        }
    }

    if (doc.contains("pulse")) {
        const std::string s = doc.at("pulse").is_string() ? doc.at("pulse").get<std::string>()
                                                          : std::string();
        if (s == "lorentzian")
            cfg.pulse = WavepacketSpec::Shape::lorentzian;
        else if (s == "delta")
            cfg.pulse = WavepacketSpec::Shape::delta_pulse;
        else
            throw ConfigError("pulse must be 'lorentzian' or 'delta'");
    }

    if (doc.contains("integration")) {
        const auto& i = doc.at("integration");
        detail::reject_unknown(i, {"rel_tol", "max_subdivisions"}, "integration");
        if (i.contains("rel_tol")) {
            cfg.integration.rel_tol = detail::need_number(i.at("rel_tol"), "integration.rel_tol");
            if (!(cfg.integration.rel_tol > 0.0))
                throw ConfigError("integration.rel_tol must be > 0");
        }
        if (i.contains("max_subdivisions")) {
            cfg.integration.max_subdivisions =
                detail::need_int(i.at("max_subdivisions"), "integration.max_subdivisions");
            if (cfg.integration.max_subdivisions < 1)
                throw ConfigError("integration.max_subdivisions must be >= 1");
        }
    }

    if (doc.contains("workers")) {
        cfg.workers = detail::need_int(doc.at("workers"), "workers");
        if (cfg.workers < 0) throw ConfigError("workers must be >= 0");
    }

    if (doc.contains("output")) {
        const auto& o = doc.at("output");
        detail::reject_unknown(o, {"path", "format"}, "output");
        if (o.contains("path")) {
            if (!o.at("path").is_string()) throw ConfigError("output.path must be a string");
            cfg.out_path = o.at("path").get<std::string>();
        }
        if (o.contains("format")) {
            if (!o.at("format").is_string()) throw ConfigError("output.format must be a string");
            cfg.format = o.at("format").get<std::string>();
            if (cfg.format != "csv" && cfg.format != "json")
                throw ConfigError("output.format must be 'csv' or 'json'");
        }
    }

    if (doc.contains("spectrum")) {
        const auto& s = doc.at("spectrum");
        detail::reject_unknown(s, {"operator"}, "spectrum");
        if (s.contains("operator")) {
            if (!s.at("operator").is_string())
                throw ConfigError("spectrum.operator must be a string");
            cfg.spectrum_operator = s.at("operator").get<std::string>();
            if (cfg.spectrum_operator != "closed" && cfg.spectrum_operator != "effective" &&
                cfg.spectrum_operator != "loss")
                throw ConfigError("spectrum.operator must be closed|effective|loss");
        }
    }

    cfg.resolved = doc;
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    nlohmann::json doc;
    try {
        is >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(doc);
}

} // namespace wqed
