// sweeps.hpp — Grid drivers for the mobility, scaling, and loss maps
//
// Cells are independent; a worker pool executes them in any order and results
// are merged in deterministic grid order. Identical configs produce identical
// records whatever the worker count.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "wqed/observables.hpp"
#include "wqed/runner.hpp"

namespace wqed {

namespace detail {

struct CellSpec {
    LatticeParams params;
    int alpha{0};
};

inline SweepResult run_sweep(const std::vector<CellSpec>& cells,
                             const std::vector<std::string>& quantities,
                             const ObservableSettings& settings, int workers,
                             nlohmann::json metadata) {
    SweepResult result;
    result.quantities = quantities;
    result.metadata = std::move(metadata);
    result.metadata["version"] = version_string;
    result.metadata["settings"] = settings_to_json(settings);

    BundleCache cache;
    std::vector<std::vector<SweepRecord>> slots(cells.size());
    run_cells(cells.size(), workers, [&](std::size_t i) {
        const auto& cell = cells[i];
        try {
            const auto bundle = cache.get(cell.params);
            evaluate_cell(*bundle, cell.alpha, quantities, settings, slots[i]);
        } catch (const Error& e) {
            for (const auto& q : quantities) {
                SweepRecord rec;
                rec.n_sites = cell.params.sites;
                rec.gamma = cell.params.loss;
                rec.h = cell.params.quasiperiodic;
                rec.alpha = cell.alpha;
                rec.quantity = q;
                rec.value = std::numeric_limits<double>::quiet_NaN();
                rec.flags = std::string("error:") + e.what();
                slots[i].push_back(std::move(rec));
            }
        }
    });
    for (auto& slot : slots)
        for (auto& rec : slot) result.records.push_back(std::move(rec));
    return result;
}

inline std::vector<int> resolve_alphas(const std::vector<int>& alpha_set, int d2) {
    for (int a : alpha_set)
        if (a < 1 || a > d2)
            throw InvalidParams("alpha " + std::to_string(a) + " out of range for d2 = " +
                                std::to_string(d2));
    return alpha_set;
}

} // namespace detail

// Per-cell records of the requested quantities over (h, alpha).
inline SweepResult mobility_map(const LatticeParams& base, const std::vector<double>& h_grid,
                                const std::vector<int>& alpha_set,
                                const std::vector<std::string>& quantities,
                                const ObservableSettings& settings = {}, int workers = 1) {
    base.validate();
    const int d2 = TwoParticleBasis(base.sites).dim();
    const auto alphas = detail::resolve_alphas(alpha_set, d2);
    std::vector<detail::CellSpec> cells;
    for (double h : h_grid)
        for (int alpha : alphas) {
            auto p = base;
            p.quasiperiodic = h;
            cells.push_back({p, alpha});
        }
    nlohmann::json meta{{"kind", "mobility_map"}, {"params", detail::params_to_json(base)}};
    return detail::run_sweep(cells, quantities, settings, workers, std::move(meta));
}

// log_pr and inv_lambda2 over (N, h) for a selected eigenstate family, with
// the asymptotic quasiperiodic reference and the doublon transition line in
// the metadata.
inline SweepResult scaling_curves(const LatticeParams& base, const std::vector<int>& n_list,
                                  AlphaSelector selector, const std::vector<double>& h_grid,
                                  const ObservableSettings& settings = {}, int workers = 1) {
    base.validate();
    if (n_list.empty()) throw InvalidParams("scaling_curves: empty N list");
    std::vector<detail::CellSpec> cells;
    for (int n : n_list) {
        auto p = base;
        p.sites = n;
        p.validate();
        const int d2 = TwoParticleBasis(n).dim();
        for (double h : h_grid) {
            auto ph = p;
            ph.quasiperiodic = h;
            cells.push_back({ph, select_alpha(selector, d2)});
        }
    }
    nlohmann::json meta{{"kind", "scaling_curves"},
                        {"params", detail::params_to_json(base)},
                        {"alpha_selector",
                         selector == AlphaSelector::lowest
                             ? "lowest"
                             : (selector == AlphaSelector::middle ? "middle" : "highest")},
                        {"aa_reference", "inv_lambda2 = 2*ln(h/(2J)) for h/J > 2"}};
    if (base.interaction > 0.0)
        meta["sw_transition_h_over_J"] = 2.0 * base.hopping / base.interaction;
    return detail::run_sweep(cells, {"log_pr", "inv_lambda2"}, settings, workers,
                             std::move(meta));
}

// T2 maps per loss rate over (gamma, h, alpha).
inline SweepResult loss_sweep(const LatticeParams& base, const std::vector<double>& gamma_list,
                              const std::vector<double>& h_grid,
                              const std::vector<int>& alpha_set,
                              const ObservableSettings& settings = {}, int workers = 1) {
    base.validate();
    for (double g : gamma_list)
        if (g < 0.0) throw InvalidParams("loss_sweep: gamma must be >= 0");
    const int d2 = TwoParticleBasis(base.sites).dim();
    const auto alphas = detail::resolve_alphas(alpha_set, d2);
    std::vector<detail::CellSpec> cells;
    for (double g : gamma_list)
        for (double h : h_grid)
            for (int alpha : alphas) {
                auto p = base;
                p.loss = g;
                p.quasiperiodic = h;
                cells.push_back({p, alpha});
            }
    nlohmann::json meta{{"kind", "loss_sweep"}, {"params", detail::params_to_json(base)}};
    return detail::run_sweep(cells, {"t2"}, settings, workers, std::move(meta));
}

} // namespace wqed
