// params.hpp — Physical parameters of the waveguide-coupled chain

#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "wqed/errors.hpp"

namespace wqed {

// All energies are expressed in units of the hopping J.
struct LatticeParams {
    int sites{1};          // N
    double hopping{1.0};   // J, the energy unit
    double interaction{0.0};   // U
    double quasiperiodic{0.0}; // h
    double incommensuration{default_b()}; // b
    double coupling{0.25}; // kappa, waveguide-system coupling
    double loss{0.0};      // gamma, uniform local loss rate
    double pulse_width{0.01}; // sigma of the Lorentzian input

    static constexpr double default_b() {
        return 0.61803398874989484820; // (sqrt(5) - 1) / 2
    }

    // On-site energy eps_j = h cos(2 pi b j), j = 1..N (1-based).
    double onsite(int j) const {
        return quasiperiodic * std::cos(2.0 * std::numbers::pi * incommensuration * j);
    }

    void validate() const {
        if (sites < 1) throw InvalidParams("LatticeParams: N must be >= 1");
        if (hopping < 0.0) throw InvalidParams("LatticeParams: J must be >= 0");
        if (interaction < 0.0) throw InvalidParams("LatticeParams: U must be >= 0");
        if (quasiperiodic < 0.0) throw InvalidParams("LatticeParams: h must be >= 0");
        // kappa = 0 is tolerated here so the closed-system limit of the
        // effective Hamiltonian stays constructible; the scattering layer
        // requires kappa > 0.
        if (coupling < 0.0) throw InvalidParams("LatticeParams: kappa must be >= 0");
        if (loss < 0.0) throw InvalidParams("LatticeParams: gamma must be >= 0");
        if (!(pulse_width > 0.0)) throw InvalidParams("LatticeParams: sigma must be > 0");
    }
};

} // namespace wqed
