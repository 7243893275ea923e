// bath.hpp — shifted Ohmic spectral density and spatially correlated spectral functions
#pragma once

#include "units.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace exciton2des {

struct BathSpec {
    double lambda = 50.0;        // reorganization energy, cm^-1
    double gamma = 1.0 / 50.0;   // bath relaxation rate, fs^-1
    double shift = 200.0;        // Omega_s, cm^-1
    double temperature = 77.0;   // K
    double xi = 1e-3;            // correlation length, units of distance
    double distance = 1.0;

    double gamma_cm() const { return units::wavenumber(gamma); }
    double kT() const { return units::thermal_energy(temperature); }
    double correlation() const { return std::exp(-distance / xi); }

    void validate() const {
        auto bad = [](const std::string& what) { throw std::invalid_argument("BathSpec: " + what); };
        if (!(lambda >= 0.0)) bad("lambda must be >= 0");
        if (!(gamma > 0.0)) bad("gamma must be > 0");
        if (!(temperature > 0.0)) bad("temperature must be > 0");
        if (!(xi > 0.0)) bad("xi must be > 0");
        if (!(distance > 0.0)) bad("distance must be > 0");
        if (!std::isfinite(shift)) bad("shift must be finite");
    }
};

// J(w) in cm^-1 for w >= 0 (cm^-1).
inline double spectral_density(double w, const BathSpec& b) {
    if (w < 0.0) throw std::domain_error("spectral_density: negative frequency; use spectral_function");
    const double g = b.gamma_cm();
    const double lo = w - b.shift, hi = w + b.shift;
    return b.lambda / std::numbers::pi * (g * w / (g * g + lo * lo) + g * w / (g * g + hi * hi));
}

inline double bose(double w, const BathSpec& b) { return 1.0 / std::expm1(w / b.kT()); }

// C(w) in cm^-1. w = 0 uses the closed-form limit of 2 pi J(w) n(w).
inline double spectral_function_cm(double w, const BathSpec& b) {
    if (w == 0.0) {
        const double g = b.gamma_cm();
        return 4.0 * b.lambda * g * b.kT() / (g * g + b.shift * b.shift);
    }
    const double a = std::abs(w);
    const double n = bose(a, b);
    return 2.0 * std::numbers::pi * spectral_density(a, b) * (w > 0.0 ? n + 1.0 : n);
}

// C(w) as a rate in rad/fs.
inline double spectral_function(double w, const BathSpec& b) {
    return units::kappa * spectral_function_cm(w, b);
}

// C_jk(w) for sites j, k in {1, 2}, rad/fs.
inline double cross_spectral(int j, int k, double w, const BathSpec& b) {
    if (j < 1 || j > 2 || k < 1 || k > 2) throw std::out_of_range("cross_spectral: site index");
    const double c = spectral_function(w, b);
    return j == k ? c : b.correlation() * c;
}

}  // namespace exciton2des
