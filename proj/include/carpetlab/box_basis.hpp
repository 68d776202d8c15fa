#ifndef CARPETLAB_BOX_BASIS_HPP
#define CARPETLAB_BOX_BASIS_HPP

#include <cmath>
#include <complex>
#include <stdexcept>

#include "common.hpp"

namespace carpetlab {

// Physical parameters of the box.  rel_q is the ratio of the ground state
// energy to the rest mass energy; 0 selects the exact non-relativistic
// dispersion.  All representation modules work in the scaled coordinates
// u = x/L, tau = t/T and only touch these fields at the API boundary.
struct BoxConfig {
    double length{1.0};
    double mass{1.0};
    double hbar{1.0};
    double rel_q{0.0};

    double revival_time() const { return 4.0 * mass * length * length / (hbar * pi); }
    double ground_energy() const {
        return hbar * hbar * pi * pi / (2.0 * mass * length * length);
    }

    void validate() const {
        if (!(length > 0.0) || !(mass > 0.0) || !(hbar > 0.0) || !(rel_q >= 0.0))
            throw std::invalid_argument("BoxConfig: require L, M, hbar > 0 and q >= 0");
    }
};

struct ScaledPoint {
    double u{0.0};
    double tau{0.0};
};

// k_m = m pi / L.  m may be zero or negative.
inline double wave_number(const BoxConfig& cfg, long m) {
    return static_cast<double>(m) * pi / cfg.length;
}

// Dimensionless energy in units of E_1: m^2 (1 - q m^2 / 2).
// Uses long double because m^4 exhausts double precision well before the
// documented |m| <= 50000 limit.
inline double energy_ratio(const BoxConfig& cfg, long m) {
    const long double md = static_cast<long double>(m);
    const long double m2 = md * md;
    return static_cast<double>(m2 * (1.0L - 0.5L * static_cast<long double>(cfg.rel_q) * m2));
}

// True while the first relativistic correction stays perturbative,
// i.e. q m^2 / 2 < 1.
inline bool energy_perturbative(const BoxConfig& cfg, long m) {
    return 0.5 * cfg.rel_q * static_cast<double>(m) * static_cast<double>(m) < 1.0;
}

// E_m = m^2 E_1 (1 - q m^2 / 2).  When the correction is no longer
// perturbative (energy decreasing with m) the optional flag is cleared;
// the value is still returned.
inline double energy(const BoxConfig& cfg, long m, bool* perturbative = nullptr) {
    if (perturbative) *perturbative = energy_perturbative(cfg, m);
    return energy_ratio(cfg, m) * cfg.ground_energy();
}

// u_m(x) = sqrt(2/L) sin(m pi x / L), m >= 1.
inline double eigenfunction(const BoxConfig& cfg, long m, double x) {
    if (m <= 0)
        throw std::invalid_argument("eigenfunction: energy eigenfunctions are indexed from 1");
    return std::sqrt(2.0 / cfg.length) * std::sin(static_cast<double>(m) * pi * x / cfg.length);
}

// exp(-i E_m t / hbar) expressed in tau = t/T:
// exp(-2 pi i m^2 (1 - q m^2/2) tau).
// For q = 0 the exponent multiple is an exact integer, so tau is reduced
// mod 1 first; phase_factor(m, tau + 1) then equals phase_factor(m, tau)
// bit for bit.
inline cplx phase_factor(const BoxConfig& cfg, long m, double tau) {
    long double e = static_cast<long double>(energy_ratio(cfg, m));
    long double t = static_cast<long double>(tau);
    if (cfg.rel_q == 0.0) t -= std::floor(t);
    long double cycles = std::fmod(e * t, 1.0L);
    const double angle = -2.0 * pi * static_cast<double>(cycles);
    return {std::cos(angle), std::sin(angle)};
}

}  // namespace carpetlab

#endif
