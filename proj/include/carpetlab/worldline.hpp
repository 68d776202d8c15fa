#ifndef CARPETLAB_WORLDLINE_HPP
#define CARPETLAB_WORLDLINE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "box_basis.hpp"
#include "common.hpp"
#include "wavepacket.hpp"
#include "wigner.hpp"

namespace carpetlab {

// chi_{j,l}(x, t) = x/L - j t/(T/2) - l, in scaled coordinates.
inline double chi(long j, long l, double u, double tau) {
    return u - 2.0 * static_cast<double>(j) * tau - static_cast<double>(l);
}

// Truncation budget for the (j, l) worldline sum.  The window is driven by
// the coefficient envelope and the requested tolerance: j runs while the
// integrated envelope bound of Psi^(W)[j/2, .] stays above a fraction of
// tol, and l keeps |chi| below the xi-support of Psi^(W).
struct WorldlineBudget {
    int j_max{0};
    double chi_max{0.0};
    double tail_estimate{0.0};
    double tolerance{0.0};
};

namespace detail {

// Envelope bound on |Psi^(W)(mu, .)|: int env(mu + r/2) env(mu - r/2) dr.
inline double wigner_envelope_bound(const SpectralCoefficients& s, double mu) {
    if (s.has_closed_form()) {
        const GaussianForm& g = s.closed_form();
        const double w = g.amplitude_width();
        const double c = g.centroid();
        const double p2 = g.peak() * g.peak();
        const double norm = 2.0 * std::sqrt(pi) * w;
        auto peak_pair = [&](double c1, double c2) {
            // int exp(-(mu+r/2-c1)^2/2w^2) exp(-(mu-r/2-c2)^2/2w^2) dr
            const double d = mu - 0.5 * (c1 + c2);
            return norm * std::exp(-d * d / (w * w));
        };
        return p2 * (peak_pair(c, c) + peak_pair(-c, -c) + 2.0 * peak_pair(c, -c));
    }
    // Interpolated coefficients: crude bound via the flat envelope and the
    // finite support.
    const double R = s.support_radius(1e-14);
    return s.envelope(mu) * s.envelope(0.0) * 2.0 * R / std::max(1.0, s.envelope(0.0)) *
           s.envelope(mu);
}

}  // namespace detail

inline WorldlineBudget make_budget(const SpectralCoefficients& s, double tol) {
    WorldlineBudget budget;
    budget.tolerance = tol;

    // xi-support of Psi^(W): structures live near xi = +-x0/L (packet and
    // mirror positions) with Gaussian falloff of scale sigma/L.
    if (s.has_closed_form()) {
        const GaussianForm& g = s.closed_form();
        budget.chi_max =
            (g.packet().center + 10.0 * g.packet().width) / g.box().length + 0.25;
    } else {
        budget.chi_max = 2.5;  // windowed-sinc bandwidth argument
    }

    const int hard_cap = 4096;
    const double per_term = 0.25 * (2.0 * budget.chi_max + 1.0);  // l values per j
    int j = 0;
    double tail = 0.0;
    // Grow the window until the per-j bound is far below tolerance, then
    // account for everything beyond as the tail estimate.
    while (j < hard_cap) {
        const double bound = per_term * detail::wigner_envelope_bound(s, 0.5 * j);
        if (bound < 0.005 * tol && j > 2) break;
        ++j;
    }
    if (j >= hard_cap) throw budget_error("make_budget: envelope does not decay");
    for (int k = j; k < j + 64; ++k)
        tail += 2.0 * per_term * detail::wigner_envelope_bound(s, 0.5 * k);
    budget.j_max = j;
    budget.tail_estimate = tail;
    if (budget.tail_estimate > tol)
        throw budget_error("make_budget: tail estimate exceeds requested tolerance");
    return budget;
}

// The main representation: L W = (1/4) sum_{j,l} (-1)^{jl} Psi^(W)[j/2, chi_{j,l}].
// Straight-line form; requires q = 0.  include_sign = false exists solely for
// the mutation test that checks the (-1)^{jl} factor is load-bearing.
inline double density_worldline(const SpectralCoefficients& s, const BoxConfig& cfg,
                                const WorldlineBudget& budget, double u, double tau,
                                bool include_sign = true) {
    if (cfg.rel_q != 0.0)
        throw std::invalid_argument("density_worldline: straight-line form requires q = 0");
    if (budget.tail_estimate > budget.tolerance)
        throw budget_error("density_worldline: budget tail exceeds tolerance");

    const bool closed = s.has_closed_form();
    WignerSlice ws;
    if (!closed) ws = WignerSlice::auto_for(s);

    double acc = 0.0;
    for (long j = -budget.j_max; j <= budget.j_max; ++j) {
        const double center = u - 2.0 * static_cast<double>(j) * tau;
        const long l_lo = static_cast<long>(std::ceil(center - budget.chi_max));
        const long l_hi = static_cast<long>(std::floor(center + budget.chi_max));
        for (long l = l_lo; l <= l_hi; ++l) {
            const double x = chi(j, l, u, tau);
            const double sign = (include_sign && ((j * l) & 1L)) ? -1.0 : 1.0;
            const double slice = closed ? wigner_coeff_closed(s, 0.5 * j, x)
                                        : wigner_coeff(ws, 0.5 * j, x);
            acc += sign * slice;
        }
    }
    return 0.25 * acc;
}

// Slightly relativistic generalization: the same (j, l) resummation applied
// to the phases m^2 (1 - q m^2 / 2).  With m = (j+rho)/2, n = (j-rho)/2 the
// extra phase is exp[-i pi q tau j rho (j^2 + rho^2) / 2]; the rho-integral
// is evaluated numerically under the Gaussian envelope.  Accepts q >= 0 and
// reduces continuously to the straight-line form as q -> 0.
inline double density_worldline_relativistic(const SpectralCoefficients& s, const BoxConfig& cfg,
                                             const WorldlineBudget& budget, double u, double tau) {
    if (budget.tail_estimate > budget.tolerance)
        throw budget_error("density_worldline_relativistic: budget tail exceeds tolerance");
    const double q = cfg.rel_q;

    const double support = s.support_radius(1e-12);
    double phase_bw = 0.5;  // cycles per unit rho from the coefficient phases
    if (s.has_closed_form()) {
        const GaussianForm& g = s.closed_form();
        phase_bw = 0.5 + g.packet().center / (4.0 * g.box().length);
    }

    double acc = 0.0;
    for (long j = -budget.j_max; j <= budget.j_max; ++j) {
        const double R = 2.0 * support - std::abs(static_cast<double>(j));
        if (R <= 0.0) continue;
        const double center = u - 2.0 * static_cast<double>(j) * tau;
        const long l_lo = static_cast<long>(std::ceil(center - budget.chi_max));
        const long l_hi = static_cast<long>(std::floor(center + budget.chi_max));
        for (long l = l_lo; l <= l_hi; ++l) {
            const double x = chi(j, l, u, tau);
            // Total oscillation rate: the xi factor plus coefficient phases
            // plus the (small) cubic relativistic term.
            const double cubic =
                0.25 * std::abs(q * tau * static_cast<double>(j)) *
                (static_cast<double>(j) * static_cast<double>(j) + 3.0 * R * R);
            const double cycles = 0.5 * std::abs(x) + phase_bw + cubic / (2.0 * pi);
            const int n = std::max(64, static_cast<int>(std::ceil(2.0 * R * cycles * 8.0))) | 1;
            const cplx slice = trapezoid(
                [&](double rho) {
                    const cplx prod = std::conj(s.continuous(0.5 * (j + rho))) *
                                      s.continuous(0.5 * (j - rho));
                    const double ang = -pi * rho * x -
                                       0.5 * pi * q * tau * static_cast<double>(j) * rho *
                                           (static_cast<double>(j) * static_cast<double>(j) +
                                            rho * rho);
                    return prod * cplx{std::cos(ang), std::sin(ang)};
                },
                -R, R, n);
            const double sign = ((j * l) & 1L) ? -1.0 : 1.0;
            acc += sign * slice.real();
        }
    }
    return 0.25 * acc;
}

}  // namespace carpetlab

#endif
