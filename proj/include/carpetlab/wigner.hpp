#ifndef CARPETLAB_WIGNER_HPP
#define CARPETLAB_WIGNER_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "common.hpp"
#include "quadrature.hpp"
#include "wavepacket.hpp"

namespace carpetlab {

// On-demand evaluation of Psi^(W)(mu, xi), the Wigner function of the
// expansion coefficients.  Conjugation sits at mu + rho/2; swapping it
// yields Psi(mu, -xi), still real, so a dedicated regression test guards
// the orientation through the phase-space correspondence.
struct WignerSlice {
    const SpectralCoefficients* source{nullptr};
    double half_width{0.0};
    int base_nodes{1024};
    double tail_tol{1e-10};

    static WignerSlice auto_for(const SpectralCoefficients& s, double tail_tol = 1e-10) {
        WignerSlice ws;
        ws.source = &s;
        ws.tail_tol = tail_tol;
        // Both factors psi[mu +- rho/2] must clear the support, so the rho
        // range is twice the support radius of psi[mu].
        ws.half_width = 2.0 * s.support_radius(tail_tol * 1e-2) + 2.0;
        return ws;
    }

    int nodes_for(double xi) const {
        // e^{-i pi rho xi} completes |xi|/2 cycles per unit rho; keep at
        // least 8 nodes per cycle plus a floor for the envelope itself.
        const double cycles = 0.5 * std::abs(xi) + 1.0;
        const int n = static_cast<int>(std::ceil(2.0 * half_width * cycles * 8.0));
        return std::max(base_nodes, n) | 1;
    }
};

inline cplx wigner_coeff_raw(const WignerSlice& ws, double mu, double xi) {
    const SpectralCoefficients& s = *ws.source;
    const double R = ws.half_width;
    // Tail bound of the rho-integrand relative to its peak.
    const double edge = s.envelope(mu + 0.5 * R) * s.envelope(mu - 0.5 * R);
    const double peak = s.envelope(mu) * s.envelope(mu);
    if (peak > 0.0 && edge > ws.tail_tol * peak)
        throw quadrature_error("wigner_coeff: rho-integrand tail bound failed; enlarge R");
    return trapezoid(
        [&](double rho) {
            const cplx prod = std::conj(s.continuous(mu + 0.5 * rho)) * s.continuous(mu - 0.5 * rho);
            const double ang = -pi * rho * xi;
            return prod * cplx{std::cos(ang), std::sin(ang)};
        },
        -R, R, ws.nodes_for(xi));
}

// Real value of Psi^(W); the imaginary quadrature residue is reported via
// the optional pointer and discarded.
inline double wigner_coeff(const WignerSlice& ws, double mu, double xi,
                           double* imag_residual = nullptr) {
    const cplx v = wigner_coeff_raw(ws, mu, xi);
    if (imag_residual) *imag_residual = std::abs(v.imag());
    return v.real();
}

// Closed form of Psi^(W) for Gaussian packets: four Gaussian integrals
//   int exp(-alpha rho^2 + beta rho + gamma) drho = sqrt(pi/alpha) e^{beta^2/(4 alpha) + gamma}.
inline double wigner_coeff_closed(const GaussianForm& form, double mu, double xi) {
    cplx acc{0.0, 0.0};
    for (int a = 0; a < 2; ++a) {
        const GaussTerm& ta = form.term(a);
        const QuadExponent qa = ta.expo.conjugated();
        for (int b = 0; b < 2; ++b) {
            const GaussTerm& tb = form.term(b);
            const QuadExponent& qb = tb.expo;
            // Exponent of conj-term(mu + rho/2) + term(mu - rho/2) - i pi xi rho.
            const cplx alpha = -(qa.c2 + qb.c2) * 0.25;
            const cplx beta =
                0.5 * (qa.c1 - qb.c1) + mu * (qa.c2 - qb.c2) + cplx{0.0, -pi * xi};
            const cplx gamma = qa.c0 + qb.c0 + mu * (qa.c1 + qb.c1) + mu * mu * (qa.c2 + qb.c2);
            acc += std::conj(ta.coeff) * tb.coeff * std::sqrt(pi / alpha) *
                   std::exp(beta * beta / (4.0 * alpha) + gamma);
        }
    }
    return acc.real();
}

inline double wigner_coeff_closed(const SpectralCoefficients& s, double mu, double xi) {
    return wigner_coeff_closed(s.closed_form(), mu, xi);
}

// Wigner function Phi^(W)(x, p) of the mirrored superposition
// phi(x) - phi(-x), by direct y-quadrature.  Conjugation sits at x - y/2.
inline double wigner_position(const GaussianPacket& packet, const BoxConfig& cfg, double x,
                              double p) {
    const double sigma = packet.width;
    auto mirrored = [&](double z) { return packet.amplitude(z) - packet.amplitude(-z); };
    // phi-tilde support: |z| within [x0 - t sigma, x0 + t sigma], t ~ 12.
    const double reach = packet.center + 14.0 * sigma;
    const double Ry = 2.0 * (std::abs(x) + reach);
    const double freq =
        std::abs(p) / cfg.hbar + std::abs(packet.mean_k) + 4.0 / sigma;  // rad per unit y
    const int n = std::max(1024, static_cast<int>(std::ceil(2.0 * Ry * freq / (2.0 * pi) * 8.0))) | 1;
    const cplx v = trapezoid(
        [&](double y) {
            const double ang = -p * y / cfg.hbar;
            return mirrored(x + 0.5 * y) * std::conj(mirrored(x - 0.5 * y)) *
                   cplx{std::cos(ang), std::sin(ang)};
        },
        -Ry, Ry, n);
    return v.real() / (2.0 * pi * cfg.hbar);
}

// Analytic Wigner function of a single (unmirrored) Gaussian; test oracle
// for the mirror-free limit.
inline double wigner_position_single_gaussian(const GaussianPacket& packet, const BoxConfig& cfg,
                                              double x, double p) {
    const double sigma = packet.width;
    const double dp = p - cfg.hbar * packet.mean_k;
    const double dx = x - packet.center;
    return std::exp(-dx * dx / (2.0 * sigma * sigma) -
                    2.0 * sigma * sigma * dp * dp / (cfg.hbar * cfg.hbar)) /
           (pi * cfg.hbar);
}

struct CorrespondenceReport {
    double max_deviation{0.0};
    double max_value{0.0};
    int samples{0};
    double tol{0.0};
    bool passed{false};
    // p_j = j pi hbar / (2 L): the discrete momenta at which the worldline
    // sum samples the phase-space Wigner function.
    static double momentum_of(const BoxConfig& cfg, long j) {
        return static_cast<double>(j) * pi * cfg.hbar / (2.0 * cfg.length);
    }
};

// Samples |Psi^(W)(mu, xi) - 2 pi hbar Phi^(W)(L xi, pi hbar mu / L)| at
// random points.  Both sides go through independent quadratures.
inline CorrespondenceReport verify_correspondence(const WignerSlice& ws,
                                                  const GaussianPacket& packet,
                                                  const BoxConfig& cfg, int samples, double tol,
                                                  unsigned long seed = 20260823UL) {
    CorrespondenceReport report;
    report.samples = samples;
    report.tol = tol;

    const SpectralCoefficients& s = *ws.source;
    const double mu_range = s.support_radius(1e-6);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mu_dist(-mu_range, mu_range);
    std::uniform_real_distribution<double> xi_dist(-1.2, 1.2);

    for (int i = 0; i < samples; ++i) {
        const double mu = mu_dist(rng);
        const double xi = xi_dist(rng);
        const double lhs = wigner_coeff(ws, mu, xi);
        const double rhs = 2.0 * pi * cfg.hbar *
                           wigner_position(packet, cfg, cfg.length * xi,
                                           pi * cfg.hbar * mu / cfg.length);
        report.max_deviation = std::max(report.max_deviation, std::abs(lhs - rhs));
        report.max_value = std::max({report.max_value, std::abs(lhs), std::abs(rhs)});
    }
    report.passed = report.max_deviation < tol;
    return report;
}

}  // namespace carpetlab

#endif
