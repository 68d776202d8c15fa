#ifndef CARPETLAB_REVIVAL_HPP
#define CARPETLAB_REVIVAL_HPP

#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "box_basis.hpp"
#include "common.hpp"
#include "wavepacket.hpp"

namespace carpetlab {

// A fraction q/r of the revival time plus an offset.  Reduced on
// construction; gcd(q, r) = 1 afterwards.
struct FractionTime {
    long numerator{0};
    long denominator{1};
    double offset{0.0};

    FractionTime(long q, long r, double dt = 0.0) : numerator(q), denominator(r), offset(dt) {
        if (r < 1) throw std::invalid_argument("FractionTime: denominator must be >= 1");
        if (q < 0) throw std::invalid_argument("FractionTime: numerator must be >= 0");
        const long g = std::gcd(q == 0 ? r : q, r);
        numerator = q / g;
        denominator = r / g;
        if (q == 0) denominator = 1;
    }

    double tau(const BoxConfig& cfg) const {
        return static_cast<double>(numerator) / static_cast<double>(denominator) +
               offset / cfg.revival_time();
    }

    // The freely propagated images have not substantially overlapped while
    // |dt| <= T/(20 r^2); outside this window evaluation still works but is
    // tagged extrapolated.
    bool within_validity(const BoxConfig& cfg) const {
        return std::abs(offset) <=
               cfg.revival_time() / (20.0 * static_cast<double>(denominator * denominator));
    }
};

// Gauss sum W_l^(r) = (1/r) sum_{p=0}^{r-1} exp[-2 pi i (p^2 q/r - p l/r)].
// Exact modular arithmetic in the exponent; periodic in l with period r.
inline cplx gauss_sum(const FractionTime& ft, long l) {
    const long r = ft.denominator;
    const long q = ft.numerator;
    cplx acc{0.0, 0.0};
    for (long p = 0; p < r; ++p) {
        long rem = (p * p % r * (q % r) - p % r * (l % r)) % r;
        rem = ((rem % r) + r) % r;
        const double ang = -2.0 * pi * static_cast<double>(rem) / static_cast<double>(r);
        acc += cplx{std::cos(ang), std::sin(ang)};
    }
    return acc / static_cast<double>(r);
}

// Freely spreading Gaussian, closed form.  Derived from the Fresnel
// integral of the free-particle Green's function against the packet; the
// two principal square roots combine without a branch jump because
// arg(1/(i t)) + arg(1/a) stays inside (-pi, pi).
struct FreeGaussian {
    GaussianPacket packet;
    BoxConfig box;
    double dt{0.0};

    cplx operator()(double x) const {
        if (dt == 0.0) return packet.amplitude(x);
        const double sigma = packet.width;
        const double M = box.mass, hbar = box.hbar;
        const double norm = std::pow(2.0 * pi * sigma * sigma, -0.25);
        const cplx a = cplx{1.0 / (4.0 * sigma * sigma), -M / (2.0 * hbar * dt)};
        const cplx b = cplx{packet.center / (2.0 * sigma * sigma),
                            packet.mean_k - M * x / (hbar * dt)};
        const cplx c = cplx{-packet.center * packet.center / (4.0 * sigma * sigma),
                            M * x * x / (2.0 * hbar * dt)};
        // sqrt(M / (2 pi i hbar dt)) with the i pulled out as e^{-+ i pi/4}
        const cplx g = std::sqrt(cplx{M / (2.0 * pi * hbar * std::abs(dt)), 0.0}) *
                       std::exp(cplx{0.0, (dt > 0 ? -1.0 : 1.0) * pi / 4.0});
        return norm * g * std::sqrt(pi / a) * std::exp(b * b / (4.0 * a) + c);
    }

    // |phi(x, dt)|^2 stays Gaussian with this width.
    double spread_width() const {
        const double alpha = box.hbar * dt / (2.0 * box.mass * packet.width * packet.width);
        return packet.width * std::sqrt(1.0 + alpha * alpha);
    }
};

inline FreeGaussian free_propagate(const GaussianPacket& packet, const BoxConfig& cfg,
                                   double dt) {
    return FreeGaussian{packet, cfg, dt};
}

// Sampled-packet path: quadrature against the free Green's function on the
// sample grid.  Fails when the Fresnel chirp exceeds the grid Nyquist bound.
inline std::function<cplx(double)> free_propagate(const SampledWavefunction& samples,
                                                  const BoxConfig& cfg, double dt) {
    if (dt == 0.0)
        return [samples](double x) { return samples(x); };
    const double h = samples.spacing();
    const double span = samples.x.back() - samples.x.front();
    // Local chirp frequency M |x - x'| / (hbar dt); require >= 4 samples per
    // cycle across the worst-case separation (one box span of slack).
    const double max_freq = cfg.mass * 2.0 * span / (cfg.hbar * std::abs(dt));
    if (h * max_freq > pi / 2.0)
        throw quadrature_error("free_propagate: Fresnel phase exceeds the grid Nyquist bound");
    const BoxConfig box = cfg;
    return [samples, box, dt, h](double x) {
        // Composite trapezoid over the sample grid.
        const double M = box.mass, hbar = box.hbar;
        const cplx g = std::sqrt(cplx{M / (2.0 * pi * hbar * std::abs(dt)), 0.0}) *
                       std::exp(cplx{0.0, (dt > 0 ? -1.0 : 1.0) * pi / 4.0});
        cplx acc{0.0, 0.0};
        for (std::size_t i = 0; i < samples.x.size(); ++i) {
            const double d = x - samples.x[i];
            const double ang = M * d * d / (2.0 * hbar * dt);
            cplx term = samples.value[i] * cplx{std::cos(ang), std::sin(ang)};
            if (i == 0 || i + 1 == samples.x.size()) term *= 0.5;
            acc += term;
        }
        return g * acc * h;
    };
}

// psi(x, (q/r) T + dt) as the Gauss-sum superposition of displaced free
// packets and their mirror images, truncated at |l| <= l_max.
inline cplx psi_revival(const GaussianPacket& packet, const BoxConfig& cfg,
                        const FractionTime& ft, double x, int l_max = 0) {
    const long r = ft.denominator;
    const double L = cfg.length;
    const FreeGaussian phi = free_propagate(packet, cfg, ft.offset);

    if (l_max <= 0) {
        const double sigma_t = phi.spread_width();
        const double reach = L + packet.center + 10.0 * sigma_t;
        l_max = static_cast<int>(std::ceil(static_cast<double>(r) * reach / (2.0 * L))) + 1;
        if (l_max > 64)
            throw truncation_error("psi_revival: image tail bound unreachable within l_max cap");
    }

    cplx acc{0.0, 0.0};
    for (long l = -l_max; l <= l_max; ++l) {
        const cplx w = gauss_sum(ft, l);
        const double shift = static_cast<double>(l) / static_cast<double>(r) * 2.0 * L;
        acc += w * (phi(x - shift) - phi(-x + shift));
    }
    return acc;
}

}  // namespace carpetlab

#endif
