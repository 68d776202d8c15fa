#ifndef CARPETLAB_RESUM_HPP
#define CARPETLAB_RESUM_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include "common.hpp"
#include "quadrature.hpp"

namespace carpetlab {

// A double-sum summand f_{m,n} together with a continuous extension
// f[alpha, beta] agreeing at integer pairs and a dominating envelope.  The
// envelope drives every truncation decision; summands without one are
// refused, which is stricter than the paper but keeps oscillatory cases
// honest (they can look small where they are not).
struct SummandSpec {
    std::function<cplx(long, long)> discrete;
    std::function<cplx(double, double)> continuous;
    std::function<double(double, double)> envelope;
    double support_radius{0.0};  // envelope negligible when |alpha| or |beta| > this
    double bandwidth{1.0};       // cycles per unit index in the continuous extension

    void require_envelope() const {
        if (!envelope || !(support_radius > 0.0))
            throw std::invalid_argument("SummandSpec: envelope with support radius required");
    }
};

// Plain truncated double sum over |m| <= m_bound, |n| <= n_bound.
// The oracle for everything else.
inline cplx sum_direct(const SummandSpec& spec, long m_bound, long n_bound,
                       double tail_tol = 1e-12) {
    if (spec.envelope) {
        double edge = 0.0;
        for (long k = -n_bound; k <= n_bound; ++k)
            edge = std::max({edge, spec.envelope(static_cast<double>(m_bound), static_cast<double>(k)),
                             spec.envelope(static_cast<double>(k), static_cast<double>(n_bound))});
        if (edge > tail_tol)
            throw quadrature_error("sum_direct: envelope not negligible at the truncation boundary");
    }
    std::complex<long double> acc{};
    for (long m = -m_bound; m <= m_bound; ++m)
        for (long n = -n_bound; n <= n_bound; ++n) {
            const cplx v = spec.discrete(m, n);
            acc += std::complex<long double>(v.real(), v.imag());
        }
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

// Even/odd re-indexing: sum f_{m,n} = sum_{r,s} f_{s+r,s-r} + f_{s+r+1,s-r}.
// Pure bijective re-indexing; equals sum_direct exactly for finitely
// supported summands once the (r, s) bound covers the support.
inline cplx reindex_even_odd(const SummandSpec& spec, long bound) {
    std::complex<long double> acc{};
    for (long r = -bound; r <= bound; ++r)
        for (long s = -bound; s <= bound; ++s) {
            const cplx even = spec.discrete(s + r, s - r);
            const cplx odd = spec.discrete(s + r + 1, s - r);
            acc += std::complex<long double>(even.real() + odd.real(), even.imag() + odd.imag());
        }
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

namespace detail {

// Shared core of the two Poisson-resummation identities.  symmetric = false
// gives I1 (arguments (j + rho)/2, (j - rho)/2); symmetric = true gives I2
// ((sigma + j)/2, (sigma - j)/2), whose second argument carries the
// opposite sign of the integration variable.
inline cplx resum_core(const SummandSpec& spec, long l_bound, long j_bound, bool symmetric) {
    spec.require_envelope();
    const double R = spec.support_radius;

    std::complex<long double> acc{};
    for (long j = -j_bound; j <= j_bound; ++j) {
        const double reach = 2.0 * R - std::abs(static_cast<double>(j));
        if (reach <= 0.0) continue;
        for (long l = -l_bound; l <= l_bound; ++l) {
            const double cycles = 0.5 * std::abs(static_cast<double>(l)) + spec.bandwidth;
            const int n =
                std::max(129, static_cast<int>(std::ceil(2.0 * reach * cycles * 8.0))) | 1;
            const cplx integral = trapezoid(
                [&](double t) {
                    const double a = symmetric ? 0.5 * (t + j) : 0.5 * (j + t);
                    const double b = symmetric ? 0.5 * (t - j) : 0.5 * (j - t);
                    const double ang = pi * static_cast<double>(l) * t;
                    return spec.continuous(a, b) * cplx{std::cos(ang), std::sin(ang)};
                },
                -reach, reach, n);
            const double sign = ((j * l) & 1L) ? -1.0 : 1.0;
            const cplx term = 0.5 * sign * integral;
            acc += std::complex<long double>(term.real(), term.imag());
        }
    }
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

}  // namespace detail

// Identity I1: (1/2) sum_{l,j} (-1)^{jl} int drho f[(j+rho)/2, (j-rho)/2] e^{i pi l rho}.
inline cplx resum_I1(const SummandSpec& spec, long l_bound, long j_bound) {
    return detail::resum_core(spec, l_bound, j_bound, false);
}

// Identity I2: the sigma-symmetric form with f[(sigma+j)/2, (sigma-j)/2].
inline cplx resum_I2(const SummandSpec& spec, long l_bound, long j_bound) {
    return detail::resum_core(spec, l_bound, j_bound, true);
}

// 1-D Poisson building block: sum_m g_m = sum_l int g[mu] e^{2 pi i l mu} dmu.
inline cplx poisson_sum_1d(const std::function<cplx(double)>& g, double support_radius,
                           long l_bound, double bandwidth = 1.0) {
    std::complex<long double> acc{};
    for (long l = -l_bound; l <= l_bound; ++l) {
        const double cycles = std::abs(static_cast<double>(l)) + bandwidth;
        const int n = std::max(129, static_cast<int>(
                                        std::ceil(2.0 * support_radius * cycles * 8.0))) |
                      1;
        const cplx integral = trapezoid(
            [&](double mu) {
                const double ang = 2.0 * pi * static_cast<double>(l) * mu;
                return g(mu) * cplx{std::cos(ang), std::sin(ang)};
            },
            -support_radius, support_radius, n);
        acc += std::complex<long double>(integral.real(), integral.imag());
    }
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

}  // namespace carpetlab

#endif
