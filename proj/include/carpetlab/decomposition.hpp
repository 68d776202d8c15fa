#ifndef CARPETLAB_DECOMPOSITION_HPP
#define CARPETLAB_DECOMPOSITION_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "box_basis.hpp"
#include "common.hpp"
#include "wavepacket.hpp"

namespace carpetlab {

// The four contributions to the probability density at one space-time
// point: co-propagating (canal/ridge) and counter-propagating (classical)
// pairs.  Scaled units: values are contributions to L * W(x, t).
// The qc pair are mutual conjugates; the cl pair are each real but in
// general unequal (they are half the squared moduli of the right- and
// left-moving partial waves).
struct FourTerms {
    cplx i_qc_plus{}, i_qc_minus{}, i_cl_plus{}, i_cl_minus{};

    cplx sum() const { return i_qc_plus + i_qc_minus + i_cl_plus + i_cl_minus; }
};

// sqrt(L) * psi(x, t) evaluated at u = x/L, tau = t/T by the truncated
// eigenbasis sum.  Accumulates in extended precision; the four-term
// identity is checked at the 1e-12 level downstream.
inline cplx psi_direct(const SpectralCoefficients& s, const BoxConfig& cfg, double u, double tau) {
    std::complex<long double> acc{0.0L, 0.0L};
    for (int m = 1; m <= s.m_max(); ++m) {
        const cplx c = s.coefficient(m) * phase_factor(cfg, m, tau);
        const double basis = std::sqrt(2.0) * std::sin(m * pi * u);
        acc += std::complex<long double>(c.real() * basis, c.imag() * basis);
    }
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

// L * W(x, t) = |sqrt(L) psi|^2.
inline double density_direct(const SpectralCoefficients& s, const BoxConfig& cfg, double u,
                             double tau) {
    return std::norm(psi_direct(s, cfg, u, tau));
}

// The section-3 split.  Double sums over positive m, n exactly as written;
// requires the exact quadratic dispersion (q = 0) because the split rests on
// k_m^2 - k_n^2 = (k_m + k_n)(k_m - k_n).
inline FourTerms four_terms(const SpectralCoefficients& s, const BoxConfig& cfg, double u,
                            double tau) {
    if (cfg.rel_q != 0.0)
        throw std::invalid_argument("four_terms: the four-term split requires q = 0");

    const int mmax = s.m_max();
    // Per-index factors:
    //   a_m  = conj(psi_m) e^{+i m pi u} e^{+2 pi i m^2 tau}
    //   b_n  = psi_n       e^{+i n pi u} e^{-2 pi i n^2 tau}
    //   bc_n = psi_n       e^{-i n pi u} e^{-2 pi i n^2 tau}
    // so that a_m b_n sums to the qc(+) double sum and a_m bc_n to cl(+).
    std::vector<cplx> am(static_cast<std::size_t>(mmax)), bn(static_cast<std::size_t>(mmax)),
        bc(static_cast<std::size_t>(mmax));
    for (int m = 1; m <= mmax; ++m) {
        const cplx pos = cplx{std::cos(m * pi * u), std::sin(m * pi * u)};
        const cplx ph = phase_factor(cfg, m, tau);  // e^{-2 pi i m^2 tau} for q=0
        am[static_cast<std::size_t>(m - 1)] = std::conj(s.coefficient(m) * ph) * pos;
        bn[static_cast<std::size_t>(m - 1)] = s.coefficient(m) * ph * pos;
        bc[static_cast<std::size_t>(m - 1)] = s.coefficient(m) * ph * std::conj(pos);
    }

    std::complex<long double> qc_p{}, qc_m{}, cl_p{}, cl_m{};
    for (int m = 1; m <= mmax; ++m) {
        for (int n = 1; n <= mmax; ++n) {
            const cplx a = am[static_cast<std::size_t>(m - 1)];
            const cplx qc1 = a * bn[static_cast<std::size_t>(n - 1)];
            const cplx cl1 = a * bc[static_cast<std::size_t>(n - 1)];
            // Minus families flip the sign of the *position* phase only; the
            // time phase e^{+2 pi i (m^2 - n^2) tau} is shared by all four.
            // For qc this makes the (m, n) term the conjugate of the (n, m)
            // plus term, so I_qc^- = conj(I_qc^+).  For cl it does not: the
            // plus and minus sums are |sum_m a_m|^2- and |sum_n b_n|^2-type
            // quantities, each real but in general different.
            const cplx cl2 = std::conj(bn[static_cast<std::size_t>(m - 1)]) *
                             bn[static_cast<std::size_t>(n - 1)];
            qc_p += std::complex<long double>(qc1.real(), qc1.imag());
            cl_p += std::complex<long double>(cl1.real(), cl1.imag());
            cl_m += std::complex<long double>(cl2.real(), cl2.imag());
        }
    }
    qc_m = std::conj(qc_p);

    auto shrink = [](std::complex<long double> v, double scale) {
        return cplx{static_cast<double>(scale * v.real()), static_cast<double>(scale * v.imag())};
    };
    FourTerms out;
    out.i_qc_plus = shrink(qc_p, -0.5);
    out.i_qc_minus = shrink(qc_m, -0.5);
    out.i_cl_plus = shrink(cl_p, 0.5);
    out.i_cl_minus = shrink(cl_m, 0.5);
    return out;
}

// World-line slopes of the (m, n) intermode pair in (u, 2 tau) coordinates:
// (m - n) for the quantum canal/ridge family, (m + n) for the classical one.
inline std::pair<long, long> phase_lines(long m, long n) { return {m - n, m + n}; }

}  // namespace carpetlab

#endif
