#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <doctest.h>

#include "carpetlab/resum.hpp"

using namespace carpetlab;

namespace {

// Complex 2-D Gaussian summand with linear phases; the engine's bread and
// butter.
SummandSpec gaussian_summand(double a, double b, double wa, double wb, double pa, double pb) {
    SummandSpec spec;
    spec.continuous = [=](double alpha, double beta) {
        const double da = (alpha - a) / wa, db = (beta - b) / wb;
        const double mag = std::exp(-0.5 * da * da - 0.5 * db * db);
        const double ang = pa * alpha + pb * beta;
        return mag * cplx{std::cos(ang), std::sin(ang)};
    };
    spec.discrete = [=, f = spec.continuous](long m, long n) {
        return f(static_cast<double>(m), static_cast<double>(n));
    };
    spec.envelope = [=](double alpha, double beta) {
        const double da = (alpha - a) / wa, db = (beta - b) / wb;
        return std::exp(-0.5 * da * da - 0.5 * db * db);
    };
    spec.support_radius = std::max(std::abs(a), std::abs(b)) + 9.0 * std::max(wa, wb);
    spec.bandwidth = (std::abs(pa) + std::abs(pb)) / (2.0 * pi) + 1.0;
    return spec;
}

SummandSpec finite_summand(const std::vector<std::vector<cplx>>& table, long half) {
    SummandSpec spec;
    spec.discrete = [table, half](long m, long n) -> cplx {
        if (std::abs(m) > half || std::abs(n) > half) return {0.0, 0.0};
        return table[static_cast<std::size_t>(m + half)][static_cast<std::size_t>(n + half)];
    };
    spec.envelope = [half](double alpha, double beta) {
        return (std::abs(alpha) <= half + 0.5 && std::abs(beta) <= half + 0.5) ? 1.0 : 0.0;
    };
    spec.support_radius = static_cast<double>(half) + 1.0;
    return spec;
}

}  // namespace

TEST_CASE("direct double sum: indicator, separable, boundary guard") {
    SummandSpec ind;
    ind.discrete = [](long m, long n) { return (m == 0 && n == 0) ? cplx{1.0, 0.0} : cplx{}; };
    ind.envelope = [](double a, double b) { return std::exp(-a * a - b * b); };
    ind.support_radius = 7.0;
    CHECK(std::abs(sum_direct(ind, 8, 8) - cplx{1.0, 0.0}) < 1e-15);

    // Separable finite summand: (sum a)(sum b).
    auto a = [](long m) { return m >= -2 && m <= 2 ? 0.3 * static_cast<double>(m + 3) : 0.0; };
    auto b = [](long n) { return n >= -1 && n <= 3 ? 1.0 / static_cast<double>(n + 2) : 0.0; };
    SummandSpec sep;
    sep.discrete = [&](long m, long n) { return cplx{a(m) * b(n), 0.0}; };
    double sa = 0.0, sb = 0.0;
    for (long m = -2; m <= 2; ++m) sa += a(m);
    for (long n = -1; n <= 3; ++n) sb += b(n);
    CHECK(std::abs(sum_direct(sep, 6, 6) - cplx{sa * sb, 0.0}) < 1e-13);

    // Gaussian summand truncated inside its support must be refused.
    const SummandSpec g = gaussian_summand(0.0, 0.0, 2.0, 2.0, 0.0, 0.0);
    CHECK_THROWS_AS(sum_direct(g, 3, 3), quadrature_error);
}

TEST_CASE("2-D Gaussian sum is self-converged") {
    const SummandSpec g = gaussian_summand(0.5, -0.3, 1.5, 1.2, 0.4, 0.0);
    const cplx coarse = sum_direct(g, 16, 16);
    const cplx fine = sum_direct(g, 24, 24);
    CHECK(std::abs(coarse - fine) < 1e-12);
}

TEST_CASE("even/odd re-indexing is an exact bijection") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> vd(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const long half = 4;
        std::vector<std::vector<cplx>> table(2 * half + 1,
                                             std::vector<cplx>(2 * half + 1));
        for (auto& row : table)
            for (auto& v : row) v = cplx{vd(rng), vd(rng)};
        const SummandSpec spec = finite_summand(table, half);
        const cplx direct = sum_direct(spec, half + 2, half + 2);
        const cplx reindexed = reindex_even_odd(spec, 2 * half + 2);
        CHECK(std::abs(direct - reindexed) < 1e-14);
    }
}

TEST_CASE("parity split covers single pairs") {
    for (auto [m0, n0] : {std::pair<long, long>{2, 0}, {3, 0}, {1, 2}, {-2, 1}}) {
        SummandSpec spec;
        spec.discrete = [m0 = m0, n0 = n0](long m, long n) {
            return (m == m0 && n == n0) ? cplx{1.0, 0.0} : cplx{};
        };
        CHECK(std::abs(reindex_even_odd(spec, 12) - cplx{1.0, 0.0}) < 1e-15);
    }
}

TEST_CASE("both Poisson identities reproduce the direct sum") {
    struct Params { double a, b, wa, wb, pa, pb; };
    const Params corpus[] = {
        {0.0, 0.0, 1.0, 1.0, 0.0, 0.0},  {1.3, -0.7, 1.5, 1.0, 0.0, 0.0},
        {0.4, 0.4, 0.8, 0.8, 0.9, 0.0},  {-1.0, 2.0, 1.2, 1.6, 0.0, -0.6},
        {2.5, -2.5, 1.0, 1.0, 0.5, 0.5},
    };
    for (const Params& p : corpus) {
        const SummandSpec g = gaussian_summand(p.a, p.b, p.wa, p.wb, p.pa, p.pb);
        const long bound = static_cast<long>(std::ceil(g.support_radius)) + 2;
        const cplx direct = sum_direct(g, bound, bound);
        const cplx i1 = resum_I1(g, 5, bound + 4);
        const cplx i2 = resum_I2(g, 5, bound + 4);
        CHECK(std::abs(i1 - direct) < 1e-10);
        CHECK(std::abs(i2 - direct) < 1e-10);
        CHECK(std::abs(i1 - i2) < 1e-10);
    }
}

TEST_CASE("asymmetric extension: the two identities still agree") {
    SummandSpec spec;
    spec.continuous = [](double a, double b) {
        return cplx{a * std::exp(-a * a - b * b), 0.0};
    };
    spec.discrete = [f = spec.continuous](long m, long n) {
        return f(static_cast<double>(m), static_cast<double>(n));
    };
    spec.envelope = [](double a, double b) {
        return (std::abs(a) + 1.0) * std::exp(-a * a - b * b);
    };
    spec.support_radius = 7.0;
    const cplx direct = sum_direct(spec, 9, 9);
    const cplx i1 = resum_I1(spec, 5, 12);
    const cplx i2 = resum_I2(spec, 5, 12);
    CHECK(std::abs(i1 - direct) < 1e-10);
    CHECK(std::abs(i2 - direct) < 1e-10);
}

TEST_CASE("summands without an envelope are refused") {
    SummandSpec bare;
    bare.discrete = [](long, long) { return cplx{0.0, 0.0}; };
    bare.continuous = [](double, double) { return cplx{0.0, 0.0}; };
    CHECK_THROWS_AS(resum_I1(bare, 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(resum_I2(bare, 2, 2), std::invalid_argument);
}

TEST_CASE("sign parity rule") {
    // (-1)^{jl} is +1 whenever j or l is even, -1 only for odd j and odd l.
    for (long j = -3; j <= 3; ++j)
        for (long l = -3; l <= 3; ++l) {
            const double sign = ((j * l) & 1L) ? -1.0 : 1.0;
            CHECK(sign == std::pow(-1.0, std::abs(j * l)));
        }
}

TEST_CASE("one-dimensional Poisson identity for a Gaussian") {
    auto g = [](double mu) {
        const double d = mu - 0.4;
        return cplx{std::exp(-0.5 * d * d), 0.0};
    };
    std::complex<long double> direct{};
    for (long m = -12; m <= 12; ++m) {
        const cplx v = g(static_cast<double>(m));
        direct += std::complex<long double>(v.real(), v.imag());
    }
    const cplx resummed = poisson_sum_1d(g, 10.0, 4);
    CHECK(std::abs(resummed - cplx{static_cast<double>(direct.real()),
                                   static_cast<double>(direct.imag())}) < 1e-12);
}

TEST_CASE("different extensions converge to the same sum") {
    const SummandSpec base = gaussian_summand(0.6, -0.2, 1.1, 1.3, 0.0, 0.0);
    SummandSpec warped = base;
    // Same integer values, different interpolation between them.
    warped.continuous = [f = base.continuous](double a, double b) {
        return f(a, b) + 0.3 * std::sin(pi * a) * std::sin(pi * b) *
                             std::exp(-0.5 * a * a - 0.5 * b * b);
    };
    const long bound = static_cast<long>(std::ceil(base.support_radius)) + 2;
    const cplx direct = sum_direct(base, bound, bound);
    double prev = 1e9;
    for (long l_bound : {4L, 8L, 16L}) {
        const double err = std::abs(resum_I1(warped, l_bound, bound + 4) - direct);
        CHECK(err <= prev + 1e-12);
        prev = err;
    }
    CHECK(prev < 1e-10);
}
