#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "carpetlab/decomposition.hpp"
#include "carpetlab/worldline.hpp"

using namespace carpetlab;

namespace {

GaussianPacket fig1_packet() { return GaussianPacket{0.5, 0.03, 10.0}; }

}  // namespace

TEST_CASE("straight-line coordinate chi") {
    CHECK(chi(0, 0, 0.37, 0.91) == 0.37);
    CHECK(chi(0, 1, 1.0, 0.5) == 0.0);
    CHECK(chi(1, 0, 0.6, 0.3) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(chi(2, -1, 0.25, 0.125) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("worldline sum matches the direct density at random points") {
    BoxConfig cfg;
    const SpectralCoefficients s = project(fig1_packet(), cfg, 48);
    const WorldlineBudget budget = make_budget(s, 1e-6);
    CHECK(budget.tail_estimate < 1e-6);

    double max_w = 0.0;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 40; ++i) pts.emplace_back(ud(rng), ud(rng));
    for (const auto& [u, tau] : pts) max_w = std::max(max_w, density_direct(s, cfg, u, tau));
    max_w = std::max(max_w, density_direct(s, cfg, 0.5, 0.0));

    for (const auto& [u, tau] : pts) {
        const double wl = density_worldline(s, cfg, budget, u, tau);
        const double dd = density_direct(s, cfg, u, tau);
        CHECK(std::abs(wl - dd) < 1e-5 * max_w);
        CHECK(wl > -10.0 * budget.tolerance);
    }
}

TEST_CASE("single eigenstate through the interpolated path") {
    BoxConfig cfg;
    std::vector<cplx> c(3, cplx{0.0, 0.0});
    c[1] = {1.0, 0.0};  // m = 2
    const SpectralCoefficients s = make_coefficients(std::move(c));
    const WorldlineBudget budget = make_budget(s, 1e-7);
    for (double tau : {0.0, 0.33})
        for (double u : {0.2, 0.5, 0.85}) {
            const double expected = 2.0 * std::pow(std::sin(2.0 * pi * u), 2);
            CHECK(std::abs(density_worldline(s, cfg, budget, u, tau) - expected) < 1e-6);
        }
}

TEST_CASE("the alternating sign is load-bearing") {
    BoxConfig cfg;
    const SpectralCoefficients s = project(fig1_packet(), cfg, 48);
    const WorldlineBudget budget = make_budget(s, 1e-6);
    double worst = 0.0;
    for (double tau : {0.1, 0.15, 0.3})
        for (double u : {0.2, 0.3, 0.55}) {
            const double with = density_worldline(s, cfg, budget, u, tau, true);
            const double without = density_worldline(s, cfg, budget, u, tau, false);
            worst = std::max(worst, std::abs(with - without));
        }
    CHECK(worst > 1e-3);
}

TEST_CASE("enlarging the budget moves the result by at most the tail") {
    BoxConfig cfg;
    const SpectralCoefficients s = project(fig1_packet(), cfg, 48);
    const WorldlineBudget budget = make_budget(s, 1e-6);
    WorldlineBudget wider = budget;
    wider.j_max += 8;
    wider.chi_max += 1.0;
    for (double tau : {0.07, 0.4})
        for (double u : {0.25, 0.6}) {
            const double a = density_worldline(s, cfg, budget, u, tau);
            const double b = density_worldline(s, cfg, wider, u, tau);
            CHECK(std::abs(a - b) <= budget.tail_estimate + 1e-9);
        }
}

TEST_CASE("relativistic path reduces to the straight-line form as q -> 0") {
    BoxConfig cfg;
    const SpectralCoefficients s = project(fig1_packet(), cfg, 48);
    const WorldlineBudget budget = make_budget(s, 1e-6);
    for (double tau : {0.1, 0.45})
        for (double u : {0.3, 0.62}) {
            const double straight = density_worldline(s, cfg, budget, u, tau);
            const double rel = density_worldline_relativistic(s, cfg, budget, u, tau);
            CHECK(std::abs(straight - rel) < 1e-8);
        }
}

TEST_CASE("relativistic worldline matches the direct relativistic sum") {
    BoxConfig cfg;
    cfg.rel_q = 1e-6;
    const SpectralCoefficients s = project(fig1_packet(), cfg, 48);
    const WorldlineBudget budget = make_budget(s, 1e-6);
    const double max_w = density_direct(s, cfg, 0.5, 0.0);
    for (double tau : {0.15, 0.5})
        for (double u : {0.3, 0.5, 0.71}) {
            const double wl = density_worldline_relativistic(s, cfg, budget, u, tau);
            const double dd = density_direct(s, cfg, u, tau);
            CHECK(std::abs(wl - dd) < 1e-5 * max_w);
        }
}

TEST_CASE("straight-line form rejects a relativistic box") {
    BoxConfig cfg;
    cfg.rel_q = 1e-6;
    BoxConfig flat;
    const SpectralCoefficients s = project(fig1_packet(), flat, 48);
    const WorldlineBudget budget = make_budget(s, 1e-6);
    CHECK_THROWS_AS(density_worldline(s, cfg, budget, 0.5, 0.1), std::invalid_argument);
}

TEST_CASE("a budget with an oversized tail is refused") {
    BoxConfig cfg;
    const SpectralCoefficients s = project(fig1_packet(), cfg, 48);
    WorldlineBudget bad = make_budget(s, 1e-6);
    bad.tail_estimate = 1.0;
    CHECK_THROWS_AS(density_worldline(s, cfg, bad, 0.5, 0.1), budget_error);
}
