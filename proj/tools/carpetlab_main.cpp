// carpetlab: compute and export quantum-carpet density grids for a particle
// in a one-dimensional box, cross-check the available representations, and
// dump spectral coefficients and Gauss-sum tables.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "carpetlab/carpetlab.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_tolerance = 3;
constexpr int exit_io = 4;

struct CommonOpts {
    std::string config_path;
    std::string rep;
    std::string out_dir{"."};
    int nx{0};
    int nt{0};
    double tol{0.0};
};

carpetlab::RunConfig load(const CommonOpts& opts) {
    carpetlab::RunConfig cfg;
    if (!opts.config_path.empty()) cfg = carpetlab::parse_config_file(opts.config_path);
    if (!opts.rep.empty()) cfg.representation = carpetlab::representation_from(opts.rep);
    if (opts.nx > 0) cfg.nx = opts.nx;
    if (opts.nt > 0) cfg.nt = opts.nt;
    if (opts.tol > 0.0) cfg.tol = opts.tol;
    cfg.validate();
    return cfg;
}

int run_carpet(const CommonOpts& opts) {
    const carpetlab::RunConfig cfg = load(opts);
    const carpetlab::CarpetGrid grid = carpetlab::compute_carpet(cfg);
    std::filesystem::create_directories(opts.out_dir);
    const std::string stem = opts.out_dir + "/" + cfg.basename;
    carpetlab::export_pgm(grid, stem + ".pgm");
    carpetlab::export_csv(grid, stem + ".csv");
    carpetlab::export_meta(grid, cfg, stem + ".meta.json");
    std::cout << "wrote " << stem << ".{pgm,csv,meta.json}  rep=" << to_string(grid.representation)
              << " m_max=" << grid.m_max_used << " residual=" << grid.truncation_residual
              << "\n";
    if (!grid.extrapolated_rows.empty())
        std::cout << "note: " << grid.extrapolated_rows.size()
                  << " revival rows outside the dt validity window (tagged extrapolated)\n";
    return exit_ok;
}

int run_check(const CommonOpts& opts, const std::vector<std::string>& rep_names) {
    carpetlab::RunConfig cfg = load(opts);
    std::vector<carpetlab::Representation> reps;
    for (const auto& name : rep_names) reps.push_back(carpetlab::representation_from(name));
    const carpetlab::CrossCheckReport report = carpetlab::cross_check(cfg, reps);
    for (const auto& e : report.pairs)
        std::printf("%-10s vs %-10s  max|diff| = %.3e  rms = %.3e  [%s]\n",
                    to_string(e.a).c_str(), to_string(e.b).c_str(), e.max_diff, e.rms_diff,
                    e.passed ? "pass" : "FAIL");
    std::printf("reference max W = %.6g, tolerance = %.1e (relative)\n", report.reference_max,
                report.tol);
    return report.passed() ? exit_ok : exit_tolerance;
}

int run_coeffs(const CommonOpts& opts) {
    const carpetlab::RunConfig cfg = load(opts);
    const carpetlab::SpectralCoefficients coeffs = carpetlab::project_for(cfg);
    std::printf("m,re,im,abs2\n");
    for (int m = 1; m <= coeffs.m_max(); ++m) {
        const carpetlab::cplx c = coeffs.coefficient(m);
        std::printf("%d,%.17g,%.17g,%.17g\n", m, c.real(), c.imag(), std::norm(c));
    }
    std::fprintf(stderr, "m_max=%d residual=%.3e\n", coeffs.m_max(),
                 coeffs.truncation_residual());
    return exit_ok;
}

int run_gauss(long q, long r) {
    const carpetlab::FractionTime ft(q, r);
    std::printf("l,re,im,abs2\n");
    for (long l = 0; l < ft.denominator; ++l) {
        const carpetlab::cplx w = carpetlab::gauss_sum(ft, l);
        std::printf("%ld,%.17g,%.17g,%.17g\n", l, w.real(), w.imag(), std::norm(w));
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum carpets for a particle in a 1-D box"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::vector<std::string> check_reps;
    long gauss_q = 1, gauss_r = 1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config_path, "run configuration file");
        cmd->add_option("--rep", opts.rep, "representation (direct|four_term|worldline|revival)");
        cmd->add_option("--out", opts.out_dir, "output directory");
        cmd->add_option("--nx", opts.nx, "grid columns");
        cmd->add_option("--nt", opts.nt, "grid rows");
        cmd->add_option("--tol", opts.tol, "cross-check tolerance (relative to max W)");
    };

    CLI::App* carpet = app.add_subcommand("carpet", "compute a carpet and export PGM/CSV/meta");
    add_common(carpet);
    CLI::App* check = app.add_subcommand("check", "cross-check representations on one grid");
    add_common(check);
    check->add_option("--reps", check_reps, "representations to compare (two or more)")
        ->delimiter(',');
    CLI::App* coeffs = app.add_subcommand("coeffs", "dump spectral coefficients as CSV");
    add_common(coeffs);
    CLI::App* gauss = app.add_subcommand("gauss", "dump the Gauss-sum table W_l^(r)");
    gauss->add_option("--q", gauss_q, "fraction numerator");
    gauss->add_option("--r", gauss_r, "fraction denominator")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (carpet->parsed()) return run_carpet(opts);
        if (check->parsed()) {
            if (check_reps.empty())
                check_reps = {"direct", opts.rep.empty() ? "worldline" : opts.rep};
            return run_check(opts, check_reps);
        }
        if (coeffs->parsed()) return run_coeffs(opts);
        if (gauss->parsed()) return run_gauss(gauss_q, gauss_r);
    } catch (const carpetlab::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const carpetlab::truncation_error& e) {
        std::cerr << "truncation error: " << e.what() << "\n";
        return exit_tolerance;
    } catch (const carpetlab::budget_error& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return exit_tolerance;
    } catch (const carpetlab::quadrature_error& e) {
        std::cerr << "quadrature error: " << e.what() << "\n";
        return exit_tolerance;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    }
    return exit_ok;
}
