#ifndef CARPETLAB_CARPET_HPP
#define CARPETLAB_CARPET_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "box_basis.hpp"
#include "common.hpp"
#include "decomposition.hpp"
#include "revival.hpp"
#include "wavepacket.hpp"
#include "worldline.hpp"

#include <nlohmann/json.hpp>

namespace carpetlab {

enum class Representation { direct, four_term, worldline, revival };

inline std::string to_string(Representation rep) {
    switch (rep) {
        case Representation::direct: return "direct";
        case Representation::four_term: return "four_term";
        case Representation::worldline: return "worldline";
        case Representation::revival: return "revival";
    }
    return "direct";
}

inline Representation representation_from(const std::string& name) {
    if (name == "direct") return Representation::direct;
    if (name == "four_term") return Representation::four_term;
    if (name == "worldline") return Representation::worldline;
    if (name == "revival") return Representation::revival;
    throw config_error("unknown representation: " + name);
}

// Flat key/value run configuration; grammar is `section.key = value` lines
// with `#` comments.  Unknown keys are rejected.
struct RunConfig {
    BoxConfig box;
    GaussianPacket packet{0.5, 0.03, 10.0};
    std::string packet_csv;  // optional sampled packet (x, Re, Im per line)
    Representation representation{Representation::direct};
    int nx{256};
    int nt{256};
    double tau_min{0.0};
    double tau_max{1.0};
    int m_max{0};  // 0 = auto-select against eps_trunc
    double eps_trunc{1e-8};
    double tol{1e-5};  // cross-check tolerance, relative to max W
    int r_max{8};      // largest revival denominator
    int threads{0};    // 0 = hardware concurrency
    std::string basename{"carpet"};

    void validate() const {
        box.validate();
        if (packet_csv.empty()) packet.validate(box);
        if (nx < 2 || nt < 1) throw config_error("run.nx >= 2 and run.nt >= 1 required");
        if (!(tau_max >= tau_min)) throw config_error("run.tau_max must be >= run.tau_min");
        if (!(eps_trunc > 0.0) || !(tol > 0.0))
            throw config_error("run.eps_trunc and run.tol must be positive");
        if (r_max < 1) throw config_error("run.r_max must be >= 1");
    }
};

inline RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string{};
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto num = [&](const std::string& v) {
            try {
                std::size_t pos = 0;
                const double d = std::stod(v, &pos);
                if (pos != v.size()) throw std::invalid_argument(v);
                return d;
            } catch (const std::exception&) {
                throw config_error("config line " + std::to_string(lineno) +
                                   ": numeric value expected, got '" + v + "'");
            }
        };
        if (key == "box.L") cfg.box.length = num(value);
        else if (key == "box.M") cfg.box.mass = num(value);
        else if (key == "box.hbar") cfg.box.hbar = num(value);
        else if (key == "box.q") cfg.box.rel_q = num(value);
        else if (key == "packet.x0") cfg.packet.center = num(value);
        else if (key == "packet.dx") cfg.packet.width = num(value);
        else if (key == "packet.k") cfg.packet.mean_k = num(value);
        else if (key == "packet.csv") cfg.packet_csv = value;
        else if (key == "run.representation") cfg.representation = representation_from(value);
        else if (key == "run.nx") cfg.nx = static_cast<int>(num(value));
        else if (key == "run.nt") cfg.nt = static_cast<int>(num(value));
        else if (key == "run.tau_min") cfg.tau_min = num(value);
        else if (key == "run.tau_max") cfg.tau_max = num(value);
        else if (key == "run.m_max") cfg.m_max = static_cast<int>(num(value));
        else if (key == "run.eps_trunc") cfg.eps_trunc = num(value);
        else if (key == "run.tol") cfg.tol = num(value);
        else if (key == "run.r_max") cfg.r_max = static_cast<int>(num(value));
        else if (key == "run.threads") cfg.threads = static_cast<int>(num(value));
        else if (key == "output.basename") cfg.basename = value;
        else throw config_error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    return parse_config(in);
}

inline SampledWavefunction load_sampled_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open sampled packet CSV: " + path);
    SampledWavefunction w;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || !(std::isdigit(static_cast<unsigned char>(line[0])) ||
                              line[0] == '-' || line[0] == '+' || line[0] == '.'))
            continue;  // header or comment
        std::istringstream row(line);
        std::string cell;
        double vals[3] = {0.0, 0.0, 0.0};
        int k = 0;
        while (k < 3 && std::getline(row, cell, ',')) vals[k++] = std::stod(cell);
        if (k < 2) throw config_error("sampled CSV: need x,re[,im] per line");
        w.x.push_back(vals[0]);
        w.value.emplace_back(vals[1], vals[2]);
    }
    if (w.x.size() < 4) throw config_error("sampled CSV: too few samples");
    return w;
}

// Rectangular (u, tau) lattice of scaled density values, row = fixed tau.
struct CarpetGrid {
    int nx{0}, nt{0};
    double tau_min{0.0}, tau_max{1.0};
    std::vector<double> values;  // row-major, nt rows of nx
    Representation representation{Representation::direct};
    double truncation_residual{0.0};
    int m_max_used{0};
    std::vector<double> row_integrals;
    std::vector<int> extrapolated_rows;  // revival rows outside the dt validity window

    double u_at(int i) const { return static_cast<double>(i) / (nx - 1); }
    double tau_at(int j) const {
        return nt > 1 ? tau_min + (tau_max - tau_min) * static_cast<double>(j) / (nt - 1)
                      : tau_min;
    }
    double at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * static_cast<std::size_t>(nx) +
                      static_cast<std::size_t>(col)];
    }
    double max_value() const {
        return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
    }
};

// Nearest fraction q/r to tau with r <= r_max (smallest r wins ties).
inline FractionTime nearest_fraction(double tau, int r_max, const BoxConfig& cfg) {
    long best_q = 0, best_r = 1;
    double best_err = std::abs(tau);
    for (long r = 1; r <= r_max; ++r) {
        const long q = std::max(0L, std::lround(tau * static_cast<double>(r)));
        const double err = std::abs(tau - static_cast<double>(q) / static_cast<double>(r));
        if (err < best_err - 1e-15) {
            best_err = err;
            best_q = q;
            best_r = r;
        }
    }
    const double dt = (tau - static_cast<double>(best_q) / static_cast<double>(best_r)) *
                      cfg.revival_time();
    return FractionTime(best_q, best_r, dt);
}

namespace detail {

template <typename RowFn>
void parallel_rows(int nt, int threads, RowFn&& fn) {
    int n = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    n = std::clamp(n, 1, std::max(1, nt));
    if (n == 1) {
        for (int row = 0; row < nt; ++row) fn(row);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (int row = t; row < nt; row += n) fn(row);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

inline SpectralCoefficients project_for(const RunConfig& cfg) {
    if (!cfg.packet_csv.empty()) {
        const SampledWavefunction samples = load_sampled_csv(cfg.packet_csv);
        const int mmax = cfg.m_max > 0 ? cfg.m_max : 64;
        return project(samples, cfg.box, mmax, cfg.eps_trunc);
    }
    return project(cfg.packet, cfg.box, cfg.m_max, cfg.eps_trunc);
}

inline CarpetGrid compute_carpet(const RunConfig& cfg) {
    cfg.validate();
    const SpectralCoefficients coeffs = project_for(cfg);

    CarpetGrid grid;
    grid.nx = cfg.nx;
    grid.nt = cfg.nt;
    grid.tau_min = cfg.tau_min;
    grid.tau_max = cfg.tau_max;
    grid.representation = cfg.representation;
    grid.truncation_residual = coeffs.truncation_residual();
    grid.m_max_used = coeffs.m_max();
    grid.values.assign(static_cast<std::size_t>(cfg.nx) * static_cast<std::size_t>(cfg.nt), 0.0);
    grid.row_integrals.assign(static_cast<std::size_t>(cfg.nt), 0.0);

    std::optional<WorldlineBudget> budget;
    if (cfg.representation == Representation::worldline)
        budget = make_budget(coeffs, cfg.tol * 0.1);

    std::vector<int> extrapolated(static_cast<std::size_t>(cfg.nt), 0);
    detail::parallel_rows(cfg.nt, cfg.threads, [&](int row) {
        const double tau = grid.tau_at(row);
        double* out = grid.values.data() +
                      static_cast<std::size_t>(row) * static_cast<std::size_t>(cfg.nx);
        switch (cfg.representation) {
            case Representation::direct:
                for (int i = 0; i < cfg.nx; ++i)
                    out[i] = density_direct(coeffs, cfg.box, grid.u_at(i), tau);
                break;
            case Representation::four_term:
                for (int i = 0; i < cfg.nx; ++i)
                    out[i] = four_terms(coeffs, cfg.box, grid.u_at(i), tau).sum().real();
                break;
            case Representation::worldline:
                for (int i = 0; i < cfg.nx; ++i)
                    out[i] = cfg.box.rel_q == 0.0
                                 ? density_worldline(coeffs, cfg.box, *budget, grid.u_at(i), tau)
                                 : density_worldline_relativistic(coeffs, cfg.box, *budget,
                                                                  grid.u_at(i), tau);
                break;
            case Representation::revival: {
                if (!cfg.packet_csv.empty())
                    throw config_error("revival representation requires a Gaussian packet");
                const FractionTime ft = nearest_fraction(tau, cfg.r_max, cfg.box);
                if (!ft.within_validity(cfg.box)) extrapolated[static_cast<std::size_t>(row)] = 1;
                for (int i = 0; i < cfg.nx; ++i) {
                    const cplx psi =
                        psi_revival(cfg.packet, cfg.box, ft, cfg.box.length * grid.u_at(i));
                    out[i] = cfg.box.length * std::norm(psi);
                }
                break;
            }
        }
        // Trapezoid row integral over u in [0, 1].
        double integral = 0.5 * (out[0] + out[cfg.nx - 1]);
        for (int i = 1; i < cfg.nx - 1; ++i) integral += out[i];
        grid.row_integrals[static_cast<std::size_t>(row)] = integral / (cfg.nx - 1);
    });
    for (int row = 0; row < cfg.nt; ++row)
        if (extrapolated[static_cast<std::size_t>(row)]) grid.extrapolated_rows.push_back(row);
    return grid;
}

struct CrossCheckEntry {
    Representation a, b;
    double max_diff{0.0};
    double rms_diff{0.0};
    bool passed{false};
};

struct CrossCheckReport {
    std::vector<CrossCheckEntry> pairs;
    double reference_max{0.0};
    double tol{0.0};

    bool passed() const {
        return std::all_of(pairs.begin(), pairs.end(),
                           [](const CrossCheckEntry& e) { return e.passed; });
    }
};

// Pairwise grid comparison across representations; pass iff the max-norm
// difference stays below tol * max W.
inline CrossCheckReport cross_check(const RunConfig& base,
                                    const std::vector<Representation>& reps) {
    if (reps.size() < 2) throw config_error("cross_check: at least two representations required");
    std::vector<CarpetGrid> grids;
    grids.reserve(reps.size());
    for (Representation rep : reps) {
        RunConfig cfg = base;
        cfg.representation = rep;
        grids.push_back(compute_carpet(cfg));
    }
    CrossCheckReport report;
    report.tol = base.tol;
    for (const auto& g : grids) report.reference_max = std::max(report.reference_max, g.max_value());
    for (std::size_t a = 0; a < grids.size(); ++a)
        for (std::size_t b = a + 1; b < grids.size(); ++b) {
            CrossCheckEntry entry;
            entry.a = reps[a];
            entry.b = reps[b];
            double sq = 0.0;
            for (std::size_t i = 0; i < grids[a].values.size(); ++i) {
                const double d = std::abs(grids[a].values[i] - grids[b].values[i]);
                entry.max_diff = std::max(entry.max_diff, d);
                sq += d * d;
            }
            entry.rms_diff = std::sqrt(sq / static_cast<double>(grids[a].values.size()));
            entry.passed = entry.max_diff < base.tol * report.reference_max;
            report.pairs.push_back(entry);
        }
    return report;
}

// Binary 16-bit PGM, maxval 65535, pixel = round(65535 (1 - W/Wmax)):
// high probability maps to dark, top row = tau_min.
inline void export_pgm(const CarpetGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "P5\n" << grid.nx << " " << grid.nt << "\n65535\n";
    const double wmax = grid.max_value();
    for (int row = 0; row < grid.nt; ++row) {
        for (int col = 0; col < grid.nx; ++col) {
            const double w = std::clamp(grid.at(row, col), 0.0, wmax);
            const auto pixel = static_cast<std::uint16_t>(
                std::lround(65535.0 * (wmax > 0.0 ? 1.0 - w / wmax : 1.0)));
            const unsigned char bytes[2] = {static_cast<unsigned char>(pixel >> 8),
                                            static_cast<unsigned char>(pixel & 0xff)};
            out.write(reinterpret_cast<const char*>(bytes), 2);
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

// CSV rows "u,tau,W" at 17 significant digits, row-major from tau_min.
inline void export_csv(const CarpetGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "u,tau,W\n";
    char buf[96];
    for (int row = 0; row < grid.nt; ++row) {
        const double tau = grid.tau_at(row);
        for (int col = 0; col < grid.nx; ++col) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid.u_at(col), tau,
                          grid.at(row, col));
            out << buf;
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

// Full provenance echo as a JSON sidecar.
inline void export_meta(const CarpetGrid& grid, const RunConfig& cfg, const std::string& path) {
    nlohmann::json meta;
    meta["library_version"] = version;
    meta["representation"] = to_string(grid.representation);
    meta["box"] = {{"L", cfg.box.length},
                   {"M", cfg.box.mass},
                   {"hbar", cfg.box.hbar},
                   {"q", cfg.box.rel_q},
                   {"revival_time", cfg.box.revival_time()}};
    meta["packet"] = {{"x0", cfg.packet.center},
                      {"dx", cfg.packet.width},
                      {"k", cfg.packet.mean_k},
                      {"csv", cfg.packet_csv},
                      {"width_convention", "dx is the position standard deviation"}};
    meta["grid"] = {{"nx", grid.nx},
                    {"nt", grid.nt},
                    {"u_range", {0.0, 1.0}},
                    {"tau_range", {grid.tau_min, grid.tau_max}}};
    meta["truncation"] = {{"m_max", grid.m_max_used},
                          {"residual", grid.truncation_residual},
                          {"eps_trunc", cfg.eps_trunc}};
    meta["tolerance"] = cfg.tol;
    meta["row_integrals"] = grid.row_integrals;
    meta["extrapolated_rows"] = grid.extrapolated_rows;
    meta["color_convention"] = "PGM pixel = round(65535*(1 - W/Wmax)); dark = high probability";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << meta.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace carpetlab

#endif
