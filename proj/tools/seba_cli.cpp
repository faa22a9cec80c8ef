#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seba/csv.hpp"
#include "seba/localization.hpp"
#include "seba/model1d.hpp"
#include "seba/scatterer.hpp"
#include "seba/transverse.hpp"

namespace {

constexpr double kPi = std::numbers::pi;

struct Options {
    std::string bc = "dirichlet";
    double theta = 0.0;
    std::vector<double> E_list;
    double x0_frac = 1.0 / kPi;
    double y0_frac = 0.5;
    double tail_tol = 1e-8;
    int max_terms = 400000;
    std::string out;
};

seba::BoundaryCondition parse_bc(const Options& o) {
    if (o.bc == "dirichlet") return seba::BoundaryCondition::dirichlet();
    if (o.bc == "neumann") return seba::BoundaryCondition::neumann();
    if (o.bc == "periodic") return seba::BoundaryCondition::periodic();
    if (o.bc == "floquet") return seba::BoundaryCondition::floquet(o.theta);
    throw seba::ParameterError("unknown boundary condition: " + o.bc);
}

seba::SeriesConfig series_cfg(const Options& o) {
    seba::SeriesConfig cfg;
    cfg.tail_tol = o.tail_tol;
    cfg.max_terms = o.max_terms;
    return cfg;
}

double single_E(const Options& o) { return o.E_list.empty() ? 10.0 * kPi : o.E_list.front(); }

std::vector<double> E_list_or_default(const Options& o) {
    if (!o.E_list.empty()) return o.E_list;
    return {2.0 * kPi, 4.0 * kPi, 6.0 * kPi, 8.0 * kPi, 10.0 * kPi};
}

void emit(const seba::CsvWriter& csv, const Options& o) {
    if (o.out.empty())
        std::fputs(csv.str().c_str(), stdout);
    else
        csv.write_file(o.out);
}

// Flat key=value config with optional [section] blocks; keys outside any
// section apply to every command, a [section] applies to that subcommand only.
void load_config(const std::string& path, const std::string& section, Options& o) {
    std::ifstream f(path);
    if (!f) throw seba::ParameterError("cannot read config file: " + path);
    std::string line, cur;
    std::map<std::string, std::string> kv;
    while (std::getline(f, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            cur = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw seba::ParameterError("malformed config line: " + line);
        if (cur.empty() || cur == section) kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    for (const auto& [k, v] : kv) {
        if (k == "bc") o.bc = v;
        else if (k == "theta") o.theta = std::stod(v);
        else if (k == "x0_frac") o.x0_frac = std::stod(v);
        else if (k == "y0_frac") o.y0_frac = std::stod(v);
        else if (k == "tail_tol") o.tail_tol = std::stod(v);
        else if (k == "max_terms") o.max_terms = std::stoi(v);
        else if (k == "out") o.out = v;
        else if (k == "E") {
            o.E_list.clear();
            std::stringstream ss(v);
            std::string tok;
            while (std::getline(ss, tok, ',')) o.E_list.push_back(std::stod(tok));
        } else {
            throw seba::ParameterError("unknown config key: " + k);
        }
    }
}

void run_spectrum(const Options& o, double alpha, int count) {
    seba::CsvWriter csv("spectrum-v1", {"index", "z", "kind", "multiplicity", "F"});
    if (count > 0) {
        const seba::TransverseBasis basis = seba::build_basis(parse_bc(o));
        const seba::Geometry geom = seba::Geometry::unit_area(single_E(o), o.x0_frac, o.y0_frac);
        const seba::SeriesConfig cfg = series_cfg(o);
        const double c1 = (kPi / geom.a) * (kPi / geom.a);
        double hi = basis.mode(1).nu / (geom.b * geom.b) + c1 * (count + 2.0) * (count + 2.0) + 10.0;
        std::vector<seba::EigenpairPS> eigs;
        for (;;) {
            eigs = seba::eigenvalues_for_alpha(alpha, geom, basis, {-1e6, hi}, cfg);
            if (static_cast<int>(eigs.size()) >= count) break;
            hi *= 2.0;
        }
        for (int i = 0; i < count; ++i) {
            const seba::EigenpairPS& e = eigs[static_cast<std::size_t>(i)];
            csv.add_row({std::to_string(i + 1), seba::fmt17(e.z),
                         e.kind == seba::EigKind::Perturbed ? "perturbed" : "unperturbed",
                         std::to_string(e.multiplicity),
                         e.kind == seba::EigKind::Perturbed ? seba::fmt17(e.alpha) : ""});
        }
    }
    emit(csv, o);
}

void run_alpha_for_z(const Options& o, double z) {
    const seba::TransverseBasis basis = seba::build_basis(parse_bc(o));
    const seba::Geometry geom = seba::Geometry::unit_area(single_E(o), o.x0_frac, o.y0_frac);
    const double alpha = seba::eval_F(z, geom, basis, series_cfg(o));
    seba::CsvWriter csv("alpha-for-z-v1", {"z", "alpha"});
    csv.add_row({seba::fmt17(z), seba::fmt17(alpha)});
    emit(csv, o);
}

void run_eigenfunction(const Options& o, double z, int grid) {
    const seba::TransverseBasis basis = seba::build_basis(parse_bc(o));
    const seba::Geometry geom = seba::Geometry::unit_area(single_E(o), o.x0_frac, o.y0_frac);
    const seba::EigenpairPS eig = seba::synthesize_eigenfunction(z, geom, basis, series_cfg(o));
    seba::CsvWriter csv("eigenfunction-v1", {"x", "y", "re", "im"});
    for (int i = 0; i <= grid; ++i) {
        const double x = geom.a * i / grid;
        for (int j = 0; j <= grid; ++j) {
            const double y = geom.b * j / grid;
            const std::complex<double> v = eig.value(x, y, geom, basis);
            csv.add_row({seba::fmt17(x), seba::fmt17(y), seba::fmt17(v.real()),
                         seba::fmt17(v.imag())});
        }
    }
    emit(csv, o);
}

void run_localization_sweep(const Options& o, int n_min, int n_max) {
    const seba::BoundaryCondition bc = parse_bc(o);
    const seba::SeriesConfig cfg = series_cfg(o);
    seba::CsvWriter csv("localization-sweep-v1",
                        {"E", "n", "status", "side", "alpha", "z", "epsilon", "bound", "flags"});
    int warnings = 0;
    for (double E : E_list_or_default(o)) {
        for (int n = n_min; n <= n_max; ++n) {
            std::fprintf(stderr, "sweep E=%g n=%d\n", E, n);
            try {
                const seba::LocalizationReport rep =
                    seba::epsilon(n, E, bc, o.x0_frac, o.y0_frac, cfg);
                std::string flags;
                if (rep.symmetric_degenerate) flags += "symmetric-degenerate;";
                if (rep.near_rational) flags += "near-rational;";
                csv.add_row({seba::fmt17(E), std::to_string(n), "ok",
                             rep.side == seba::Side::S1 ? "S1" : "S2", seba::fmt17(rep.alpha),
                             seba::fmt17(rep.z), seba::fmt17(rep.epsilon), seba::fmt17(rep.bound),
                             flags});
            } catch (const seba::ParameterError&) {
                ++warnings;
                csv.add_row({seba::fmt17(E), std::to_string(n), "out-of-range", "", "", "", "", "",
                             ""});
            }
        }
    }
    emit(csv, o);
    if (warnings) std::fprintf(stderr, "warning: %d out-of-range rows\n", warnings);
}

void run_rate_fit(const Options& o, const std::string& in_path) {
    std::ifstream f(in_path);
    if (!f) throw seba::ParameterError("cannot read sweep file: " + in_path);
    std::string line;
    std::map<int, std::vector<std::pair<double, double>>> by_n;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("E,", 0) == 0) continue;
        std::stringstream ss(line);
        std::vector<std::string> cells;
        std::string tok;
        while (std::getline(ss, tok, ',')) cells.push_back(tok);
        if (cells.size() < 8 || cells[2] != "ok") continue;
        by_n[std::stoi(cells[1])].emplace_back(std::stod(cells[0]), std::stod(cells[6]));
    }
    seba::CsvWriter csv("rate-fit-v1", {"n", "slope", "intercept", "residual", "used", "excluded"});
    for (const auto& [n, samples] : by_n) {
        if (samples.size() < 3) continue;
        const seba::RateFit fit = seba::rate_fit(samples);
        csv.add_row({std::to_string(n), seba::fmt17(fit.slope), seba::fmt17(fit.intercept),
                     seba::fmt17(fit.residual), std::to_string(fit.used),
                     std::to_string(fit.excluded)});
    }
    emit(csv, o);
}

void run_reproduce(const Options& opt_in, const std::string& figure) {
    Options o = opt_in;
    const seba::BoundaryCondition bc = parse_bc(o);

    if (figure == "fig3") {
        // coupling alpha_n against the level index
        const seba::TransverseBasis basis = seba::build_basis(bc);
        const seba::Geometry geom = seba::Geometry::unit_area(single_E(o), o.x0_frac, o.y0_frac);
        const seba::TheoremConstants tc = seba::theorem_constants(geom, basis);
        seba::CsvWriter csv("reproduce-fig3-v1", {"n", "alpha", "z"});
        for (int n = 2; n <= tc.N_E; ++n) {
            const seba::AlphaLevel lv = seba::alpha_n(n, geom, basis, series_cfg(o));
            csv.add_row({std::to_string(n), seba::fmt17(lv.alpha), seba::fmt17(lv.z_target)});
        }
        emit(csv, o);
        return;
    }
    if (figure == "fig4") {
        // left-side mass against z, with the limit-set markers tagged
        if (o.tail_tol == 1e-8) o.tail_tol = 1e-6;
        const seba::TransverseBasis basis = seba::build_basis(bc);
        const seba::Geometry geom = seba::Geometry::unit_area(single_E(o), o.x0_frac, o.y0_frac);
        const seba::SeriesConfig cfg = series_cfg(o);
        const double shift = basis.mode(1).nu / (geom.b * geom.b);
        const seba::LimitSequence lim = seba::limit_sequence(geom.x_interval(), 11);
        struct Pt {
            double z;
            std::string marker;
        };
        std::vector<Pt> pts;
        const double z_lo = shift + 0.5 * lim.merged.front().z;
        const double z_hi = shift + 1.02 * lim.merged[9].z;
        const int steps = 400;
        for (int i = 0; i <= steps; ++i)
            pts.push_back({z_lo + (z_hi - z_lo) * i / steps, ""});
        for (std::size_t n = 1; n < 10; ++n) {
            const seba::LimitEntry& e = lim.merged[n];
            pts.push_back({shift + e.z, e.side == seba::Side::S1 ? "S1" : "S2"});
        }
        std::stable_sort(pts.begin(), pts.end(),
                         [](const Pt& u, const Pt& v) { return u.z < v.z; });
        seba::CsvWriter csv("reproduce-fig4-v1", {"z", "mass_left", "marker"});
        for (const Pt& p : pts) {
            double mass;
            try {
                mass = seba::region_mass_closed(p.z, geom, basis, cfg,
                                                seba::Region::LeftOfScatterer);
            } catch (const seba::PoleProximityError&) {
                continue;  // grid point fell into a guard band
            }
            csv.add_row({seba::fmt17(p.z), seba::fmt17(mass), p.marker});
        }
        emit(csv, o);
        return;
    }
    if (figure == "fig5") {
        // eigenfunction field at the third level of alpha_3
        if (o.tail_tol == 1e-8) o.tail_tol = 1e-6;
        const seba::TransverseBasis basis = seba::build_basis(bc);
        const seba::Geometry geom = seba::Geometry::unit_area(single_E(o), o.x0_frac, o.y0_frac);
        const seba::AlphaLevel lv = seba::alpha_n(3, geom, basis, series_cfg(o));
        const seba::EigenpairPS eig =
            seba::synthesize_eigenfunction(lv.z_target, geom, basis, series_cfg(o));
        seba::CsvWriter csv("reproduce-fig5-v1", {"x", "y", "re", "im"});
        const int nx = 120, ny = 40;
        for (int i = 0; i <= nx; ++i) {
            const double x = geom.a * i / nx;
            for (int j = 0; j <= ny; ++j) {
                const double y = geom.b * j / ny;
                const std::complex<double> v = eig.value(x, y, geom, basis);
                csv.add_row({seba::fmt17(x), seba::fmt17(y), seba::fmt17(v.real()),
                             seba::fmt17(v.imag())});
            }
        }
        emit(csv, o);
        return;
    }
    if (figure == "fig6") {
        // localization-rate slopes over the standard scatterer positions
        const seba::SeriesConfig cfg = series_cfg(o);
        const std::vector<double> x0s = {0.3 / kPi, 0.7 / kPi, 1.1 / kPi, 1.5 / kPi};
        const std::vector<double> Es = E_list_or_default(o);
        seba::CsvWriter csv("reproduce-fig6-v1",
                            {"x0_frac", "n", "side", "k", "intercept", "residual"});
        for (double x0f : x0s) {
            const seba::Geometry g0 = seba::Geometry::unit_area(Es.front(), x0f, o.y0_frac);
            const seba::TransverseBasis basis = seba::build_basis(bc);
            const int n_cap = seba::theorem_constants(g0, basis).N_E;
            for (int n = 2; n <= n_cap; ++n) {
                std::fprintf(stderr, "fig6 x0_frac=%g n=%d\n", x0f, n);
                std::vector<std::pair<double, double>> samples;
                seba::Side side = seba::Side::S1;
                for (double E : Es) {
                    const seba::LocalizationReport rep =
                        seba::epsilon(n, E, bc, x0f, o.y0_frac, cfg);
                    samples.emplace_back(E, rep.epsilon);
                    side = rep.side;
                }
                const seba::RateFit fit = seba::rate_fit(samples);
                csv.add_row({seba::fmt17(x0f), std::to_string(n),
                             side == seba::Side::S1 ? "S1" : "S2", seba::fmt17(fit.slope),
                             seba::fmt17(fit.intercept), seba::fmt17(fit.residual)});
            }
        }
        emit(csv, o);
        return;
    }
    throw seba::ParameterError("unknown figure id: " + figure);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"point-scatterer spectra on thin rectangles"};
    app.require_subcommand(1);

    Options o;
    std::string config_path;
    double alpha = 0.0, zval = 0.0;
    int count = 10, grid = 64, n_min = 2, n_max = 2;
    std::string in_path, figure;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--bc", o.bc, "boundary condition: dirichlet|neumann|periodic|floquet");
        sub->add_option("--theta", o.theta, "Floquet angle in (-pi,pi)");
        sub->add_option("--E", o.E_list, "eccentricity (repeatable)");
        sub->add_option("--x0-frac", o.x0_frac, "scatterer x position as a fraction of a");
        sub->add_option("--y0-frac", o.y0_frac, "scatterer y position as a fraction of b");
        sub->add_option("--tail-tol", o.tail_tol, "series truncation tolerance");
        sub->add_option("--max-terms", o.max_terms, "series term cap");
        sub->add_option("--out", o.out, "output CSV path (default: stdout)");
        sub->add_option("--config", config_path, "key=value config file");
    };

    CLI::App* sp = app.add_subcommand("spectrum", "eigenvalues at a fixed coupling");
    sp->add_option("--alpha", alpha, "coupling")->required();
    sp->add_option("--count", count, "number of levels");
    add_common(sp);

    CLI::App* az = app.add_subcommand("alpha-for-z", "spectral function value at z");
    az->add_option("--z", zval, "query point")->required();
    add_common(az);

    CLI::App* ef = app.add_subcommand("eigenfunction", "synthesized eigenfunction on a grid");
    ef->add_option("--z", zval, "perturbed eigenvalue")->required();
    ef->add_option("--grid", grid, "grid points per axis");
    add_common(ef);

    CLI::App* ls = app.add_subcommand("localization-sweep", "epsilon over (n,E)");
    ls->add_option("--n-min", n_min, "first level");
    ls->add_option("--n-max", n_max, "last level");
    add_common(ls);

    CLI::App* rf = app.add_subcommand("rate-fit", "log-log slopes from a sweep CSV");
    rf->add_option("--in", in_path, "localization-sweep CSV")->required();
    add_common(rf);

    CLI::App* rp = app.add_subcommand("reproduce", "figure datasets");
    rp->add_option("figure", figure, "fig3|fig4|fig5|fig6")->required();
    add_common(rp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const std::string sub = app.get_subcommands().front()->get_name();
        if (!config_path.empty()) {
            // config first, then re-apply CLI flags so they win
            Options file_opts;
            load_config(config_path, sub, file_opts);
            Options cli_opts = o;
            o = file_opts;
            for (CLI::App* s : app.get_subcommands()) {
                auto touched = [&](const std::string& name) {
                    const CLI::Option* op = s->get_option_no_throw(name);
                    return op && op->count() > 0;
                };
                if (touched("--bc")) o.bc = cli_opts.bc;
                if (touched("--theta")) o.theta = cli_opts.theta;
                if (touched("--E")) o.E_list = cli_opts.E_list;
                if (touched("--x0-frac")) o.x0_frac = cli_opts.x0_frac;
                if (touched("--y0-frac")) o.y0_frac = cli_opts.y0_frac;
                if (touched("--tail-tol")) o.tail_tol = cli_opts.tail_tol;
                if (touched("--max-terms")) o.max_terms = cli_opts.max_terms;
                if (touched("--out")) o.out = cli_opts.out;
            }
        }
        if (sub == "spectrum") run_spectrum(o, alpha, count);
        else if (sub == "alpha-for-z") run_alpha_for_z(o, zval);
        else if (sub == "eigenfunction") run_eigenfunction(o, zval, grid);
        else if (sub == "localization-sweep") run_localization_sweep(o, n_min, n_max);
        else if (sub == "rate-fit") run_rate_fit(o, in_path);
        else if (sub == "reproduce") run_reproduce(o, figure);
    } catch (const seba::ParameterError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
    return 0;
}
