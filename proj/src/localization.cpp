#include "seba/localization.hpp"

#include <cmath>
#include <numbers>

namespace seba {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kWeightZero = 1e-18;
}  // namespace

double overlap_x(int m, int n, double x0, double a) {
    if (m < 1 || n < 1) throw ParameterError("mode indices must be >= 1");
    if (!(x0 > 0.0) || !(x0 <= a)) throw ParameterError("x0 must lie in (0,a]");
    if (m == n)
        return 0.5 * x0 - a * std::sin(2.0 * n * kPi * x0 / a) / (4.0 * n * kPi);
    const double dm = static_cast<double>(m - n);
    const double sm = static_cast<double>(m + n);
    return 0.5 * a *
           (std::sin(dm * kPi * x0 / a) / (dm * kPi) - std::sin(sm * kPi * x0 / a) / (sm * kPi));
}

double region_mass(const EigenpairPS& eig, const Geometry& geom, const TransverseBasis& basis,
                   Region region) {
    if (!(eig.norm_factor > 0.0))
        throw ParameterError("region_mass needs a normalized coefficient table");
    const double x0 = geom.x0();
    // Group by transverse index; cross-block terms vanish by orthogonality in y.
    double total = 0.0;
    std::vector<std::size_t> idx;
    std::vector<char> done(eig.coeffs.size(), 0);
    for (std::size_t i = 0; i < eig.coeffs.size(); ++i) {
        if (done[i]) continue;
        const int n2 = eig.coeffs[i].n2;
        idx.clear();
        for (std::size_t j = i; j < eig.coeffs.size(); ++j)
            if (!done[j] && eig.coeffs[j].n2 == n2) {
                idx.push_back(j);
                done[j] = 1;
            }
        const double gnorm = geom.b * basis.mode(n2).norm_sq;  // ||g(./b)||^2 over [0,b]
        const double phin2 = 0.5 * geom.a * gnorm;             // ||phi||^2
        double block = 0.0;
        for (std::size_t ii : idx)
            for (std::size_t jj : idx) {
                const double ov = overlap_x(eig.coeffs[ii].n1, eig.coeffs[jj].n1, x0, geom.a);
                block += std::real(std::conj(eig.coeffs[ii].c) * eig.coeffs[jj].c) * ov;
            }
        total += gnorm * block / (phin2 * phin2);
    }
    const double left = eig.norm_factor * eig.norm_factor * total;
    if (region == Region::LeftOfScatterer) return left;
    // Right mass of the same truncated sum: reuse the full-interval Gram (diagonal).
    double full = 0.0;
    for (const ModeCoeff& mc : eig.coeffs) {
        const double gnorm = geom.b * basis.mode(mc.n2).norm_sq;
        const double phin2 = 0.5 * geom.a * gnorm;
        full += gnorm * std::norm(mc.c) * (0.5 * geom.a) / (phin2 * phin2);
    }
    return eig.norm_factor * eig.norm_factor * full - left;
}

double region_mass_closed(double z, const Geometry& geom, const TransverseBasis& basis,
                          const SeriesConfig& cfg, Region region) {
    geom.validate();
    const double a = geom.a, b = geom.b;
    const double x0 = geom.x0();
    const double c1 = (kPi / a) * (kPi / a);
    double num_left = 0.0, den = 0.0;
    for (int n2 = 1;; ++n2) {
        if (n2 > cfg.max_terms)
            throw TruncationError("transverse block cap reached before the tail bound was met");
        if (n2 >= 4 && den > 0.0) {
            const double q = std::max(0, n2 - 2) * kPi / b;
            const double mu_lb = q * q;
            if (mu_lb >= 2.0 * std::abs(z) + 2.0) {
                const double s_lb = std::sqrt(mu_lb - std::min(z, 0.5 * mu_lb));
                if (s_lb * a >= 1.0) {
                    const double N = static_cast<double>(n2 - 1);
                    const double tail =
                        2.0 * std::sqrt(2.0) * b * b / (kPi * kPi * kPi * (N - 2.0) * (N - 2.0));
                    if (tail <= cfg.tail_tol * den) break;
                }
            }
        }
        const TransverseMode& m = basis.mode(n2);
        const double mu = m.nu / (b * b);
        const double wy = basis.weight_at(n2, geom.y0_frac);
        if (wy <= kWeightZero) continue;
        const double w = z - mu;
        if (w > 0.0) {
            const long mm = std::lround(std::sqrt(w / c1));
            for (long t = std::max(1L, mm - 1); t <= mm + 1; ++t) {
                const double lam = mu + c1 * static_cast<double>(t) * static_cast<double>(t);
                const double sx = std::sin(static_cast<double>(t) * kPi * geom.x0_frac);
                if (sx * sx > 1e-14 && std::abs(z - lam) < cfg.pole_guard * std::max(1.0, lam))
                    throw PoleProximityError("z within guard band of a weighted pole");
            }
        }
        const GreenBlockMass gm = green_block_mass(w, a, x0);
        const double P = wy / (b * m.norm_sq);
        num_left += P * gm.left;
        den += P * (gm.left + gm.right);
    }
    const double left = num_left / den;
    return region == Region::LeftOfScatterer ? left : 1.0 - left;
}

TheoremConstants theorem_constants(const Geometry& geom, const TransverseBasis& basis) {
    TheoremConstants c;
    const BoundaryCondition& bc = basis.bc();
    const double pi2 = kPi * kPi;
    switch (bc.kind) {
        case BcKind::Dirichlet:
            c.nu1 = pi2;
            c.nu_tilde = 4.0 * pi2;
            break;
        case BcKind::Neumann:
            c.nu1 = 0.0;
            c.nu_tilde = pi2;
            break;
        case BcKind::Periodic:
            c.nu1 = 0.0;
            c.nu_tilde = 4.0 * pi2;
            break;
        case BcKind::Floquet: {
            const double t = std::abs(bc.theta);
            c.nu1 = t * t;
            c.nu_tilde = (2.0 * kPi - t) * (2.0 * kPi - t);
            break;
        }
    }
    c.n_tilde = 2;
    c.C0 = pi2;  // sup nu_n/n^2 equals pi^2 for each of the four families
    const double E = geom.E();
    c.N_E = static_cast<int>(std::floor(std::sqrt((c.nu_tilde - c.nu1) * E * E / pi2 + 1.0)));
    return c;
}

double theoretical_bound(int n, double E, const TheoremConstants& consts) {
    const double rad = E * E * E * (consts.n_tilde * consts.n_tilde * consts.C0 - consts.nu1) -
                       E * kPi * kPi * (static_cast<double>(n) * n - 1.0);
    if (!(rad > 0.0)) throw ParameterError("level outside the admissible band for this E");
    return 1.0 / std::sqrt(rad);
}

LocalizationReport epsilon(int n, double E, BoundaryCondition bc, double x0_frac,
                           double y0_frac, const SeriesConfig& cfg) {
    TransverseBasis basis = build_basis(bc);
    const Geometry geom = Geometry::unit_area(E, x0_frac, y0_frac);
    const TheoremConstants consts = theorem_constants(geom, basis);
    if (n < consts.n_tilde || n > consts.N_E)
        throw ParameterError("level outside [n_tilde, N_E]");

    const LimitSequence lim = limit_sequence(geom.x_interval(), n - 1);
    const LimitEntry& entry = lim.merged[static_cast<std::size_t>(n - 2)];
    const AlphaLevel level = alpha_n(n, geom, basis, cfg);

    LocalizationReport rep;
    rep.n = n;
    rep.E = E;
    rep.alpha = level.alpha;
    rep.z = level.z_target;
    rep.side = entry.side;
    // Exact midpoint: both sides carry half the mass by mirror symmetry, and the
    // closed-form blocks sit on removable singularities, so use the symmetry.
    const double mass_left =
        std::abs(x0_frac - 0.5) < 1e-12
            ? 0.5
            : region_mass_closed(level.z_target, geom, basis, cfg, Region::LeftOfScatterer);
    rep.epsilon = entry.side == Side::S1 ? std::sqrt(std::max(0.0, 1.0 - mass_left))
                                         : std::sqrt(std::max(0.0, mass_left));
    rep.bound = theoretical_bound(n, E, consts);
    rep.symmetric_degenerate = std::abs(x0_frac - 0.5) < 1e-12 || entry.degenerate;
    rep.near_rational = geom.x_interval().near_rational();
    return rep;
}

RateFit rate_fit(const std::vector<std::pair<double, double>>& samples) {
    RateFit fit;
    std::vector<std::pair<double, double>> pts;
    for (const auto& [E, eps] : samples) {
        if (!(E > 0.0)) throw ParameterError("E must be positive");
        if (eps > 0.0)
            pts.emplace_back(std::log(E), std::log(eps));
        else
            ++fit.excluded;
    }
    if (pts.size() < 3) throw ParameterError("rate_fit needs at least 3 positive samples");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double npt = static_cast<double>(pts.size());
    const double denom = npt * sxx - sx * sx;
    fit.slope = (npt * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / npt;
    fit.used = static_cast<int>(pts.size());
    for (const auto& [x, y] : pts)
        fit.residual = std::max(fit.residual, std::abs(y - (fit.slope * x + fit.intercept)));
    return fit;
}

}  // namespace seba
