#include "seba/scatterer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace seba {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kWeightZero = 1e-18;
constexpr double kPoleMergeRel = 1e-10;
using cd = std::complex<double>;

// J(L)/w with J(L) = integral of sin^2(sqrt(w) x) over [0,L]; analytic in w
// through w = 0, series used where the direct formula cancels.
double j_over_w(double w, double L) {
    if (std::abs(w) * 4.0 * L * L < 0.25) {
        double sum = 0.0;
        double pw = 1.0;  // w^{m-1}
        double fact = 6.0;  // (2m+1)!
        double p2L = 8.0 * L * L * L;  // (2L)^{2m+1}
        double sgn = 1.0;
        for (int m = 1; m <= 30; ++m) {
            const double term = sgn * p2L * pw / (4.0 * fact);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
            sgn = -sgn;
            pw *= w;
            p2L *= 4.0 * L * L;
            fact *= (2.0 * m + 2.0) * (2.0 * m + 3.0);
        }
        return sum;
    }
    if (w > 0.0) {
        const double k = std::sqrt(w);
        return (0.5 * L - std::sin(2.0 * k * L) / (4.0 * k)) / w;
    }
    const double s = std::sqrt(-w);
    return (0.5 * L - std::sinh(2.0 * s * L) / (4.0 * s)) / w;
}

// integral over [0,x0] of G_{-s^2}(x,x0)^2 in the overflow-safe exponential form
double exp_side_mass(double s, double a, double near_len, double far_len) {
    // near_len is the length of the integration side, far_len the other side
    const double qa = 1.0 - std::exp(-2.0 * s * a);
    const double qf = 1.0 - std::exp(-2.0 * s * far_len);
    const double bracket = (1.0 - std::exp(-4.0 * s * near_len)) / (8.0 * s) -
                           0.5 * near_len * std::exp(-2.0 * s * near_len);
    return qf * qf / (s * s * qa * qa) * bracket;
}

}  // namespace

Geometry Geometry::unit_area(double E, double x0_frac, double y0_frac) {
    if (!(E > 0.0)) throw ParameterError("E must be positive");
    Geometry g;
    g.a = std::sqrt(E);
    g.b = 1.0 / std::sqrt(E);
    g.x0_frac = x0_frac;
    g.y0_frac = y0_frac;
    g.validate();
    return g;
}

Geometry Geometry::scaled(double r) const {
    if (!(r > 0.0)) throw ParameterError("scale factor must be positive");
    Geometry g = *this;
    g.a *= r;
    g.b *= r;
    return g;
}

void Geometry::validate() const {
    if (!(a > 0.0) || !(b > 0.0)) throw ParameterError("side lengths must be positive");
    if (!(x0_frac > 0.0) || !(x0_frac < 1.0)) throw ParameterError("x0_frac must lie in (0,1)");
    if (!(y0_frac > 0.0) || !(y0_frac < 1.0)) throw ParameterError("y0_frac must lie in (0,1)");
}

std::complex<double> green_diag(std::complex<double> w, double a, double x0) {
    const cd u = std::sqrt(w);  // principal branch, Im u >= 0 off the positive axis
    const double x1 = a - x0;
    if (std::abs(u) * a < 1e-7) return cd(x0 * x1 / a, 0.0);
    const cd i2u(0.0, 2.0);
    auto q = [&](double L) { return 1.0 - std::exp(i2u * u * L); };
    return cd(0.0, 1.0) / (2.0 * u) * q(x0) * q(x1) / q(a);
}

GreenBlockMass green_block_mass(double w, double a, double x0) {
    const double x1 = a - x0;
    GreenBlockMass out;
    if (w < 0.0) {
        const double s = std::sqrt(-w);
        if (s * a > 30.0 || (s * x0 > 0.2 && s * x1 > 0.2)) {
            out.left = exp_side_mass(s, a, x0, x1);
            out.right = exp_side_mass(s, a, x1, x0);
            return out;
        }
        const double rl = std::sinh(s * x1) / std::sinh(s * a);
        const double rr = std::sinh(s * x0) / std::sinh(s * a);
        out.left = rl * rl * j_over_w(w, x0);
        out.right = rr * rr * j_over_w(w, x1);
        return out;
    }
    if (w == 0.0) {
        out.left = (x1 / a) * (x1 / a) * x0 * x0 * x0 / 3.0;
        out.right = (x0 / a) * (x0 / a) * x1 * x1 * x1 / 3.0;
        return out;
    }
    const double k = std::sqrt(w);
    const double rl = std::sin(k * x1) / std::sin(k * a);
    const double rr = std::sin(k * x0) / std::sin(k * a);
    out.left = rl * rl * j_over_w(w, x0);
    out.right = rr * rr * j_over_w(w, x1);
    return out;
}

namespace {

struct BlockIter {
    const Geometry& geom;
    const TransverseBasis& basis;
    double nu = 0.0;
    double mu = 0.0;        // nu / b^2
    double wy = 0.0;        // |g(y0_frac)|^2
    double cw = 0.0;        // wy / ((a/2) b ||g||^2), the per-block weight scale
    int n2 = 0;

    BlockIter(const Geometry& g, const TransverseBasis& bs) : geom(g), basis(bs) {}

    void load(int idx) {
        n2 = idx;
        const TransverseMode& m = basis.mode(idx);
        nu = m.nu;
        mu = nu / (geom.b * geom.b);
        wy = basis.weight_at(idx, geom.y0_frac);
        cw = wy / (0.5 * geom.a * geom.b * m.norm_sq);
    }
};

// Lower bound for mu at transverse index n.
double mu_lower(int n, double b) {
    const double q = std::max(0, n - 2) * kPi / b;
    return q * q;
}

void guard_longitudinal_poles(double z, double mu, const Geometry& geom, double pole_guard) {
    const double w = z - mu;
    if (w <= 0.0) return;
    const double c1 = (kPi / geom.a) * (kPi / geom.a);
    const long m = std::lround(std::sqrt(w / c1));
    for (long mm = m - 1; mm <= m + 1; ++mm) {
        if (mm < 1) continue;
        const double lam = mu + c1 * static_cast<double>(mm) * static_cast<double>(mm);
        const double sx = std::sin(static_cast<double>(mm) * kPi * geom.x0_frac);
        // Modes vanishing at x0 contribute a removable zero, not a pole.
        if (sx * sx > 1e-14 && std::abs(z - lam) < pole_guard * std::max(1.0, lam))
            throw PoleProximityError("z within guard band of a weighted Laplacian eigenvalue");
    }
}

}  // namespace

double eval_F(double z, const Geometry& geom, const TransverseBasis& basis,
              const SeriesConfig& cfg) {
    geom.validate();
    const double a = geom.a, b = geom.b;
    const double x0 = geom.x0();
    const double d = std::min(x0, a - x0);
    double sum = 0.0;
    BlockIter blk(geom, basis);
    for (int n2 = 1;; ++n2) {
        if (n2 > cfg.max_terms)
            throw TruncationError("transverse block cap reached before the tail bound was met");
        // Can the analytic bound certify everything from this block on?
        if (n2 >= 4) {
            const double mu_lb = mu_lower(n2, b);
            if (mu_lb >= 2.0 * std::abs(z) + 2.0) {
                const double s_lb = std::sqrt(mu_lb - std::min(z, 0.5 * mu_lb));
                if (s_lb * d >= 2.0 && s_lb * a >= 2.0) {
                    const double N = static_cast<double>(n2 - 1);
                    const double power = (4.0 / b) * (std::sqrt(2.0) * std::abs(z) + 1.0) *
                                         std::pow(b / kPi, 3) / (2.0 * (N - 2.0) * (N - 2.0));
                    const double expo = (4.0 / b) * 16.0 / s_lb * std::exp(-2.0 * s_lb * d);
                    if (power + expo <= cfg.tail_tol) break;
                }
            }
        }
        blk.load(n2);
        if (blk.wy <= kWeightZero) continue;
        guard_longitudinal_poles(z, blk.mu, geom, cfg.pole_guard);
        const double gz = std::real(green_diag(cd(z - blk.mu, 0.0), a, x0));
        const double gi = std::real(green_diag(cd(-blk.mu, 1.0), a, x0));
        sum += blk.cw * 0.5 * a * (gz - gi);
    }
    return sum;
}

double scaling_beta(double r, const Geometry& geom, const TransverseBasis& basis,
                    const SeriesConfig& cfg) {
    geom.validate();
    if (!(r > 0.0)) throw ParameterError("r must be positive");
    const double a = geom.a, b = geom.b;
    const double x0 = geom.x0();
    const double d = std::min(x0, a - x0);
    const double r2 = r * r;
    double sum = 0.0;
    BlockIter blk(geom, basis);
    for (int n2 = 1;; ++n2) {
        if (n2 > cfg.max_terms)
            throw TruncationError("transverse block cap reached before the tail bound was met");
        if (n2 >= 4) {
            const double mu_lb = mu_lower(n2, b);
            if (mu_lb >= 2.0 * std::max(1.0, r2 * r2) + 2.0) {
                const double s_lb = std::sqrt(0.5 * mu_lb);
                if (s_lb * d >= 2.0 && s_lb * a >= 2.0) {
                    const double N = static_cast<double>(n2 - 1);
                    const double power = (4.0 / b) * (std::abs(r2 - 1.0) + 1.0) *
                                         std::pow(b / kPi, 3) / (2.0 * (N - 2.0) * (N - 2.0));
                    const double expo = (4.0 / b) * 16.0 / s_lb * std::exp(-2.0 * s_lb * d);
                    if (power + expo <= cfg.tail_tol) break;
                }
            }
        }
        blk.load(n2);
        if (blk.wy <= kWeightZero) continue;
        const double g1 = std::real(green_diag(cd(-blk.mu, 1.0), a, x0));
        const double gr = std::real(green_diag(cd(-blk.mu, r2), a, x0));
        sum += blk.cw * 0.5 * a * (g1 - gr);
    }
    return sum;
}

std::vector<WeightedPole> weighted_poles(const Geometry& geom, const TransverseBasis& basis,
                                         double z_max) {
    geom.validate();
    const double c1 = (kPi / geom.a) * (kPi / geom.a);
    if (!(z_max > c1 + basis.mode(1).nu / (geom.b * geom.b)))
        throw ParameterError("z_max must exceed the first Laplacian eigenvalue");

    struct Raw {
        double lambda;
        double weight;
    };
    std::vector<Raw> raw;
    for (int n2 = 1;; ++n2) {
        const TransverseMode& m = basis.mode(n2);
        const double mu = m.nu / (geom.b * geom.b);
        if (mu + c1 > z_max) break;  // nu is nondecreasing, so all later blocks exceed too
        const double wy = basis.weight_at(n2, geom.y0_frac);
        const double scale = 1.0 / (0.5 * geom.a * geom.b * m.norm_sq);
        for (int n1 = 1;; ++n1) {
            const double lam = c1 * n1 * n1 + mu;
            if (lam > z_max) break;
            const double sx = std::sin(n1 * kPi * geom.x0_frac);
            raw.push_back({lam, sx * sx * wy * scale});
        }
    }
    std::sort(raw.begin(), raw.end(), [](const Raw& u, const Raw& v) { return u.lambda < v.lambda; });

    std::vector<WeightedPole> out;
    for (std::size_t i = 0; i < raw.size();) {
        std::size_t j = i + 1;
        while (j < raw.size() &&
               raw[j].lambda - raw[i].lambda < kPoleMergeRel * std::max(1.0, raw[j].lambda))
            ++j;
        WeightedPole p;
        p.lambda = raw[i].lambda;
        for (std::size_t t = i; t < j; ++t) {
            p.total_weight += raw[t].weight;
            ++p.mu;
            if (raw[t].weight < kWeightZero) ++p.mu0;
        }
        p.merged = (j - i > 1) && (raw[j - 1].lambda != raw[i].lambda);
        out.push_back(p);
        i = j;
    }
    return out;
}

namespace {

// Bisection for F(z) = alpha on (lo, hi) where F increases from -inf to +inf.
// Endpoints are weighted poles and are never evaluated.
double bisect_F(double alpha, double lo, double hi, const Geometry& geom,
                const TransverseBasis& basis, const SeriesConfig& cfg) {
    double a = lo, b = hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        double fm;
        try {
            fm = eval_F(mid, geom, basis, cfg);
        } catch (const PoleProximityError&) {
            break;  // root pinned against a pole within the guard band
        }
        if (fm < alpha)
            a = mid;
        else
            b = mid;
        if (b - a < 1e-13 * std::max(1.0, std::abs(mid))) break;
    }
    return 0.5 * (a + b);
}

}  // namespace

std::vector<EigenpairPS> eigenvalues_for_alpha(double alpha, const Geometry& geom,
                                               const TransverseBasis& basis,
                                               std::pair<double, double> z_range,
                                               const SeriesConfig& cfg) {
    const double lo = z_range.first, hi = z_range.second;
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw ParameterError("z_range must be a finite nonempty interval");

    // Pole table reaching strictly beyond the range so the top root is bracketed.
    const double c1 = (kPi / geom.a) * (kPi / geom.a);
    double z_max = std::max(hi, basis.mode(1).nu / (geom.b * geom.b) + c1) + c1;
    std::vector<WeightedPole> poles;
    for (;;) {
        poles = weighted_poles(geom, basis, z_max);
        bool covered = false;
        for (const WeightedPole& p : poles)
            if (p.total_weight > kWeightZero && p.lambda > hi) covered = true;
        if (covered) break;
        z_max = z_max * 1.5 + 10.0;
    }

    std::vector<double> brackets;
    std::vector<EigenpairPS> out;
    for (const WeightedPole& p : poles) {
        if (p.total_weight > kWeightZero) brackets.push_back(p.lambda);
        if ((p.mu0 >= 1 || p.mu >= 2) && p.lambda >= lo && p.lambda <= hi) {
            EigenpairPS e;
            e.z = p.lambda;
            e.kind = EigKind::Unperturbed;
            e.multiplicity = (p.mu0 == p.mu) ? p.mu : p.mu - 1;
            out.push_back(e);
        }
    }

    // Interval below the first weighted pole: expanding bracket, floored at -1e6.
    if (lo < brackets.front()) {
        double blo = brackets.front() - 1.0;
        bool have = false;
        while (blo > -1e6) {
            if (eval_F(blo, geom, basis, cfg) <= alpha) {
                have = true;
                break;
            }
            blo = brackets.front() - 2.0 * (brackets.front() - blo);
        }
        if (have) {
            const double z = bisect_F(alpha, blo, brackets.front(), geom, basis, cfg);
            if (z >= lo && z <= hi) {
                EigenpairPS e;
                e.z = z;
                e.kind = EigKind::Perturbed;
                e.alpha = alpha;
                out.push_back(e);
            }
        }
    }
    for (std::size_t i = 0; i + 1 < brackets.size(); ++i) {
        if (brackets[i + 1] < lo || brackets[i] > hi) continue;
        const double z = bisect_F(alpha, brackets[i], brackets[i + 1], geom, basis, cfg);
        if (z >= lo && z <= hi) {
            EigenpairPS e;
            e.z = z;
            e.kind = EigKind::Perturbed;
            e.alpha = alpha;
            out.push_back(e);
        }
    }
    std::sort(out.begin(), out.end(),
              [](const EigenpairPS& u, const EigenpairPS& v) { return u.z < v.z; });
    return out;
}

AlphaLevel alpha_n(int n, const Geometry& geom, const TransverseBasis& basis,
                   const SeriesConfig& cfg) {
    if (n < 2) throw ParameterError("alpha_n requires n >= 2");
    geom.validate();
    const double nu1 = basis.mode(1).nu;
    const LimitSequence lim = limit_sequence(geom.x_interval(), n - 1);
    AlphaLevel out;
    out.z_target = nu1 / (geom.b * geom.b) + lim.merged[static_cast<std::size_t>(n - 2)].z;
    const std::vector<WeightedPole> poles =
        weighted_poles(geom, basis, out.z_target * 1.01 + 10.0);
    for (const WeightedPole& p : poles) {
        if (p.total_weight > kWeightZero &&
            std::abs(out.z_target - p.lambda) < cfg.pole_guard * std::max(1.0, p.lambda))
            throw DegeneracyError("target level collides with a weighted Laplacian eigenvalue");
    }
    out.alpha = eval_F(out.z_target, geom, basis, cfg);
    return out;
}

EigenpairPS synthesize_eigenfunction(double z, const Geometry& geom,
                                     const TransverseBasis& basis, const SeriesConfig& cfg) {
    geom.validate();
    const double a = geom.a, b = geom.b;
    const double c1 = (kPi / a) * (kPi / a);

    EigenpairPS out;
    out.z = z;
    out.kind = EigKind::Perturbed;

    double lambda_cut = std::max(4.0 * std::abs(z) + 10.0, z + 20.0 * c1);
    for (int attempt = 0;; ++attempt) {
        if (attempt > 40) throw TruncationError("eigenfunction cutoff grew without meeting the tolerance");
        out.coeffs.clear();
        double mass = 0.0;      // partial l^2 mass of the table
        double in_tail = 0.0;   // bound on dropped n1 terms inside kept blocks
        int last_n2 = 0;
        BlockIter blk(geom, basis);
        bool overflow = false;
        for (int n2 = 1;; ++n2) {
            blk.load(n2);
            if (blk.mu + c1 > lambda_cut) break;
            last_n2 = n2;
            if (blk.wy <= kWeightZero) continue;
            const cd gy = std::conj(basis.value(n2, geom.y0_frac));
            const double phin2 = 0.5 * a * b * basis.mode(n2).norm_sq;  // ||phi||^2
            int n1 = 1;
            for (;; ++n1) {
                const double lam = c1 * n1 * n1 + blk.mu;
                if (lam > lambda_cut) break;
                if (std::abs(lam - z) < cfg.pole_guard * std::max(1.0, lam)) {
                    const double sx0 = std::sin(n1 * kPi * geom.x0_frac);
                    if (sx0 * sx0 * blk.wy > kWeightZero)
                        throw PoleProximityError("z within guard band of a weighted pole");
                    continue;
                }
                const double sx = std::sin(n1 * kPi * geom.x0_frac);
                ModeCoeff mc;
                mc.n1 = n1;
                mc.n2 = n2;
                mc.lambda = lam;
                mc.c = sx * gy / (lam - z);
                out.coeffs.push_back(mc);
                mass += std::norm(mc.c) / phin2;
                if (static_cast<int>(out.coeffs.size()) > cfg.max_terms) {
                    overflow = true;
                    break;
                }
            }
            if (overflow) break;
            // dropped n1 > n1_max within this block, using lambda - z >= lambda_cut/2
            const double floor_gap = std::max(blk.mu - z, 0.0);
            const double t_a = 1.0 / (c1 * std::max(1, n1 - 1));
            const double t_b = floor_gap > 1.0 ? kPi / (2.0 * std::sqrt(c1 * floor_gap)) : t_a;
            in_tail += blk.cw * (2.0 / lambda_cut) * std::min(t_a, t_b);
        }
        if (overflow)
            throw TruncationError("coefficient table exceeded max_terms");

        // Whole blocks beyond the cutoff.
        double out_tail = std::numeric_limits<double>::infinity();
        const double mu_lb = mu_lower(last_n2 + 1, b);
        if (last_n2 >= 4 && mu_lb >= 2.0 * std::abs(z) + 2.0) {
            const double s_lb = std::sqrt(mu_lb - std::min(z, 0.5 * mu_lb));
            if (s_lb * a >= 1.0) {
                const double N = static_cast<double>(last_n2);
                out_tail = std::pow(2.0, 1.5) * b * b / (kPi * kPi * kPi * (N - 2.0) * (N - 2.0));
            }
        }
        if (mass > 0.0 && in_tail + out_tail <= cfg.tail_tol * mass) {
            out.tail_mass_sq = (in_tail + out_tail) / mass;
            out.norm_factor = 1.0 / std::sqrt(mass);
            break;
        }
        lambda_cut *= 2.0;
    }

    std::sort(out.coeffs.begin(), out.coeffs.end(), [](const ModeCoeff& u, const ModeCoeff& v) {
        if (u.lambda != v.lambda) return u.lambda < v.lambda;
        if (u.n1 != v.n1) return u.n1 < v.n1;
        return u.n2 < v.n2;
    });
    return out;
}

std::complex<double> EigenpairPS::value(double x, double y, const Geometry& geom,
                                        const TransverseBasis& basis) const {
    cd sum(0.0, 0.0);
    int cur_n2 = -1;
    cd gval(0.0, 0.0);
    double phin2 = 1.0;
    for (const ModeCoeff& mc : coeffs) {
        if (mc.n2 != cur_n2) {
            cur_n2 = mc.n2;
            gval = basis.value(mc.n2, y / geom.b);
            phin2 = 0.5 * geom.a * geom.b * basis.mode(mc.n2).norm_sq;
        }
        sum += mc.c / phin2 * std::sin(mc.n1 * kPi * x / geom.a) * gval;
    }
    return norm_factor * sum;
}

}  // namespace seba
