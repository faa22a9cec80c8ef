#include "seba/model1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace seba {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPoleGuardRel = 1e-9;
constexpr double kDegenerateRel = 1e-9;

double cot(double u) { return std::cos(u) / std::sin(u); }

// coth(t) for t > 0 without overflow.
double coth(double t) {
    const double e = std::exp(-2.0 * t);
    return (1.0 + e) / (1.0 - e);
}

// k cot(kL) evaluated as k/tan(kL); well behaved as k -> 0.
double kcot(double k, double L) { return k * cot(k * L); }

double raw_secular(double z, const Interval1D& iv) {
    const double k = std::sqrt(z);
    return kcot(k, iv.x0) + kcot(k, iv.a - iv.x0);
}

// z -> 0+ limit of the secular function.
double zero_limit(const Interval1D& iv) { return 1.0 / iv.x0 + 1.0 / (iv.a - iv.x0); }

void check_pole_guard(double z, const Interval1D& iv) {
    const double k = std::sqrt(z);
    for (double L : {iv.x0, iv.a - iv.x0}) {
        const long m = std::lround(k * L / kPi);
        if (m < 1) continue;
        const double p = (m * kPi / L) * (m * kPi / L);
        if (std::abs(z - p) < kPoleGuardRel * p)
            throw PoleProximityError("z within guard band of a limit-set pole");
    }
}

// Root of raw_secular(z) = c on (lo, hi) where the function decreases from
// +inf (or zero_limit when lo = 0) to -inf. Endpoints are never evaluated.
double bisect_root(double c, double lo, double hi, const Interval1D& iv, double rel_tol) {
    double a = lo, b = hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        if (raw_secular(mid, iv) > c)
            a = mid;
        else
            b = mid;
        if (b - a < rel_tol * std::max(1.0, mid)) break;
    }
    return 0.5 * (a + b);
}

}  // namespace

Interval1D::Interval1D(double a_, double x0_) : a(a_), x0(x0_) {
    if (!(a > 0.0) || !(x0 > 0.0) || !(x0 < a))
        throw ParameterError("Interval1D requires 0 < x0 < a");
}

bool Interval1D::near_rational() const {
    const double r = x0 / a;
    for (int q = 2; q <= 50; ++q) {
        const int p = static_cast<int>(std::lround(r * q));
        if (p < 1 || p >= q) continue;
        if (std::abs(r - static_cast<double>(p) / q) < 1e-8) return true;
    }
    return false;
}

double secular_lhs(double z, const Interval1D& interval) {
    if (!(z > 0.0)) throw ParameterError("secular_lhs requires z > 0");
    check_pole_guard(z, interval);
    return raw_secular(z, interval);
}

double c_for_z(double z, const Interval1D& interval) { return secular_lhs(z, interval); }

LimitSequence limit_sequence(const Interval1D& interval, int count) {
    if (count < 1) throw ParameterError("count must be >= 1");
    LimitSequence out;
    const double x1 = interval.a - interval.x0;
    for (int m = 1; m <= count + 1; ++m) {
        const double k1 = m * kPi / interval.x0;
        const double k2 = m * kPi / x1;
        out.s1.push_back(k1 * k1);
        out.s2.push_back(k2 * k2);
    }
    std::vector<LimitEntry> merged;
    for (int m = 1; m <= count + 1; ++m) {
        merged.push_back({out.s1[static_cast<std::size_t>(m - 1)], Side::S1, m, false});
        merged.push_back({out.s2[static_cast<std::size_t>(m - 1)], Side::S2, m, false});
    }
    std::stable_sort(merged.begin(), merged.end(), [](const LimitEntry& u, const LimitEntry& v) {
        if (u.z != v.z) return u.z < v.z;
        return u.side == Side::S1 && v.side == Side::S2;
    });
    for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
        if (merged[i + 1].z - merged[i].z < kDegenerateRel * merged[i + 1].z) {
            merged[i].degenerate = true;
            merged[i + 1].degenerate = true;
        }
    }
    merged.resize(static_cast<std::size_t>(count));
    out.merged = std::move(merged);
    out.s1.resize(static_cast<std::size_t>(count));
    out.s2.resize(static_cast<std::size_t>(count));
    return out;
}

Spectrum1D eigenvalues_1d(double c, const Interval1D& interval, int count,
                          const Eigenvalues1DOptions& opts) {
    if (count < 1) throw ParameterError("count must be >= 1");
    Spectrum1D out;
    out.c = c;

    if (std::isinf(c) && c > 0.0) {
        const LimitSequence lim = limit_sequence(interval, count);
        for (const LimitEntry& e : lim.merged) out.values.push_back(e.z);
        out.missing_ground_state = true;
        return out;
    }
    if (std::isnan(c) || std::isinf(c)) throw ParameterError("c must be finite or +inf");

    const double L0 = zero_limit(interval);
    out.missing_ground_state = (c >= L0);

    // Distinct pole values; degenerate pairs collapse to a single gap boundary,
    // so keep extending the table until enough distinct gaps are available.
    std::vector<double> poles;
    for (int need = count + 2; static_cast<int>(poles.size()) < count + 2; need *= 2) {
        const LimitSequence lim = limit_sequence(interval, need);
        poles.clear();
        for (const LimitEntry& e : lim.merged) {
            if (poles.empty() || e.z - poles.back() >= kDegenerateRel * e.z) poles.push_back(e.z);
        }
    }

    double lo = 0.0;
    std::size_t pi = 0;
    bool first = true;
    while (static_cast<int>(out.values.size()) < count) {
        if (pi >= poles.size())
            throw NumericalError("exhausted precomputed pole table during root search");
        const double hi = poles[pi++];
        const bool skip = first && out.missing_ground_state;
        first = false;
        if (!skip) out.values.push_back(bisect_root(c, lo, hi, interval, opts.rel_tol));
        lo = hi;
    }

    if (opts.include_negative && c > L0) {
        const double x1 = interval.a - interval.x0;
        // s(coth(s x0) + coth(s x1)) = c has a unique root; the function
        // increases from L0 at s=0 and behaves like 2s at large s.
        double slo = 0.0, shi = std::max(c, 1.0);
        while (shi * (coth(shi * interval.x0) + coth(shi * x1)) < c) shi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (slo + shi);
            if (mid <= slo || mid >= shi) break;
            if (mid * (coth(mid * interval.x0) + coth(mid * x1)) < c)
                slo = mid;
            else
                shi = mid;
        }
        const double s = 0.5 * (slo + shi);
        out.negative_value = -s * s;
    }
    return out;
}

double Eigenfunction1D::value(double x) const {
    if (x <= interval.x0) return norm_constant * b1_ * std::sin(k_ * x);
    return norm_constant * b2_ * std::sin(k_ * (interval.a - x));
}

namespace {
// integral of sin^2(k u) over [0, L]
double sin_sq_integral(double k, double L) { return 0.5 * L - std::sin(2.0 * k * L) / (4.0 * k); }
}  // namespace

Eigenfunction1D eigenfunction_1d(double z, const Interval1D& interval) {
    if (!(z > 0.0)) throw ParameterError("eigenfunction_1d requires z > 0");
    check_pole_guard(z, interval);
    Eigenfunction1D f;
    f.z = z;
    f.interval = interval;
    const double k = std::sqrt(z);
    const double x1 = interval.a - interval.x0;
    f.k_ = k;
    f.b1_ = std::sin(k * x1);
    f.b2_ = std::sin(k * interval.x0);
    const double i1 = f.b1_ * f.b1_ * sin_sq_integral(k, interval.x0);
    const double i2 = f.b2_ * f.b2_ * sin_sq_integral(k, x1);
    f.norm_constant = 1.0 / std::sqrt(i1 + i2);
    f.mass_left_sq = i1 / (i1 + i2);
    f.mass_right_sq = i2 / (i1 + i2);
    return f;
}

Eigenfunction1D limit_eigenfunction_1d(const LimitEntry& entry, const Interval1D& interval) {
    Eigenfunction1D f;
    f.z = entry.z;
    f.interval = interval;
    f.k_ = std::sqrt(entry.z);
    const double x1 = interval.a - interval.x0;
    if (entry.side == Side::S1) {
        f.b1_ = 1.0;
        f.b2_ = 0.0;
        f.norm_constant = std::sqrt(2.0 / interval.x0);
        f.mass_left_sq = 1.0;
        f.mass_right_sq = 0.0;
    } else {
        f.b1_ = 0.0;
        f.b2_ = 1.0;
        f.norm_constant = std::sqrt(2.0 / x1);
        f.mass_left_sq = 0.0;
        f.mass_right_sq = 1.0;
    }
    return f;
}

FourierCoeffs1D fourier_coeffs_1d(double z, const Interval1D& interval, int n_max) {
    if (n_max < 1) throw ParameterError("n_max must be >= 1");
    if (!(z > 0.0)) throw ParameterError("fourier_coeffs_1d requires z > 0");
    check_pole_guard(z, interval);
    const double a = interval.a;
    const double kn_top = n_max * kPi / a;
    if (kn_top * kn_top < 2.0 * z)
        throw TruncationError("n_max too small for the analytic Fourier tail bound");

    FourierCoeffs1D out;
    out.c.reserve(static_cast<std::size_t>(n_max));
    double sum_sq = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        const double lam = (n * kPi / a) * (n * kPi / a);
        if (std::abs(lam - z) < kPoleGuardRel * lam)
            throw PoleProximityError("z within guard band of a Dirichlet eigenvalue");
        const double cn = std::sin(n * kPi * interval.x0 / a) / (lam - z);
        out.c.push_back(cn);
        sum_sq += cn * cn;
    }
    // For (n pi/a)^2 >= 2z each term is at most 4 (a/(n pi))^4.
    const double r = a / kPi;
    out.tail_sq = 4.0 * r * r * r * r / (3.0 * std::pow(static_cast<double>(n_max), 3));
    const double k = std::sqrt(z);
    const double sign = std::sin(k * a) >= 0.0 ? 1.0 : -1.0;
    out.M = sign / std::sqrt(0.5 * a * sum_sq);
    return out;
}

std::pair<double, double> localization_ratio_1d(double z, const Interval1D& interval) {
    const Eigenfunction1D f = eigenfunction_1d(z, interval);
    return {std::sqrt(f.mass_left_sq), std::sqrt(f.mass_right_sq)};
}

}  // namespace seba
