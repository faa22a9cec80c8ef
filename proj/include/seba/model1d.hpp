#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "seba/errors.hpp"

namespace seba {

// Interval [0,a] with a delta potential at x0, Dirichlet endpoints.
struct Interval1D {
    double a = 1.0;
    double x0 = 0.5;

    Interval1D() = default;
    Interval1D(double a_, double x0_);

    // True when x0/a is within 1e-8 of p/q with q <= 50. The spectral theory
    // assumes an irrational ratio; this is the floating-point stand-in.
    bool near_rational() const;
};

enum class Side { S1, S2 };

// One entry of the c -> +infinity limit set, tagged by which of the two
// subintervals produced it.
struct LimitEntry {
    double z = 0.0;
    Side side = Side::S1;
    int m = 0;  // index within its own set: z = (m pi / len)^2
    bool degenerate = false;  // within merge tolerance of an entry of the other set
};

struct LimitSequence {
    std::vector<double> s1;
    std::vector<double> s2;
    std::vector<LimitEntry> merged;  // sorted ascending, ties S1 before S2
};

struct Spectrum1D {
    double c = 0.0;  // +infinity allowed as a sentinel for the limit case
    std::vector<double> values;  // increasing, one root per inter-pole gap
    bool missing_ground_state = false;  // c >= 1/x0 + 1/(a-x0): no root below the first pole
    std::optional<double> negative_value;  // bound state, only when requested
};

struct Eigenfunction1D {
    double z = 0.0;
    Interval1D interval;
    double norm_constant = 0.0;  // N such that ||psi|| = 1
    double mass_left_sq = 0.0;   // ||psi||^2 on [0,x0]
    double mass_right_sq = 0.0;  // ||psi||^2 on [x0,a]

    double value(double x) const;

private:
    friend Eigenfunction1D eigenfunction_1d(double, const Interval1D&);
    friend Eigenfunction1D limit_eigenfunction_1d(const LimitEntry&, const Interval1D&);
    double k_ = 0.0;   // sqrt(z)
    double b1_ = 0.0;  // amplitude of sin(kx) on [0,x0]
    double b2_ = 0.0;  // amplitude of sin(k(a-x)) on [x0,a]
};

struct FourierCoeffs1D {
    std::vector<double> c;  // c[n-1] = sin(n pi x0/a)/((n pi/a)^2 - z)
    double M = 0.0;         // signed normalization, M^2 * sum c_n^2 * (a/2) = 1
    double tail_sq = 0.0;   // bound on the dropped sum of c_n^2
};

// sqrt(z)(cot(sqrt(z) x0) + cot(sqrt(z)(a-x0))). Strictly decreasing between
// poles; throws PoleProximityError inside the relative 1e-9 guard band.
double secular_lhs(double z, const Interval1D& interval);

// The unique coupling c with z in the spectrum of -Delta - c delta_{x0}.
double c_for_z(double z, const Interval1D& interval);

struct Eigenvalues1DOptions {
    double rel_tol = 1e-12;
    bool include_negative = false;  // append the bound state when c > 1/x0 + 1/(a-x0)
};

Spectrum1D eigenvalues_1d(double c, const Interval1D& interval, int count,
                          const Eigenvalues1DOptions& opts = {});

LimitSequence limit_sequence(const Interval1D& interval, int count);

// Normalized two-piece eigenfunction at eigenvalue z (c implied by c_for_z).
Eigenfunction1D eigenfunction_1d(double z, const Interval1D& interval);

// Pointwise limit eigenfunction for an entry of S1 or S2 (supported on one side).
Eigenfunction1D limit_eigenfunction_1d(const LimitEntry& entry, const Interval1D& interval);

FourierCoeffs1D fourier_coeffs_1d(double z, const Interval1D& interval, int n_max);

// (||psi|| on [0,x0], ||psi|| on [x0,a]) for the normalized eigenfunction at z.
std::pair<double, double> localization_ratio_1d(double z, const Interval1D& interval);

}  // namespace seba
