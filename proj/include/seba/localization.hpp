#pragma once

#include <vector>

#include "seba/scatterer.hpp"

namespace seba {

enum class Region { LeftOfScatterer, RightOfScatterer };  // Omega_1 = [0,x0] x [0,b]

struct TheoremConstants {
    double nu1 = 0.0;
    double nu_tilde = 0.0;  // smallest transverse eigenvalue above nu1
    int n_tilde = 2;
    double C0 = 0.0;        // sup over n of nu_n / n^2
    int N_E = 0;            // largest admissible level at this eccentricity
};

struct LocalizationReport {
    int n = 0;
    double E = 0.0;
    double alpha = 0.0;
    double z = 0.0;
    Side side = Side::S1;
    double epsilon = 0.0;  // L^2 mass on the side the eigenfunction avoids
    double bound = 0.0;
    bool symmetric_degenerate = false;  // x0 at the midpoint: no side is preferred
    bool near_rational = false;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // max abs residual of ln(eps) against the fit
    int used = 0;
    int excluded = 0;       // zero-epsilon samples dropped from the fit
};

// Closed-form integral of sin(m pi x/a) sin(n pi x/a) over [0,x0].
double overlap_x(int m, int n, double x0, double a);

// L^2 mass of a truncated normalized coefficient table on one region,
// via transverse orthogonality and the longitudinal Gram matrix.
double region_mass(const EigenpairPS& eig, const Geometry& geom, const TransverseBasis& basis,
                   Region region);

// Same quantity for the full (untruncated) series at eigenvalue z, using the
// closed-form per-block masses of the longitudinal Green function.
double region_mass_closed(double z, const Geometry& geom, const TransverseBasis& basis,
                          const SeriesConfig& cfg, Region region);

TheoremConstants theorem_constants(const Geometry& geom, const TransverseBasis& basis);

double theoretical_bound(int n, double E, const TheoremConstants& consts);

LocalizationReport epsilon(int n, double E, BoundaryCondition bc, double x0_frac,
                           double y0_frac, const SeriesConfig& cfg);

RateFit rate_fit(const std::vector<std::pair<double, double>>& samples);

}  // namespace seba
