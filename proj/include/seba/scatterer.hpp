#pragma once

#include <complex>
#include <vector>

#include "seba/errors.hpp"
#include "seba/model1d.hpp"
#include "seba/transverse.hpp"

namespace seba {

// Rectangle [0,a] x [0,b] with the scatterer at (x0_frac*a, y0_frac*b).
// The standard construction is area-normalized: a = sqrt(E), b = 1/sqrt(E).
struct Geometry {
    double a = 1.0;
    double b = 1.0;
    double x0_frac = 0.5;
    double y0_frac = 0.5;

    static Geometry unit_area(double E, double x0_frac, double y0_frac = 0.5);
    Geometry scaled(double r) const;  // same shape, side lengths multiplied by r

    double E() const { return a / b; }
    double x0() const { return x0_frac * a; }
    double y0() const { return y0_frac * b; }
    Interval1D x_interval() const { return Interval1D(a, x0()); }
    void validate() const;
};

struct SeriesConfig {
    double tail_tol = 1e-8;   // absolute truncation tolerance for series sums
    int max_terms = 400000;   // cap on transverse blocks / stored coefficients
    double pole_guard = 1e-9; // relative guard band around weighted poles
};

// One distinct Laplacian eigenvalue with the data driving the perturbed /
// unperturbed classification.
struct WeightedPole {
    double lambda = 0.0;
    double total_weight = 0.0;  // sum of |phi(x0,y0)|^2 / ||phi||^2 over modes at lambda
    int mu = 0;                 // multiplicity
    int mu0 = 0;                // modes vanishing at the scatterer
    bool merged = false;        // distinct lattice points collapsed within tolerance
};

enum class EigKind { Perturbed, Unperturbed };

// One series coefficient of a perturbed eigenfunction, before normalization:
// c = conj(phi_{n1,n2}(x0,y0)) / (lambda - z) with phi unnormalized.
struct ModeCoeff {
    int n1 = 0;
    int n2 = 0;  // rearranged transverse index
    double lambda = 0.0;
    std::complex<double> c;
};

struct EigenpairPS {
    double z = 0.0;
    EigKind kind = EigKind::Perturbed;
    double alpha = 0.0;        // perturbed only
    int multiplicity = 1;
    std::vector<ModeCoeff> coeffs;  // perturbed only, sorted by (lambda, n1, n2)
    double norm_factor = 0.0;       // M with psi = M sum c phi/||phi||^2, ||psi|| = 1
    double tail_mass_sq = 0.0;      // bound on the dropped l^2 mass of the table

    // Normalized partial-sum value; needs the basis the table was built from.
    std::complex<double> value(double x, double y, const Geometry& geom,
                               const TransverseBasis& basis) const;
};

// Spectral function F(z) = sum w_n (1/(lambda_n - z) - lambda_n/(lambda_n^2+1))
// over L^2-normalized weights, evaluated blockwise per transverse mode with a
// closed-form longitudinal sum and an analytic transverse tail bound.
double eval_F(double z, const Geometry& geom, const TransverseBasis& basis,
              const SeriesConfig& cfg);

inline double alpha_for_z(double z, const Geometry& geom, const TransverseBasis& basis,
                          const SeriesConfig& cfg) {
    return eval_F(z, geom, basis, cfg);
}

std::vector<WeightedPole> weighted_poles(const Geometry& geom, const TransverseBasis& basis,
                                         double z_max);

std::vector<EigenpairPS> eigenvalues_for_alpha(double alpha, const Geometry& geom,
                                               const TransverseBasis& basis,
                                               std::pair<double, double> z_range,
                                               const SeriesConfig& cfg);

struct AlphaLevel {
    double alpha = 0.0;
    double z_target = 0.0;
};

// The coupling for which the n-th eigenvalue sits at nu_1/b^2 + z_{n-1,inf}.
AlphaLevel alpha_n(int n, const Geometry& geom, const TransverseBasis& basis,
                   const SeriesConfig& cfg);

EigenpairPS synthesize_eigenfunction(double z, const Geometry& geom,
                                     const TransverseBasis& basis, const SeriesConfig& cfg);

// beta(r) with z in spec(-Delta_{r x0, r Omega, alpha}) iff
// r^2 z in spec(-Delta_{x0, Omega, alpha - beta}).
double scaling_beta(double r, const Geometry& geom, const TransverseBasis& basis,
                    const SeriesConfig& cfg);

// Diagonal 1D Dirichlet Green value: sum over n1 of
// sin^2(n1 pi x0/a) / ((n1 pi/a)^2 - w) = (a/2) G_w(x0,x0), any complex w off poles.
std::complex<double> green_diag(std::complex<double> w, double a, double x0);

// Exact L^2 masses of x -> G_w(x, x0) on [0,x0] and [x0,a].
struct GreenBlockMass {
    double left = 0.0;
    double right = 0.0;
};
GreenBlockMass green_block_mass(double w, double a, double x0);

}  // namespace seba
