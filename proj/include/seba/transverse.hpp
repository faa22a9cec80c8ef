#pragma once

#include <complex>
#include <mutex>
#include <utility>
#include <vector>

#include "seba/errors.hpp"

namespace seba {

enum class BcKind { Dirichlet, Neumann, Periodic, Floquet };

// Boundary condition imposed on the long sides of the rectangle.
// theta is only meaningful for the Floquet condition and must lie in (-pi, pi).
struct BoundaryCondition {
    BcKind kind = BcKind::Dirichlet;
    double theta = 0.0;

    static BoundaryCondition dirichlet() { return {BcKind::Dirichlet, 0.0}; }
    static BoundaryCondition neumann() { return {BcKind::Neumann, 0.0}; }
    static BoundaryCondition periodic() { return {BcKind::Periodic, 0.0}; }
    static BoundaryCondition floquet(double theta) { return {BcKind::Floquet, theta}; }

    void validate() const;
    const char* name() const;
};

// One transverse mode after rearrangement into nondecreasing nu order.
// original_label is the pre-rearrangement index (n >= 1 for Dirichlet,
// n >= 0 for Neumann, n in Z for periodic/Floquet).
struct TransverseMode {
    int index = 0;  // 1-based rearranged index
    double nu = 0.0;
    int original_label = 0;
    double norm_sq = 0.0;  // L^2([0,1]) norm squared of g
};

// Lazily extendable family of transverse eigenmodes for one boundary condition,
// sorted by (nu, original_label). Queries are pure; extension is internally
// synchronized so shared read access is safe.
class TransverseBasis {
public:
    explicit TransverseBasis(BoundaryCondition bc);

    const BoundaryCondition& bc() const { return bc_; }

    // 1-based access; extends the table on demand.
    const TransverseMode& mode(int n) const;

    // g_n(t) for t in [0,1].
    std::complex<double> value(int n, double t) const;

    // |g_n(t)|^2.
    double weight_at(int n, double t) const;

    // Exact number of rearranged indices with nu_n < nu.
    int count_below(double nu) const;

    // (nu_n, |g_n(y0_frac)|^2) for n = 1..count. Zero weights are preserved.
    std::vector<std::pair<double, double>> weights(double y0_frac, int count) const;

    // Lower bound nu_n >= nu_lower_bound(n), valid for every supported family;
    // used by analytic tail estimates.
    static double nu_lower_bound(int n);

private:
    void ensure(int n) const;

    BoundaryCondition bc_;
    mutable std::vector<TransverseMode> entries_;
    mutable std::mutex mutex_;
};

TransverseBasis build_basis(BoundaryCondition bc);

}  // namespace seba
