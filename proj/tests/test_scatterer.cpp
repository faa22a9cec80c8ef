#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "seba/localization.hpp"
#include "seba/scatterer.hpp"

using namespace seba;
namespace {
constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

const double kE = 10.0 * kPi;
const double kX0f = 1.0 / kPi;

Geometry std_geom() { return Geometry::unit_area(kE, kX0f, 0.5); }

// reference Green value by explicit trigonometric formula, w > 0 off poles
double green_ref(double w, double a, double x0, double x) {
    const double k = std::sqrt(w);
    const double lo = std::min(x, x0), hi = std::max(x, x0);
    return std::sin(k * lo) * std::sin(k * (a - hi)) / (k * std::sin(k * a));
}

double green_ref_neg(double w, double a, double x0, double x) {
    const double s = std::sqrt(-w);
    const double lo = std::min(x, x0), hi = std::max(x, x0);
    if (s * a > 350.0) {  // exponential form, safe against sinh overflow
        return std::exp(-s * (hi - lo)) * (1.0 - std::exp(-2.0 * s * lo)) *
               (1.0 - std::exp(-2.0 * s * (a - hi))) /
               (2.0 * s * (1.0 - std::exp(-2.0 * s * a)));
    }
    return std::sinh(s * lo) * std::sinh(s * (a - hi)) / (s * std::sinh(s * a));
}
}  // namespace

TEST_CASE("green_diag matches the slow mode sum") {
    const double a = 2.3, x0 = 0.7;
    for (cd w : {cd(-3.0, 1.0), cd(5.0, 2.0), cd(-40.0, 0.3), cd(0.0, 1.0)}) {
        cd sum(0.0, 0.0);
        for (int n = 1; n <= 2000000; ++n) {
            const double lam = (n * kPi / a) * (n * kPi / a);
            const double sx = std::sin(n * kPi * x0 / a);
            sum += sx * sx / (lam - w);
        }
        const cd g = 0.5 * a * green_diag(w, a, x0);
        CHECK(std::abs(g - sum) < 1e-5);
    }
    // small-argument limit
    CHECK(std::abs(green_diag(cd(1e-20, 0.0), a, x0) - cd(x0 * (a - x0) / a, 0.0)) < 1e-12);
}

TEST_CASE("green_block_mass matches quadrature in every branch") {
    const double a = 1.9, x0 = 0.55;
    for (double w : {-4000.0, -40.0, -0.01, 1e-12, 0.5, 37.0, 311.0}) {
        GreenBlockMass m = green_block_mass(w, a, x0);
        auto f = [&](double x) {
            const double g = w > 0.0 ? green_ref(w, a, x0, x)
                             : w < 0.0 ? green_ref_neg(w, a, x0, x)
                                       : std::min(x, x0) * (a - std::max(x, x0)) / a;
            return g * g;
        };
        const double left = oracle::adapt_quad(f, 0.0, x0, 1e-14);
        const double right = oracle::adapt_quad(f, x0, a, 1e-14);
        CHECK(m.left == doctest::Approx(left).epsilon(1e-9));
        CHECK(m.right == doctest::Approx(right).epsilon(1e-9));
    }
}

TEST_CASE("eval_F agrees with brute double summation") {
    SeriesConfig cfg;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> zdist(-50.0, 400.0);
    for (BoundaryCondition bc : {BoundaryCondition::dirichlet(), BoundaryCondition::neumann(),
                                 BoundaryCondition::periodic(), BoundaryCondition::floquet(1.1)}) {
        TransverseBasis basis = build_basis(bc);
        const Geometry geom = Geometry::unit_area(kE, kX0f, 0.37);
        int done = 0;
        while (done < 5) {
            const double z = zdist(rng);
            double f;
            try {
                f = eval_F(z, geom, basis, cfg);
            } catch (const PoleProximityError&) {
                continue;
            }
            oracle::BruteF ref = oracle::brute_series_F(z, geom, bc, 4000, 400);
            CHECK(std::abs(f - ref.partial) <= ref.tail_bound + cfg.tail_tol + 1e-7);
            ++done;
        }
    }
}

TEST_CASE("F increases between weighted poles and diverges at them") {
    SeriesConfig cfg;
    TransverseBasis basis = build_basis(BoundaryCondition::dirichlet());
    const Geometry geom = std_geom();
    auto poles = weighted_poles(geom, basis, 500.0);
    std::vector<double> wp;
    for (const WeightedPole& p : poles)
        if (p.total_weight > 1e-18) wp.push_back(p.lambda);
    REQUIRE(wp.size() >= 4);
    for (std::size_t i = 0; i + 1 < 4; ++i) {
        const double lo = wp[i], hi = wp[i + 1];
        double prev = -std::numeric_limits<double>::infinity();
        for (int j = 1; j <= 5; ++j) {
            const double z = lo + (hi - lo) * j / 6.0;
            const double f = eval_F(z, geom, basis, cfg);
            CHECK(f > prev);
            prev = f;
        }
        CHECK(eval_F(lo + (hi - lo) * 1e-4, geom, basis, cfg) < -50.0);
        CHECK(eval_F(hi - (hi - lo) * 1e-4, geom, basis, cfg) > 50.0);
    }
}

TEST_CASE("weighted pole table against direct lattice enumeration") {
    TransverseBasis basis = build_basis(BoundaryCondition::periodic());
    const Geometry geom = Geometry::unit_area(kE, kX0f, 0.3);
    const double z_max = 2000.0;
    auto poles = weighted_poles(geom, basis, z_max);
    // independent lattice count: nu = (2 pi l)^2, l in Z
    int count = 0;
    for (int l = -100; l <= 100; ++l) {
        const double mu = (2.0 * kPi * l) * (2.0 * kPi * l) / (geom.b * geom.b);
        for (int n1 = 1; n1 < 1000; ++n1) {
            const double lam = (n1 * kPi / geom.a) * (n1 * kPi / geom.a) + mu;
            if (lam <= z_max) ++count;
        }
    }
    int total_mu = 0;
    double prev = -1.0;
    for (const WeightedPole& p : poles) {
        CHECK(p.lambda > prev);
        prev = p.lambda;
        total_mu += p.mu;
        if (p.mu == 1) CHECK(p.mu0 == 0);  // periodic weights never vanish
    }
    CHECK(total_mu == count);
    // opposite labels give degenerate pairs, so poles above the l = 0 column
    bool found_double = false;
    for (const WeightedPole& p : poles) found_double |= (p.mu >= 2);
    CHECK(found_double);
}

TEST_CASE("dirichlet midline scatterer blanks the even transverse modes") {
    TransverseBasis basis = build_basis(BoundaryCondition::dirichlet());
    const Geometry geom = std_geom();  // y0_frac = 1/2
    const double mu2 = basis.mode(2).nu / (geom.b * geom.b);  // label 2, vanishes at 1/2
    auto poles = weighted_poles(geom, basis, mu2 + 50.0);
    bool saw_unweighted = false;
    for (const WeightedPole& p : poles)
        if (p.lambda > mu2 && p.mu0 >= 1) saw_unweighted = true;
    CHECK(saw_unweighted);
}

TEST_CASE("eigenvalues_for_alpha: interlacing and round trip") {
    SeriesConfig cfg;
    TransverseBasis basis = build_basis(BoundaryCondition::dirichlet());
    const Geometry geom = std_geom();
    auto poles = weighted_poles(geom, basis, 700.0);
    std::vector<double> wp;
    for (const WeightedPole& p : poles)
        if (p.total_weight > 1e-18) wp.push_back(p.lambda);
    for (double alpha : {-2.0, 0.7, 13.0}) {
        auto eigs = eigenvalues_for_alpha(alpha, geom, basis, {0.0, 600.0}, cfg);
        std::vector<double> roots;
        for (const EigenpairPS& e : eigs)
            if (e.kind == EigKind::Perturbed) roots.push_back(e.z);
        // exactly one root strictly inside each gap fully contained in range
        std::size_t gi = 0;
        for (std::size_t i = 0; i + 1 < wp.size() && wp[i + 1] < 600.0; ++i) {
            REQUIRE(gi < roots.size());
            if (roots[gi] < wp[0]) ++gi;  // the root below the first pole, if any
            CHECK(roots[gi] > wp[i]);
            CHECK(roots[gi] < wp[i + 1]);
            ++gi;
        }
        for (double z : roots) {
            const double back = alpha_for_z(z, geom, basis, cfg);
            CHECK(back == doctest::Approx(alpha).epsilon(1e-6));
        }
    }
}

TEST_CASE("huge coupling pushes each root against the upper pole") {
    SeriesConfig cfg;
    TransverseBasis basis = build_basis(BoundaryCondition::dirichlet());
    const Geometry geom = std_geom();
    auto poles = weighted_poles(geom, basis, 700.0);
    std::vector<double> wp;
    for (const WeightedPole& p : poles)
        if (p.total_weight > 1e-18) wp.push_back(p.lambda);
    auto eigs = eigenvalues_for_alpha(1e6, geom, basis, {wp[0] + 1e-9, 600.0}, cfg);
    std::size_t gi = 0;
    for (const EigenpairPS& e : eigs) {
        if (e.kind != EigKind::Perturbed) continue;
        while (gi + 1 < wp.size() && wp[gi + 1] < e.z) ++gi;
        REQUIRE(gi + 1 < wp.size());
        CHECK(wp[gi + 1] - e.z < 1e-3 * (wp[gi + 1] - wp[gi]));
        ++gi;
    }
}

TEST_CASE("alpha_n frozen regressions") {
    SeriesConfig cfg;
    TransverseBasis basis = build_basis(BoundaryCondition::dirichlet());
    const Geometry geom = std_geom();
    const AlphaLevel l2 = alpha_n(2, geom, basis, cfg);
    CHECK(l2.z_target == doctest::Approx(310.73881223289521).epsilon(1e-12));
    CHECK(l2.alpha == doctest::Approx(-0.30945190879156093).epsilon(1e-9));
    const AlphaLevel l3 = alpha_n(3, geom, basis, cfg);
    CHECK(l3.z_target == doctest::Approx(312.76694852258618).epsilon(1e-12));
    CHECK(l3.alpha == doctest::Approx(-0.30938981421249911).epsilon(1e-9));
    // solving at that coupling reproduces the target level
    auto eigs = eigenvalues_for_alpha(l3.alpha, geom, basis,
                                      {l3.z_target - 5.0, l3.z_target + 5.0}, cfg);
    bool hit = false;
    for (const EigenpairPS& e : eigs)
        if (e.kind == EigKind::Perturbed && std::abs(e.z - l3.z_target) < 1e-8) hit = true;
    CHECK(hit);
}

TEST_CASE("synthesized series factorizes over the lowest transverse block") {
    SeriesConfig cfg;
    cfg.tail_tol = 1e-4;
    TransverseBasis basis = build_basis(BoundaryCondition::dirichlet());
    const Geometry geom = std_geom();
    const double z = 312.0;
    const double mu1 = basis.mode(1).nu / (geom.b * geom.b);
    EigenpairPS eig = synthesize_eigenfunction(z, geom, basis, cfg);
    FourierCoeffs1D fc = fourier_coeffs_1d(z - mu1, geom.x_interval(), 60);
    // g_1(1/2) = 1 for Dirichlet, so block-1 coefficients equal the 1D ones
    int matched = 0;
    for (const ModeCoeff& mc : eig.coeffs) {
        if (mc.n2 != 1 || mc.n1 > 60) continue;
        CHECK(std::abs(mc.c - cd(fc.c[mc.n1 - 1], 0.0)) <=
              1e-12 * std::max(1.0, std::abs(fc.c[mc.n1 - 1])));
        ++matched;
    }
    CHECK(matched == 60);
    CHECK(eig.norm_factor > 0.0);
    CHECK(eig.tail_mass_sq <= cfg.tail_tol);
}

TEST_CASE("synthesized eigenfunction: norm and closed-form pointwise values") {
    SeriesConfig cfg;
    cfg.tail_tol = 1e-6;
    TransverseBasis basis = build_basis(BoundaryCondition::dirichlet());
    const Geometry geom = Geometry::unit_area(2.0, kX0f, 0.5);
    const double z = 25.0;
    EigenpairPS eig = synthesize_eigenfunction(z, geom, basis, cfg);
    auto psi = [&](double x, double y) { return eig.value(x, y, geom, basis); };
    {
        // coarser table for the quadrature: the dropped mass is far below the
        // tolerance of the excluded-disk norm itself
        SeriesConfig coarse = cfg;
        coarse.tail_tol = 1e-3;
        EigenpairPS eig_n = synthesize_eigenfunction(z, geom, basis, coarse);
        auto psi_n = [&](double x, double y) { return eig_n.value(x, y, geom, basis); };
        const double nrm =
            oracle::quad_norm_sq(psi_n, geom.a, geom.b, geom.x0(), geom.y0(), 512);
        CHECK(nrm == doctest::Approx(1.0).epsilon(2e-2));
    }

    // independent evaluation through the per-block 1D Green closed form:
    // psi = M sum_n2 conj(g(y0f)) g(y/b) G_{z-mu}(x, x0) / (b ||g||^2)
    auto green_sum = [&](double x, double y) {
        cd sum(0.0, 0.0);
        for (int n2 = 1; n2 <= 400; ++n2) {
            const double mu = basis.mode(n2).nu / (geom.b * geom.b);
            const double w = z - mu;
            if (w < -1e7) break;
            const double g = w > 0.0 ? green_ref(w, geom.a, geom.x0(), x)
                                     : green_ref_neg(w, geom.a, geom.x0(), x);
            sum += std::conj(basis.value(n2, geom.y0_frac)) * basis.value(n2, y / geom.b) * g /
                   (geom.b * basis.mode(n2).norm_sq);
        }
        return eig.norm_factor * sum;
    };
    for (auto [x, y] : {std::pair{0.2, 0.1}, {0.9, 0.5}, {1.2, 0.35}, {0.45, 0.62}}) {
        const double xs = x * geom.a / 1.5, ys = y * geom.b;
        CHECK(std::abs(psi(xs, ys) - green_sum(xs, ys)) < 5e-3);
    }
}

TEST_CASE("scaling relation") {
    SeriesConfig cfg;
    cfg.tail_tol = 1e-9;
    TransverseBasis basis = build_basis(BoundaryCondition::dirichlet());
    const Geometry geom = std_geom();
    CHECK(scaling_beta(1.0, geom, basis, cfg) == 0.0);

    const double r = 2.0;
    const double beta = scaling_beta(r, geom, basis, cfg);
    const double alpha = 0.7;
    const Geometry big = geom.scaled(r);
    auto eig_big = eigenvalues_for_alpha(alpha, big, basis, {0.0, 130.0}, cfg);
    auto eig_ref = eigenvalues_for_alpha(alpha - beta, geom, basis, {0.0, r * r * 130.0 + 5.0}, cfg);
    int checked = 0;
    for (const EigenpairPS& e : eig_big) {
        if (e.kind != EigKind::Perturbed) continue;
        double best = 1e9;
        for (const EigenpairPS& f : eig_ref)
            if (f.kind == EigKind::Perturbed) best = std::min(best, std::abs(f.z - r * r * e.z));
        CHECK(best < 1e-6 * std::max(1.0, r * r * std::abs(e.z)));
        ++checked;
    }
    CHECK(checked >= 4);
}

TEST_CASE("scaling beta against the direct lattice sum") {
    SeriesConfig cfg;
    cfg.tail_tol = 1e-10;
    TransverseBasis basis = build_basis(BoundaryCondition::dirichlet());
    const Geometry geom = Geometry::unit_area(4.0, kX0f, 0.4);
    for (double r : {0.5, 2.0, 3.0}) {
        const double r4 = r * r * r * r;
        double brute = 0.0;
        for (int n2 = 1; n2 <= 3000; ++n2) {
            const double mu = basis.mode(n2).nu / (geom.b * geom.b);
            if (mu > 4e8) break;
            const double wy = basis.weight_at(n2, geom.y0_frac);
            if (wy <= 0.0) continue;
            const double cw = wy / (0.5 * geom.a * geom.b * basis.mode(n2).norm_sq);
            for (int n1 = 1;; ++n1) {
                const double lam = (n1 * kPi / geom.a) * (n1 * kPi / geom.a) + mu;
                if (lam > 4e8) break;
                const double sx = std::sin(n1 * kPi * geom.x0_frac);
                brute += cw * sx * sx * lam *
                         (1.0 / (lam * lam + 1.0) - 1.0 / (lam * lam + r4));
            }
        }
        CHECK(scaling_beta(r, geom, basis, cfg) == doctest::Approx(brute).epsilon(2e-4));
    }
}

TEST_CASE("parameter validation") {
    TransverseBasis basis = build_basis(BoundaryCondition::dirichlet());
    SeriesConfig cfg;
    CHECK_THROWS_AS(Geometry::unit_area(-1.0, 0.3), ParameterError);
    CHECK_THROWS_AS(Geometry::unit_area(2.0, 1.3), ParameterError);
    CHECK_THROWS_AS(std_geom().scaled(0.0), ParameterError);
    CHECK_THROWS_AS(weighted_poles(std_geom(), basis, 0.0), ParameterError);
    CHECK_THROWS_AS(alpha_n(1, std_geom(), basis, cfg), ParameterError);
    CHECK_THROWS_AS(
        eigenvalues_for_alpha(0.0, std_geom(), basis, {5.0, 5.0}, cfg), ParameterError);
}
