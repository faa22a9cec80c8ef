#include "seba/transverse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace seba {

namespace {
constexpr double kPi = std::numbers::pi;
}

void BoundaryCondition::validate() const {
    if (kind == BcKind::Floquet) {
        if (!(theta > -kPi && theta < kPi))
            throw ParameterError("Floquet theta must lie in (-pi, pi)");
    } else if (theta != 0.0) {
        throw ParameterError("theta is only valid for the Floquet boundary condition");
    }
}

const char* BoundaryCondition::name() const {
    switch (kind) {
        case BcKind::Dirichlet: return "dirichlet";
        case BcKind::Neumann: return "neumann";
        case BcKind::Periodic: return "periodic";
        case BcKind::Floquet: return "floquet";
    }
    return "?";
}

TransverseBasis::TransverseBasis(BoundaryCondition bc) : bc_(bc) { bc_.validate(); }

TransverseBasis build_basis(BoundaryCondition bc) { return TransverseBasis(bc); }

// Rebuilds the rearranged table so that at least `n` entries are present.
// Candidate labels are enumerated on a window wide enough to contain the n
// smallest nu values, then sorted by (nu, original_label).
void TransverseBasis::ensure(int n) const {
    std::lock_guard<std::mutex> lock(mutex_);
    if (static_cast<int>(entries_.size()) >= n) return;
    const int want = std::max({n, 2 * static_cast<int>(entries_.size()), 64});
    std::vector<TransverseMode> cand;
    switch (bc_.kind) {
        case BcKind::Dirichlet:
            for (int l = 1; l <= want; ++l)
                cand.push_back({0, (l * kPi) * (l * kPi), l, 0.5});
            break;
        case BcKind::Neumann:
            for (int l = 0; l < want; ++l)
                cand.push_back({0, (l * kPi) * (l * kPi), l, l == 0 ? 0.25 : 0.5});
            break;
        case BcKind::Periodic:
            for (int l = -(want / 2 + 2); l <= want / 2 + 2; ++l)
                cand.push_back({0, (2.0 * l * kPi) * (2.0 * l * kPi), l, 1.0});
            break;
        case BcKind::Floquet:
            for (int l = -(want / 2 + 2); l <= want / 2 + 2; ++l) {
                const double q = 2.0 * l * kPi + bc_.theta;
                cand.push_back({0, q * q, l, 1.0});
            }
            break;
    }
    std::stable_sort(cand.begin(), cand.end(), [](const TransverseMode& x, const TransverseMode& y) {
        if (x.nu != y.nu) return x.nu < y.nu;
        return x.original_label < y.original_label;
    });
    cand.resize(std::min<std::size_t>(cand.size(), static_cast<std::size_t>(want)));
    for (std::size_t i = 0; i < cand.size(); ++i) cand[i].index = static_cast<int>(i) + 1;
    entries_ = std::move(cand);
}

const TransverseMode& TransverseBasis::mode(int n) const {
    if (n < 1) throw ParameterError("mode index must be >= 1");
    if (static_cast<int>(entries_.size()) < n) ensure(n);
    return entries_[static_cast<std::size_t>(n - 1)];
}

std::complex<double> TransverseBasis::value(int n, double t) const {
    const TransverseMode& m = mode(n);
    switch (bc_.kind) {
        case BcKind::Dirichlet:
            return {std::sin(m.original_label * kPi * t), 0.0};
        case BcKind::Neumann:
            if (m.original_label == 0) return {0.5, 0.0};
            return {std::cos(m.original_label * kPi * t), 0.0};
        case BcKind::Periodic:
            return std::polar(1.0, 2.0 * m.original_label * kPi * t);
        case BcKind::Floquet:
            return std::polar(1.0, (2.0 * m.original_label * kPi + bc_.theta) * t);
    }
    return {};
}

double TransverseBasis::weight_at(int n, double t) const {
    const std::complex<double> v = value(n, t);
    return std::norm(v);
}

int TransverseBasis::count_below(double nu) const {
    if (nu <= 0.0) return 0;
    // Weyl-type estimate for the number of entries needed, then verify.
    int guess = static_cast<int>(2.0 * std::sqrt(nu) / kPi) + 8;
    while (mode(guess).nu < nu) guess *= 2;
    int count = 0;
    for (int n = 1; n <= guess; ++n) {
        if (mode(n).nu < nu)
            ++count;
        else
            break;
    }
    return count;
}

std::vector<std::pair<double, double>> TransverseBasis::weights(double y0_frac, int count) const {
    if (!(y0_frac > 0.0 && y0_frac < 1.0)) throw ParameterError("y0_frac must lie in (0,1)");
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int n = 1; n <= count; ++n) out.emplace_back(mode(n).nu, weight_at(n, y0_frac));
    return out;
}

double TransverseBasis::nu_lower_bound(int n) {
    // Valid for all four families: the n-th smallest nu is at least ((n-2)pi)^2.
    const double m = std::max(0, n - 2) * kPi;
    return m * m;
}

}  // namespace seba
