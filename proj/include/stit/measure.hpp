#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "stit/constants.hpp"
#include "stit/hyperplane.hpp"
#include "stit/polytope.hpp"
#include "stit/rng.hpp"

namespace stit {

/// The isotropic driving measure with unit surface intensity, in fixed
/// ambient dimension d. With directions carrying the uniform probability
/// measure on a hemisphere and offsets Lebesgue measure, the total mass of
/// hyperplanes hitting K is the mean width of K, which equals gamma_1 V_1(K).
struct IsotropicMeasure {
    int d = 3;
    std::vector<double> gamma;  // gamma[j], 1 <= j <= d (index 0 unused)

    explicit IsotropicMeasure(int d_) : d(d_), gamma(std::size_t(d_) + 1, 0.0) {
        if (d < 2 || d > 3) throw std::invalid_argument("IsotropicMeasure: d must be 2 or 3");
        for (int j = 1; j <= d; ++j) gamma[std::size_t(j)] = gamma_j(j, d);
    }
};

/// Lambda([K]) = gamma_1 V_1(K): the exponential split rate of a cell.
inline double lambda_hitting(const Polytope& K, int d) {
    if (K.volume() <= 0.0 && K.dim() > 0)
        throw std::invalid_argument("lambda_hitting: degenerate body");
    return gamma_j(1, d) * K.intrinsic_volume(1);
}

/// Uniform direction on the unit hemisphere (z >= 0) for d=3, or the unit
/// half-circle (y >= 0) for d=2.
inline Vec3 uniform_hemisphere_direction(int d, Rng& rng) {
    if (d == 2) {
        double a = kPi * rng.uniform();
        return {std::cos(a), std::sin(a), 0.0};
    }
    double z = rng.uniform();
    double phi = 2.0 * kPi * rng.uniform();
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

/// Exact sample from the normalized restriction Lambda(. n [K]) / Lambda([K]).
/// Directions are drawn width-weighted by rejection against the uniform
/// hemisphere (envelope: width <= diameter), offsets uniformly across the
/// support interval. The returned hyperplane meets the interior of K up to
/// boundary-grazing draws, which callers detect via clip misses.
inline Hyperplane sample_hitting_hyperplane(const Polytope& K, int d, Rng& rng) {
    const double diam = K.diameter();
    if (!(diam > 0.0)) throw std::invalid_argument("sample_hitting_hyperplane: degenerate body");
    for (;;) {
        Vec3 u = uniform_hemisphere_direction(d, rng);
        auto [lo, hi] = K.support_interval(u);
        double w = hi - lo;
        if (rng.uniform() * diam > w) continue;
        double r = lo + rng.uniform() * w;
        return canonicalize({u, r});
    }
}

}  // namespace stit
