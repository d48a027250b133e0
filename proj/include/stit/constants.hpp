#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stit {

inline constexpr double kPi = std::numbers::pi;

/// Volume of the n-dimensional unit ball, kappa_n = pi^(n/2) / Gamma(n/2 + 1).
inline double unit_ball_volume(int n) {
    if (n < 0) throw std::invalid_argument("unit_ball_volume: n must be >= 0");
    return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// The sectioning constant gamma_j = Gamma((j+1)/2)Gamma(d/2) / (Gamma(j/2)Gamma((d+1)/2)),
/// 1 <= j <= d. gamma_d = 1; gamma_1 equals 2*kappa_{d-1}/(d*kappa_d).
inline double gamma_j(int j, int d) {
    if (j < 1 || j > d) throw std::invalid_argument("gamma_j: need 1 <= j <= d");
    double lg = std::lgamma(0.5 * (j + 1)) + std::lgamma(0.5 * d)
              - std::lgamma(0.5 * j) - std::lgamma(0.5 * (d + 1));
    return std::exp(lg);
}

inline double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double b = 1.0;
    for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
    return b;
}

}  // namespace stit
