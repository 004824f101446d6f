#include "wallenergy/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wallenergy {

GaussRule gauss_legendre(int n) {
    if (n < 1)
        throw std::invalid_argument("gauss_legendre: need at least one point");

    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);

    // Roots come in +/- pairs; solve for the non-negative half.
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-like initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Evaluate P_n(x) and P_n'(x) by the three-term recurrence.
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        r.nodes[n / 2] = 0.0; // exact middle root, kill the roundoff
    return r;
}

QuadratureRule::QuadratureRule(int points) : points_per_cell(points) {
    if (points < 8)
        throw std::invalid_argument(
            "QuadratureRule: fewer than 8 points per cell would make the "
            "potential integral inexact for cubic profiles");
    rule = gauss_legendre(points);
}

} // namespace wallenergy
