#pragma once

#include <vector>

namespace wallenergy {

// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1],
// exact for polynomials of degree 2n - 1.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Computed by Newton iteration on the Legendre polynomial; accurate to
// machine precision for any practical n.
GaussRule gauss_legendre(int n);

// Per-cell quadrature used by the energy integrals. The 8-point default
// integrates the quartic-of-a-cubic potential term (degree 12) exactly,
// so quadrature never shows up as an error source in the energies.
struct QuadratureRule {
    int points_per_cell;
    GaussRule rule;

    explicit QuadratureRule(int points = 8);
};

} // namespace wallenergy
