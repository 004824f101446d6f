#include "wallenergy/energy.hpp"

#include "wallenergy/errors.hpp"
#include "wallenergy/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace wallenergy {

namespace {

constexpr int kQuadPoints = 8;

// Basis values at the quadrature points of the reference cell, tabulated
// once. Layout: [point][basis function], for each derivative order.
struct QuadTable {
    double s[kQuadPoints];
    double w[kQuadPoints];
    double B0[kQuadPoints][4];
    double B1[kQuadPoints][4];
    double B2[kQuadPoints][4];
};

QuadTable make_table() {
    QuadTable t;
    GaussRule gl = gauss_legendre(kQuadPoints);
    for (int q = 0; q < kQuadPoints; ++q) {
        const double s = 0.5 * (gl.nodes[q] + 1.0);
        t.s[q] = s;
        t.w[q] = 0.5 * gl.weights[q];
        t.B0[q][0] = 1.0 + s * s * (2.0 * s - 3.0);
        t.B0[q][1] = s * (1.0 + s * (s - 2.0));
        t.B0[q][2] = s * s * (3.0 - 2.0 * s);
        t.B0[q][3] = s * s * (s - 1.0);
        t.B1[q][0] = 6.0 * s * (s - 1.0);
        t.B1[q][1] = 1.0 + s * (3.0 * s - 4.0);
        t.B1[q][2] = 6.0 * s * (1.0 - s);
        t.B1[q][3] = s * (3.0 * s - 2.0);
        t.B2[q][0] = 12.0 * s - 6.0;
        t.B2[q][1] = 6.0 * s - 4.0;
        t.B2[q][2] = 6.0 - 12.0 * s;
        t.B2[q][3] = 6.0 * s - 2.0;
    }
    return t;
}

const QuadTable& table() {
    static const QuadTable t = make_table();
    return t;
}

bool is_unit_interval(const Grid& g) { return g.x_lo == 0.0 && g.x_hi == 1.0; }

} // namespace

Integrals integrate_dofs(const Grid& grid, std::span<const double> dofs,
                         std::vector<double>* dP, std::vector<double>* dC,
                         std::vector<double>* dD) {
    const auto n_dofs = 2 * static_cast<std::size_t>(grid.n_nodes());
    if (dofs.size() != n_dofs)
        throw std::invalid_argument("integrate_dofs: bad dof vector length");
    for (auto* g : {dP, dC, dD})
        if (g)
            g->assign(n_dofs, 0.0);

    const QuadTable& t = table();

    Integrals out;
    for (int cell = 0; cell < grid.n_cells; ++cell) {
        // Per-cell width from the actual node coordinates. Using the nominal
        // (x_hi-x_lo)/n here instead leaves a one-ulp mismatch against the
        // nodal data, which the fourth root in phi would amplify; with the
        // cell's own width, affine data integrates to exactly zero curvature.
        const double h = grid.node(cell + 1) - grid.node(cell);
        const double inv_h = 1.0 / h;
        const double inv_h2 = inv_h * inv_h;

        // Local dofs: value/deriv at the left node, then at the right node.
        const double q0 = dofs[2 * cell];
        const double q1 = dofs[2 * cell + 1];
        const double q2 = dofs[2 * cell + 2];
        const double q3 = dofs[2 * cell + 3];

        double gP[4] = {0, 0, 0, 0};
        double gC[4] = {0, 0, 0, 0};
        double gD[4] = {0, 0, 0, 0};

        for (int q = 0; q < kQuadPoints; ++q) {
            const double* B0 = t.B0[q];
            const double* B1 = t.B1[q];
            const double* B2 = t.B2[q];
            const double u = B0[0] * q0 + h * B0[1] * q1 + B0[2] * q2 + h * B0[3] * q3;
            const double du =
                (B1[0] * q0 + h * B1[1] * q1 + B1[2] * q2 + h * B1[3] * q3) * inv_h;
            // Algebraically the same combination as the B2 row, regrouped so
            // that affine nodal data cancels before any rounding happens;
            // otherwise the leftover ~1e-27 in the curvature integral turns
            // into ~1e-7 after the fourth root in phi.
            const double ca = q0 - q2 + 0.5 * h * (q1 + q3);
            const double ddu =
                ((12.0 * t.s[q] - 6.0) * ca + h * (q3 - q1)) * inv_h2;

            const double wq = t.w[q] * h;
            const double well = u * u - 1.0;
            out.potential += wq * well * well;
            out.curvature += wq * ddu * ddu;
            out.dirichlet += wq * du * du;
            out.l2 += wq * u * u;

            if (dP) {
                const double f = wq * 4.0 * well * u;
                gP[0] += f * B0[0];
                gP[1] += f * h * B0[1];
                gP[2] += f * B0[2];
                gP[3] += f * h * B0[3];
            }
            if (dC) {
                const double f = wq * 2.0 * ddu * inv_h2;
                gC[0] += f * B2[0];
                gC[1] += f * h * B2[1];
                gC[2] += f * B2[2];
                gC[3] += f * h * B2[3];
            }
            if (dD) {
                const double f = wq * 2.0 * du * inv_h;
                gD[0] += f * B1[0];
                gD[1] += f * h * B1[1];
                gD[2] += f * B1[2];
                gD[3] += f * h * B1[3];
            }
        }

        for (int k = 0; k < 4; ++k) {
            const std::size_t dst = 2 * cell + k;
            if (dP)
                (*dP)[dst] += gP[k];
            if (dC)
                (*dC)[dst] += gC[k];
            if (dD)
                (*dD)[dst] += gD[k];
        }
    }
    return out;
}

Integrals integrate_parts(const HermiteProfile& p) {
    return integrate_dofs(p.grid(), p.dofs());
}

double potential_energy(const HermiteProfile& p) { return integrate_parts(p).potential; }
double curvature_energy(const HermiteProfile& p) { return integrate_parts(p).curvature; }
double gradient_energy(const HermiteProfile& p) { return integrate_parts(p).dirichlet; }
double l2_squared(const HermiteProfile& p) { return integrate_parts(p).l2; }

double gradient_energy_on(const HermiteProfile& p, double c, double d) {
    const Grid& g = p.grid();
    if (!(c < d))
        throw std::invalid_argument("gradient_energy_on: need c < d");
    c = std::max(c, g.x_lo);
    d = std::min(d, g.x_hi);
    if (!(c < d))
        return 0.0;

    // Per-cell Gauss on the clipped subcell; the integrand is a degree-4
    // polynomial there, so the rule stays exact.
    const QuadTable& t = table();
    double total = 0.0;
    for (int cell = 0; cell < g.n_cells; ++cell) {
        const double a = std::max(g.node(cell), c);
        const double b = std::min(g.node(cell + 1), d);
        if (!(a < b))
            continue;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int q = 0; q < kQuadPoints; ++q) {
            // t.s is on [0,1]; stretch onto [a,b].
            const double x = mid + (2.0 * t.s[q] - 1.0) * half;
            const double du = p.eval(x, 1);
            total += 2.0 * half * t.w[q] * du * du;
        }
    }
    return total;
}

double phi(const HermiteProfile& p) {
    if (!is_unit_interval(p.grid()))
        throw std::domain_error("phi: profile domain must be (0,1); rescale first");
    Integrals I = integrate_parts(p);
    return std::pow(I.potential, 0.75) * std::pow(I.curvature, 0.25);
}

double psi(const HermiteProfile& p) {
    Integrals I = integrate_parts(p);
    return I.potential + I.curvature;
}

double f_eps(const HermiteProfile& p, double eps) {
    if (!(eps > 0.0))
        throw std::invalid_argument("f_eps: eps must be positive");
    Integrals I = integrate_parts(p);
    return I.potential / eps + eps * eps * eps * I.curvature;
}

EnergyBreakdown energy_breakdown(const HermiteProfile& p, std::optional<double> eps) {
    if (eps && !(*eps > 0.0))
        throw std::invalid_argument("energy_breakdown: eps must be positive");
    Integrals I = integrate_parts(p);
    EnergyBreakdown b;
    b.potential = I.potential;
    b.curvature = I.curvature;
    b.phi = std::pow(I.potential, 0.75) * std::pow(I.curvature, 0.25);
    b.psi = I.potential + I.curvature;
    b.epsilon = eps;
    if (eps)
        b.f_eps = I.potential / *eps + (*eps) * (*eps) * (*eps) * I.curvature;
    return b;
}

void write_breakdown_csv(std::ostream& out, const EnergyBreakdown& b) {
    out << "P,C,phi,psi,eps,f_eps\n";
    char line[192];
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  b.potential, b.curvature, b.phi, b.psi,
                  b.epsilon ? *b.epsilon : std::nan(""),
                  b.f_eps ? *b.f_eps : std::nan(""));
    out << line;
}

std::vector<double> energy_gradient(const HermiteProfile& p, Functional f,
                                    std::optional<double> eps,
                                    const std::vector<std::uint8_t>& free_mask) {
    const auto n_dofs = 2 * static_cast<std::size_t>(p.grid().n_nodes());
    if (free_mask.size() != n_dofs)
        throw std::invalid_argument("energy_gradient: free_mask has wrong length");

    std::vector<double> dP, dC, dD;
    std::vector<double> full(n_dofs, 0.0);
    const std::vector<double> dofs = p.dofs();

    switch (f) {
    case Functional::potential: {
        integrate_dofs(p.grid(), dofs, &dP);
        full = std::move(dP);
        break;
    }
    case Functional::curvature: {
        integrate_dofs(p.grid(), dofs, nullptr, &dC);
        full = std::move(dC);
        break;
    }
    case Functional::psi: {
        integrate_dofs(p.grid(), dofs, &dP, &dC);
        for (std::size_t i = 0; i < n_dofs; ++i)
            full[i] = dP[i] + dC[i];
        break;
    }
    case Functional::f_eps: {
        if (!eps || !(*eps > 0.0))
            throw std::invalid_argument("energy_gradient: f_eps needs eps > 0");
        Integrals I = integrate_dofs(p.grid(), dofs, &dP, &dC);
        (void)I;
        const double e = *eps;
        for (std::size_t i = 0; i < n_dofs; ++i)
            full[i] = dP[i] / e + e * e * e * dC[i];
        break;
    }
    case Functional::phi: {
        Integrals I = integrate_dofs(p.grid(), dofs, &dP, &dC);
        if (!(I.potential > 0.0) || !(I.curvature > 0.0))
            throw phi_singularity_error(
                "phi gradient undefined: potential or curvature integral is zero");
        const double a = 0.75 * std::pow(I.curvature / I.potential, 0.25);
        const double b = 0.25 * std::pow(I.potential / I.curvature, 0.75);
        for (std::size_t i = 0; i < n_dofs; ++i)
            full[i] = a * dP[i] + b * dC[i];
        break;
    }
    }

    std::vector<double> out;
    out.reserve(n_dofs);
    for (std::size_t i = 0; i < n_dofs; ++i)
        if (free_mask[i])
            out.push_back(full[i]);
    return out;
}

std::vector<double> energy_gradient(const HermiteProfile& p, Functional f,
                                    std::optional<double> eps) {
    const auto n_dofs = 2 * static_cast<std::size_t>(p.grid().n_nodes());
    return energy_gradient(p, f, eps, std::vector<std::uint8_t>(n_dofs, 1));
}

} // namespace wallenergy
