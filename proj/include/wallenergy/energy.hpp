#pragma once

#include "wallenergy/profile.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace wallenergy {

// The four elementary integrals every functional here is built from.
// potential  P = int (u^2 - 1)^2
// curvature  C = int |u''|^2
// dirichlet  D = int |u'|^2
// l2         M = int u^2
struct Integrals {
    double potential = 0.0;
    double curvature = 0.0;
    double dirichlet = 0.0;
    double l2 = 0.0;
};

// Evaluate the integrals over a flat dof vector (layout as in profile.hpp),
// optionally assembling the exact gradients of P, C, D with respect to every
// dof. Pass nullptr to skip a gradient. This is the optimizer's hot path; the
// profile-taking wrappers below are the friendly interface.
Integrals integrate_dofs(const Grid& grid, std::span<const double> dofs,
                         std::vector<double>* dP = nullptr,
                         std::vector<double>* dC = nullptr,
                         std::vector<double>* dD = nullptr);

Integrals integrate_parts(const HermiteProfile& p);

double potential_energy(const HermiteProfile& p);
double curvature_energy(const HermiteProfile& p);
double gradient_energy(const HermiteProfile& p); // int |u'|^2
double l2_squared(const HermiteProfile& p);      // int u^2

// int_c^d |u'|^2, clipping cells that straddle c or d. Needed for the inner
// Dirichlet bound where the domain shrinks by a margin.
double gradient_energy_on(const HermiteProfile& p, double c, double d);

// The scale-free product P^{3/4} C^{1/4}. Only defined on the unit interval;
// rescale first otherwise.
double phi(const HermiteProfile& p);

// P + C over the profile's own domain.
double psi(const HermiteProfile& p);

// P/eps + eps^3 C.
double f_eps(const HermiteProfile& p, double eps);

struct EnergyBreakdown {
    double potential;
    double curvature;
    double phi; // potential^{3/4} curvature^{1/4}
    double psi; // potential + curvature
    std::optional<double> epsilon;
    std::optional<double> f_eps;
};

EnergyBreakdown energy_breakdown(const HermiteProfile& p,
                                 std::optional<double> eps = std::nullopt);

// CSV row "P,C,phi,psi,eps,f_eps"; absent optionals print as nan.
void write_breakdown_csv(std::ostream& out, const EnergyBreakdown& b);

enum class Functional : std::uint8_t { potential, curvature, phi, psi, f_eps };

// Exact gradient of the chosen functional with respect to the free dofs
// (free_mask as produced by BoundarySpec::free_mask). eps is consulted only
// by f_eps. The phi gradient follows the chain rule
//   d(phi) = (3/4)(C/P)^{1/4} dP + (1/4)(P/C)^{3/4} dC
// and is singular at P=0 or C=0, reported as phi_singularity_error.
std::vector<double> energy_gradient(const HermiteProfile& p, Functional f,
                                    std::optional<double> eps,
                                    const std::vector<std::uint8_t>& free_mask);

// Same, over every dof.
std::vector<double> energy_gradient(const HermiteProfile& p, Functional f,
                                    std::optional<double> eps = std::nullopt);

} // namespace wallenergy
