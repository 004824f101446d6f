#pragma once

#include "wallenergy/profile.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace wallenergy {

// One measured instance of an interpolation inequality: lhs against the
// scaling factor it is compared to, and their quotient. A sweep of these
// over a seeded ensemble gives an empirical stand-in for the inequality's
// constant.
struct RatioSample {
    std::string name;
    std::uint64_t seed = 0; // generator seed, or input index for sequences
    double lhs = 0.0;
    double rhs = 0.0; // positive whenever the profile is non-degenerate
    double ratio = 0.0;
};

// int |u'|^2 divided by (int u^2)^{1/2} (int |u''|^2)^{1/2}.
//
// The quotient is only asserted to be bounded when u' vanishes somewhere on
// the closed domain, so that hypothesis is checked first: the derivative is
// piecewise quadratic, and the scan covers the nodal values together with
// each cell's interior extremum. Nodal signs alone would miss a dip that
// crosses zero strictly inside a cell. Throws std::domain_error when u'
// never vanishes, and also when either denominator factor is zero (a
// constant profile satisfies the hypothesis but has no curvature to divide
// by).
double inter1_ratio(const HermiteProfile& p);

// (int |u'|^2)^{1/2} divided by l^{-1} (int u^2)^{1/2} + l (int |u''|^2)^{1/2}.
// The length scale l must lie strictly between 0 and the domain length;
// the zero profile leaves nothing to divide by. Both are argument errors.
double inter2_ratio(const HermiteProfile& p, double l);

// For each (profile, eps) pair: eps times the Dirichlet energy over the
// domain shrunk by inner_margin on both sides, divided by the full
// eps-weighted energy P/eps + eps^3 C. A pair whose numerator and
// denominator both vanish (the profile rests in a well) reports ratio 0.
// inner_margin must be positive and smaller than half of every profile's
// domain length, and every eps must be positive. Sample names carry the
// pair's position in the sequence.
std::vector<RatioSample>
inter3_check(const std::vector<std::pair<HermiteProfile, double>>& seq,
             double inner_margin);

// Seeded ensemble sweeps over smooth random profiles on the given grid,
// one row per measurement, seeds recorded so any row can be replayed.
// inter2 is swept over l at fixed fractions 0.1..0.9 of the domain length
// for each profile, nine rows per seed.
std::vector<RatioSample> inter1_sweep(const Grid& grid, int count,
                                      std::uint64_t base_seed);
std::vector<RatioSample> inter2_sweep(const Grid& grid, int count,
                                      std::uint64_t base_seed);

// One row per sample, header "name,seed,lhs,rhs,ratio".
void write_ratio_csv(std::ostream& out, const std::vector<RatioSample>& rows);

} // namespace wallenergy
