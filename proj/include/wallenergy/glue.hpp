#pragma once

#include "wallenergy/profile.hpp"

#include <iosfwd>
#include <vector>

namespace wallenergy {

// Connector segment on (0, T): a smooth function matching value A and slope
// m at the left end and settling to zero, with zero slope, at the right end.
// Used to join an arbitrary profile endpoint to a resting state.
struct GlueSpec {
    double A = 0.0;
    double m = 0.0;
    double T = 1.0;
    int samples = 256; // cells of the returned profile
};

// Mollification of the ramp m x + A truncated outside (-T/2, T/2), with a
// bump kernel of radius T/4. The radius keeps the ramp untouched near 0 and
// leaves the function identically zero near T, so all four endpoint
// identities hold. Sampled onto a Hermite profile with spec.samples cells.
HermiteProfile build_glue(const GlueSpec& spec);

// Empirical constant of the L2 derivative bound: the integral of |f^(k)|^2
// over (0, T) divided by (A^2 + m^2 T^2) T^(1-2k), for k in {0, 1, 2}.
// The quotient stays bounded over all specs; its observed range is the
// measured counterpart of the bound's constant.
double glue_bound_ratio(const GlueSpec& spec, int k);

// Everything the glue-test sweep reports about one spec. The ratios are
// NaN for the degenerate A = m = 0 spec, where the quotient is 0/0.
struct GlueReport {
    GlueSpec spec;
    double f0 = 0.0;
    double df0 = 0.0;
    double fT = 0.0;
    double dfT = 0.0;
    double sup_f = 0.0; // over 200 uniform sample points
    double ratio_k0 = 0.0;
    double ratio_k2 = 0.0;
};

GlueReport glue_report(const GlueSpec& spec);

// CSV rows "A,m,T,f0,df0,fT,dfT,sup_f,ratio_k0,ratio_k2".
void write_glue_csv(std::ostream& out, const std::vector<GlueReport>& rows);

} // namespace wallenergy
