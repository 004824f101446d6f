#pragma once

#include "wallenergy/optimize.hpp"
#include "wallenergy/profile.hpp"

#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

namespace wallenergy {

// Resolution and truncation knobs shared by the constant computations. The
// unit-interval problems use n_cells directly; the truncated half-line and
// whole-line problems size their grids as cells_per_unit times the domain
// length, cut off at L_max where the minimizers are flat anyway.
struct ConstantsConfig {
    int n_cells = 512;
    int cells_per_unit = 64;
    double L_max = 12.0;
    OptimizerConfig opt;
};

struct AlphaResult {
    double alpha;
    HermiteProfile minimizer; // transition profile on (0,1)
    OptResult diagnostics;
};

// 2/3^{3/4} times the least product-form energy over transitions on (0,1)
// with u(0)=-1, u(1)=1 and flat ends.
AlphaResult compute_alpha(const ConstantsConfig& cfg = {});

enum class BetaRoute { phi, psi, both };

// One point of the boundary wall-energy curve. Both independent routes are
// carried side by side; a route that was not requested stays NaN.
struct BetaPoint {
    double t = 0.0;
    double beta_phi = std::numeric_limits<double>::quiet_NaN();
    double beta_psi = std::numeric_limits<double>::quiet_NaN();
    double L_max = 0.0;
    bool converged = false;
};

BetaPoint compute_beta(double t, BetaRoute route, const ConstantsConfig& cfg = {});

// Same computation, also exposing the minimizing profiles (for warm starts
// and for the recovery constructions downstream). Optional warm profiles are
// added to the start set after re-pinning their boundary dofs.
struct BetaDetail {
    BetaPoint point;
    std::optional<HermiteProfile> phi_minimizer; // on (0,1)
    std::optional<HermiteProfile> psi_minimizer; // on (-L_max, 0)
};

BetaDetail compute_beta_detail(double t, BetaRoute route,
                               const ConstantsConfig& cfg = {},
                               const HermiteProfile* phi_warm = nullptr,
                               const HermiteProfile* psi_warm = nullptr);

// Least P + C over full transitions on (-L_max, L_max), reported both at the
// configured truncation and at half of it so truncation error is visible.
struct FmResult {
    double c;
    double c_half;
    HermiteProfile minimizer;
};

FmResult compute_fm_constant(const ConstantsConfig& cfg = {});

// Least P + int |u'|^2 over transitions, the first-order wall constant. The
// continuum value is 8/3 with a tanh profile.
struct FirstOrderResult {
    double value;
    HermiteProfile minimizer;
};

FirstOrderResult first_order_constant(const ConstantsConfig& cfg = {});

// compute_beta on a uniform t grid. With warm_start each solve reuses the
// previous point's minimizers as extra starts; without it points are
// independent (and could run concurrently). Per-point optimizer failures
// are recorded in the row (NaN values, converged false) rather than thrown.
std::vector<BetaPoint> beta_curve(double t_min, double t_max, int steps,
                                  const ConstantsConfig& cfg = {},
                                  bool warm_start = true);

// CSV rows "t,beta_phi,beta_psi,L_max,converged".
void write_beta_csv(std::ostream& out, const std::vector<BetaPoint>& pts);

// Summary row for the CLI; fields left empty print as nan.
struct ConstantsReport {
    int n_cells = 0;
    std::optional<double> alpha;
    std::optional<double> c_fm;
    std::optional<double> first_order;
};

// CSV row "n_cells,alpha,c_fm,first_order".
void write_constants_csv(std::ostream& out, const ConstantsReport& r);

} // namespace wallenergy
