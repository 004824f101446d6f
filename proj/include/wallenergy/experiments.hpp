#pragma once

#include "wallenergy/constants.hpp"
#include "wallenergy/optimize.hpp"
#include "wallenergy/profile.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace wallenergy {

// A two-well step function: the limiting shape the sharp-interface theory
// assigns to minimizers. Only the endpoints of the domain matter; the cell
// count is along for the ride.
struct StepLimit {
    Grid domain{-1.0, 1.0, 1};
    int start_sign = -1; // value just inside the left end
    std::vector<double> jumps; // strictly increasing, strictly interior

    int end_sign() const {
        return jumps.size() % 2 == 0 ? start_sign : -start_sign;
    }
};

// Total variation of the step function: each jump crosses the well gap of
// width 2.
double ess_var(const StepLimit& u);

// The step function's value (+1 or -1) at x; at a jump point the left
// side wins.
double step_value(const StepLimit& u, double x);

using BetaFn = std::function<double(double)>;

// The sharp-interface energy the study expects the eps-problems to approach:
// alpha per unit of variation plus one boundary wall term per endpoint,
// whose argument flips with the adjacent interior sign.
double predicted_limit(const StepLimit& u, double a0, double b0, double alpha,
                       const BetaFn& beta);

// How an endpoint's pinned value moves with eps: value(eps) =
// limit + (v0 - limit) * eps^rate. rate 0 freezes the value at v0.
struct BoundaryRule {
    double v0 = -1.0;
    double rate = 0.0;
};

// Everything a convergence study needs: the domain, the eps ladder, the
// endpoint data with its limits, the resolution policy, and the solver
// budgets for both the eps-problems and the constants they are compared
// against.
struct ExperimentSpec {
    Grid domain{-1.0, 1.0, 1};
    std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025};
    double a0 = -1.0;
    double b0 = 1.0;
    BoundaryRule a_rule{-1.0, 0.0};
    BoundaryRule b_rule{1.0, 0.0};
    int cells_per_layer = 32; // finest layer is resolved by this many cells
    ConstantsConfig constants;
    OptimizerConfig opt;
    double lp = 2.0; // reporting exponent for distances to the step limit

    double a_value(double eps) const;
    double b_value(double eps) const;
};

// Grid for one eps-problem under the spec's resolution policy: cell width
// at most eps / cells_per_layer, so every wall and boundary layer (their
// widths scale like eps or slower) spans the required cell count.
Grid study_grid(const ExperimentSpec& spec, double eps);

// Unconstrained multistart minimization of the eps-weighted energy. Starts
// cover both wells, a one-jump and a two-jump shape; the well constants win
// and the minimum is exactly zero.
OptResult minimize_F(double eps, const Grid& grid,
                     const OptimizerConfig& cfg = {});

// Same energy with the endpoint values pinned to the spec's data at this
// eps (endpoint slopes stay free). eps must be one of spec.epsilons.
OptResult minimize_G(double eps, const ExperimentSpec& spec);

// Width of the interior transition layer that balances the two energy
// terms at this eps for the given unit-interval transition profile: the
// equality case of the weighted AM-GM between (zeta/eps) P and
// (eps/zeta)^3 C.
double layer_width(double eps, const HermiteProfile& h);

// Read the step limit off a computed minimizer: sign at each cell midpoint,
// with sign runs shorter than zeta/2 discarded as numerical chatter and
// exact zeros inheriting the sign to their left.
StepLimit infer_step_limit(const HermiteProfile& p, double zeta);

// The limsup competitor: constants at the wells, the rescaled transition h
// across each jump (width layer_width(eps, h)), and the rescaled half-line
// wall profiles glued to the endpoints (width eps times their length).
// v_left / v_right must be wall profiles whose free end meets
// -a_value(eps) * start_sign respectively -b_value(eps) * end_sign; the
// assembly then matches the pinned values exactly. Throws
// std::invalid_argument naming the offending pair when layers would
// overlap or a boundary layer does not fit.
HermiteProfile recovery_profile(const StepLimit& u, double eps,
                                const HermiteProfile& h,
                                const HermiteProfile& v_left,
                                const HermiteProfile& v_right,
                                const ExperimentSpec& spec);

// Lebesgue measure of {x : ||u(x)| - 1| > threshold}, the part of the
// domain not settled into a well.
double offwell_measure(const HermiteProfile& p, double threshold = 0.1);

// L^p distance between a profile and a step function, 1 <= p <= 4.
double lp_distance(const HermiteProfile& p, const StepLimit& u,
                   double lp = 2.0);

// One eps rung of the study. predicted_alt doubles every boundary wall
// term; the study carries both so the data can settle which normalization
// the limit actually follows. A rung that failed keeps NaN metrics and the
// error text.
struct ConvergenceRecord {
    double eps = 0.0;
    double direct_min = std::numeric_limits<double>::quiet_NaN();
    double recovery_energy = std::numeric_limits<double>::quiet_NaN();
    double predicted = std::numeric_limits<double>::quiet_NaN();
    double predicted_alt = std::numeric_limits<double>::quiet_NaN();
    double rel_gap = std::numeric_limits<double>::quiet_NaN();
    double offwell = std::numeric_limits<double>::quiet_NaN();
    StepLimit inferred;
    std::optional<HermiteProfile> minimizer; // the direct winner, if any
    bool ok = false;
    std::string error;
};

// The full pincer, one record per eps in descending order: minimize with
// pinned endpoints, read off the step limit, assemble the recovery
// competitor for it, and compare both against the sharp-interface
// prediction. The direct minimizer is polished once more from the recovery
// competitor, so direct_min never exceeds recovery_energy beyond roundoff.
// Per-eps failures are recorded and the remaining rungs still run.
std::vector<ConvergenceRecord> convergence_study(const ExperimentSpec& spec);

// One row per record, header
// "eps,direct_min,recovery_energy,predicted,predicted_alt,rel_gap,offwell_measure,inferred_jumps".
// Failed rungs print nan metrics.
void write_convergence_csv(std::ostream& out,
                           const std::vector<ConvergenceRecord>& rows);

} // namespace wallenergy
