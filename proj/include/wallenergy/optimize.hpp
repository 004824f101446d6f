#pragma once

#include "wallenergy/errors.hpp"
#include "wallenergy/profile.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace wallenergy {

// A functional of the profile built from the elementary integrals: either a
// fixed linear combination wP*P + wC*C + wD*D, or the scale-free product
// P^{3/4} C^{1/4}. Carrying weights instead of an enum keeps one gradient
// assembly path for every problem in the project.
struct Objective {
    enum class Kind : std::uint8_t { linear, product };

    Kind kind = Kind::linear;
    double w_potential = 0.0;
    double w_curvature = 0.0;
    double w_dirichlet = 0.0;

    static Objective potential() { return {Kind::linear, 1.0, 0.0, 0.0}; }
    static Objective curvature() { return {Kind::linear, 0.0, 1.0, 0.0}; }
    static Objective psi() { return {Kind::linear, 1.0, 1.0, 0.0}; }
    static Objective phi() { return {Kind::product, 0.0, 0.0, 0.0}; }
    // P + D, the first-derivative analogue used as a sanity anchor.
    static Objective first_order() { return {Kind::linear, 1.0, 0.0, 1.0}; }
    static Objective f_eps(double eps);

    double value(const Grid& grid, std::span<const double> dofs) const;
    // Throws phi_singularity_error for the product objective at P=0 or C=0.
    double value_and_gradient(const Grid& grid, std::span<const double> dofs,
                              std::vector<double>& grad) const;
};

struct OptimizerConfig {
    int max_iters = 5000;
    double grad_tol = 1e-8; // infinity norm over the free dofs
    double initial_step = 1.0;
    double backtrack_factor = 0.5;
    double sufficient_decrease = 1e-4;
    int history = 10; // quasi-Newton curvature pairs kept
    int multistart_count = 5;
    std::uint64_t rng_seed = 42;
};

struct OptResult {
    HermiteProfile profile;
    double energy;
    int iterations;
    bool converged;
    double grad_norm;
};

// Thrown when an iteration produces a non-finite energy or gradient; carries
// the last iterate with finite values so callers can inspect how far the
// descent got.
class minimize_failure : public numerical_failure {
public:
    minimize_failure(const std::string& what, OptResult last)
        : numerical_failure(what), last_iterate(std::move(last)) {}
    OptResult last_iterate;
};

// L-BFGS over the free dofs with backtracking line search. Frozen dofs are
// never touched, so the result satisfies bc bit-for-bit. Deterministic given
// (init, cfg). A product objective that is singular at the init point falls
// back to descending psi for up to 50 iterations, then resumes.
OptResult minimize(const Objective& obj, const BoundarySpec& bc,
                   const HermiteProfile& init, const OptimizerConfig& cfg = {});

// minimize from every given init plus (multistart_count - inits.size())
// random C^1 perturbations of the first init (amplitude 0.2, seeded);
// returns the lowest energy, ties broken by earliest start index.
OptResult multistart_minimize(const Objective& obj, const BoundarySpec& bc,
                              const std::vector<HermiteProfile>& inits,
                              const OptimizerConfig& cfg = {});

// Standard initial guesses covering the shapes that show up as minimizers:
// a full-interval smoothstep, a steep ramp in the middle third, and a flat
// bulk with a one-sided boundary layer.
HermiteProfile smoothstep_profile(const Grid& grid, double v_left, double v_right);
HermiteProfile middle_ramp_profile(const Grid& grid, double v_left, double v_right);
HermiteProfile boundary_layer_profile(const Grid& grid, double bulk_value,
                                      double end_value, double width);

} // namespace wallenergy
