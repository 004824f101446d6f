#include "wallenergy/constants.hpp"

#include "wallenergy/energy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace wallenergy {

namespace {

constexpr double kThreeToThreeQuarters = 2.2795070569547775; // 3^{3/4}
constexpr double kAlphaPrefactor = 2.0 / kThreeToThreeQuarters;
constexpr double kBetaPrefactor = 4.0 / kThreeToThreeQuarters;

void validate(const ConstantsConfig& cfg) {
    if (cfg.n_cells < 1 || cfg.cells_per_unit < 1)
        throw std::invalid_argument("ConstantsConfig: cell counts must be >= 1");
    if (!(cfg.L_max > 0.0))
        throw std::invalid_argument("ConstantsConfig: L_max must be positive");
}

// Number of halvings that keep the cell count integral and the coarse level
// at a workable size.
int ladder_levels(int n_cells) {
    int k = 0;
    while (n_cells % 2 == 0 && n_cells / 2 >= 32) {
        n_cells /= 2;
        ++k;
    }
    return k;
}

using InitBuilder = std::function<std::vector<HermiteProfile>(const Grid&)>;

// Solve on a coarse grid first and follow the minimizer up through exact
// midpoint refinements. Cold starts on fine grids crawl (the curvature term
// scales like 1/h^3), while a prolonged coarse minimizer is already in the
// right basin and polishes in a few hundred iterations. Extra fine-grid
// starts (e.g. a padded smaller-domain minimizer) join at the last level.
OptResult solve_with_continuation(const Objective& obj, const BoundarySpec& bc,
                                  const Grid& fine, const InitBuilder& make_inits,
                                  const OptimizerConfig& opt,
                                  const std::vector<HermiteProfile>* fine_extra = nullptr) {
    const int levels = ladder_levels(fine.n_cells);
    Grid coarse(fine.x_lo, fine.x_hi, fine.n_cells >> levels);

    std::vector<HermiteProfile> coarse_inits = make_inits(coarse);
    if (levels == 0 && fine_extra)
        for (const auto& p : *fine_extra)
            coarse_inits.push_back(p);
    OptResult cur = multistart_minimize(obj, bc, coarse_inits, opt);

    for (int lvl = 1; lvl <= levels; ++lvl) {
        std::vector<HermiteProfile> starts = {cur.profile.refined()};
        if (lvl == levels && fine_extra)
            for (const auto& p : *fine_extra)
                starts.push_back(p);
        OptimizerConfig polish = opt;
        polish.multistart_count = 1; // no random starts beyond the given ones
        cur = multistart_minimize(obj, bc, starts, polish);
    }
    return cur;
}

std::vector<HermiteProfile> transition_inits(const Grid& g, double v_left,
                                             double v_right) {
    return {smoothstep_profile(g, v_left, v_right),
            middle_ramp_profile(g, v_left, v_right)};
}

} // namespace

AlphaResult compute_alpha(const ConstantsConfig& cfg) {
    validate(cfg);
    Grid fine(0.0, 1.0, cfg.n_cells);
    BoundarySpec bc = BoundarySpec::clamped(-1.0, 0.0, 1.0, 0.0);
    OptResult r = solve_with_continuation(
        Objective::phi(), bc, fine,
        [](const Grid& g) { return transition_inits(g, -1.0, 1.0); }, cfg.opt);
    return {kAlphaPrefactor * r.energy, r.profile, r};
}

namespace {

// Re-pin a profile's boundary dofs so it is admissible for the given spec;
// used when a neighboring solve's minimizer seeds the current one.
HermiteProfile repinned(const HermiteProfile& p, const BoundarySpec& bc) {
    auto dofs = p.dofs();
    bc.apply(dofs);
    return HermiteProfile::from_dofs(p.grid(), dofs);
}

OptResult solve_beta_phi(double t, const ConstantsConfig& cfg,
                         const HermiteProfile* warm) {
    Grid fine(0.0, 1.0, cfg.n_cells);
    BoundarySpec bc;
    bc.left_value = -1.0;
    bc.left_deriv = 0.0;
    bc.right_value = t; // right-end slope stays free
    std::vector<HermiteProfile> extra;
    if (warm && warm->grid().n_cells == fine.n_cells)
        extra.push_back(repinned(*warm, bc));
    return solve_with_continuation(
        Objective::phi(), bc, fine,
        [&](const Grid& g) { return transition_inits(g, -1.0, t); }, cfg.opt,
        extra.empty() ? nullptr : &extra);
}

OptResult solve_beta_psi(double t, const ConstantsConfig& cfg,
                         const HermiteProfile* warm) {
    const double L = cfg.L_max;
    Grid fine(-L, 0.0, std::max(1, static_cast<int>(std::lround(L * cfg.cells_per_unit))));
    BoundarySpec bc;
    bc.left_value = -1.0;
    bc.left_deriv = 0.0;
    bc.right_value = t; // slope at 0 free
    std::vector<HermiteProfile> extra;
    if (warm && warm->grid().n_cells == fine.n_cells)
        extra.push_back(repinned(*warm, bc));
    auto inits = [&](const Grid& g) {
        std::vector<HermiteProfile> v = {
            boundary_layer_profile(g, -1.0, t, std::min(5.0, g.length())),
            smoothstep_profile(g, -1.0, t)};
        return v;
    };
    return solve_with_continuation(Objective::psi(), bc, fine, inits, cfg.opt,
                                   extra.empty() ? nullptr : &extra);
}

} // namespace

BetaDetail compute_beta_detail(double t, BetaRoute route, const ConstantsConfig& cfg,
                               const HermiteProfile* phi_warm,
                               const HermiteProfile* psi_warm) {
    validate(cfg);
    BetaDetail out;
    out.point.t = t;
    out.point.L_max = cfg.L_max;

    if (t == -1.0) {
        // The constant profile is admissible and gives zero in both forms;
        // nothing beats zero, so skip the optimizer entirely.
        if (route == BetaRoute::phi || route == BetaRoute::both) {
            out.point.beta_phi = 0.0;
            out.phi_minimizer = HermiteProfile::constant(Grid(0.0, 1.0, cfg.n_cells), -1.0);
        }
        if (route == BetaRoute::psi || route == BetaRoute::both) {
            out.point.beta_psi = 0.0;
            const int n = std::max(1, static_cast<int>(std::lround(cfg.L_max * cfg.cells_per_unit)));
            out.psi_minimizer =
                HermiteProfile::constant(Grid(-cfg.L_max, 0.0, n), -1.0);
        }
        out.point.converged = true;
        return out;
    }

    bool converged = true;
    if (route == BetaRoute::phi || route == BetaRoute::both) {
        OptResult r = solve_beta_phi(t, cfg, phi_warm);
        out.point.beta_phi = kBetaPrefactor * r.energy;
        out.phi_minimizer = r.profile;
        converged = converged && r.converged;
    }
    if (route == BetaRoute::psi || route == BetaRoute::both) {
        OptResult r = solve_beta_psi(t, cfg, psi_warm);
        out.point.beta_psi = r.energy;
        out.psi_minimizer = r.profile;
        converged = converged && r.converged;
    }
    out.point.converged = converged;
    return out;
}

BetaPoint compute_beta(double t, BetaRoute route, const ConstantsConfig& cfg) {
    return compute_beta_detail(t, route, cfg).point;
}

FmResult compute_fm_constant(const ConstantsConfig& cfg) {
    validate(cfg);
    BoundarySpec bc = BoundarySpec::clamped(-1.0, 0.0, 1.0, 0.0);
    auto cells_for = [&](double length) {
        return std::max(2, static_cast<int>(std::lround(length * cfg.cells_per_unit)));
    };

    const double Lh = 0.5 * cfg.L_max;
    Grid half_grid(-Lh, Lh, cells_for(2.0 * Lh));
    OptResult half = solve_with_continuation(
        Objective::psi(), bc, half_grid,
        [](const Grid& g) { return transition_inits(g, -1.0, 1.0); }, cfg.opt);

    // The half-domain minimizer, extended by resting states, is admissible
    // on the full domain with the same energy; feeding it in guarantees the
    // wider problem never reports a larger value.
    const int pad = (half_grid.n_cells + 1) / 2;
    HermiteProfile padded = extend_with_constants(half.profile, pad, pad, -1.0, 1.0);
    Grid full_grid(-cfg.L_max, cfg.L_max, cells_for(2.0 * cfg.L_max));
    std::vector<HermiteProfile> extra;
    if (padded.grid().n_cells == full_grid.n_cells)
        extra.push_back(padded);

    OptResult full = solve_with_continuation(
        Objective::psi(), bc, full_grid,
        [](const Grid& g) { return transition_inits(g, -1.0, 1.0); }, cfg.opt,
        extra.empty() ? nullptr : &extra);

    return {full.energy, half.energy, full.profile};
}

FirstOrderResult first_order_constant(const ConstantsConfig& cfg) {
    validate(cfg);
    Grid fine(-cfg.L_max, cfg.L_max,
              std::max(2, static_cast<int>(std::lround(2.0 * cfg.L_max * cfg.cells_per_unit))));
    BoundarySpec bc = BoundarySpec::values_only(-1.0, 1.0);
    OptResult r = solve_with_continuation(
        Objective::first_order(), bc, fine,
        [](const Grid& g) { return transition_inits(g, -1.0, 1.0); }, cfg.opt);
    return {r.energy, r.profile};
}

std::vector<BetaPoint> beta_curve(double t_min, double t_max, int steps,
                                  const ConstantsConfig& cfg, bool warm_start) {
    validate(cfg);
    if (steps < 2)
        throw std::invalid_argument("beta_curve: need at least 2 steps");
    if (!(t_min < t_max))
        throw std::invalid_argument("beta_curve: t_min must be below t_max");

    std::vector<BetaPoint> out;
    out.reserve(steps);
    std::optional<HermiteProfile> prev_phi, prev_psi;
    for (int i = 0; i < steps; ++i) {
        const double t = t_min + (i * (t_max - t_min)) / (steps - 1);
        try {
            BetaDetail d = compute_beta_detail(
                t, BetaRoute::both, cfg,
                warm_start && prev_phi ? &*prev_phi : nullptr,
                warm_start && prev_psi ? &*prev_psi : nullptr);
            out.push_back(d.point);
            prev_phi = std::move(d.phi_minimizer);
            prev_psi = std::move(d.psi_minimizer);
        } catch (const numerical_failure&) {
            BetaPoint bad;
            bad.t = t;
            bad.L_max = cfg.L_max;
            out.push_back(bad);
            prev_phi.reset();
            prev_psi.reset();
        }
    }
    return out;
}

namespace {

void append_field(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    line += buf;
}

} // namespace

void write_beta_csv(std::ostream& out, const std::vector<BetaPoint>& pts) {
    out << "t,beta_phi,beta_psi,L_max,converged\n";
    for (const auto& p : pts) {
        std::string line;
        append_field(line, p.t);
        line += ',';
        append_field(line, p.beta_phi);
        line += ',';
        append_field(line, p.beta_psi);
        line += ',';
        append_field(line, p.L_max);
        line += ',';
        line += p.converged ? '1' : '0';
        line += '\n';
        out << line;
    }
}

void write_constants_csv(std::ostream& out, const ConstantsReport& r) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out << "n_cells,alpha,c_fm,first_order\n";
    std::string line = std::to_string(r.n_cells);
    line += ',';
    append_field(line, r.alpha.value_or(nan));
    line += ',';
    append_field(line, r.c_fm.value_or(nan));
    line += ',';
    append_field(line, r.first_order.value_or(nan));
    line += '\n';
    out << line;
}

} // namespace wallenergy
