#include "wallenergy/glue.hpp"

#include "wallenergy/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace wallenergy {

namespace {

double bump_raw(double s) {
    if (std::abs(s) >= 1.0)
        return 0.0;
    return std::exp(-1.0 / (1.0 - s * s));
}

// d/ds of the bump, zero outside the support like the bump itself.
double bump_raw_deriv(double s) {
    if (std::abs(s) >= 1.0)
        return 0.0;
    const double d = 1.0 - s * s;
    return -2.0 * s / (d * d) * bump_raw(s);
}

// Unit mass of the unnormalized bump on (-1, 1). A 200-point rule puts the
// quadrature error at the last digit; the 64-point rule used per evaluation
// is itself good to ~1e-10 here, so normalization is never the weak link.
double bump_mass() {
    static const double mass = [] {
        GaussRule r = gauss_legendre(200);
        double s = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i)
            s += r.weights[i] * bump_raw(r.nodes[i]);
        return s;
    }();
    return mass;
}

void validate(const GlueSpec& spec) {
    if (!(spec.T > 0.0))
        throw std::invalid_argument("GlueSpec: T must be positive");
    if (spec.samples < 64)
        throw std::invalid_argument("GlueSpec: need at least 64 sample cells");
    if (!std::isfinite(spec.A) || !std::isfinite(spec.m))
        throw std::invalid_argument("GlueSpec: A and m must be finite");
}

// Convolution of the truncated ramp with the radius-eps bump, and its x
// derivative, both as integrals over the ramp's support clipped to the
// kernel window. The kernel vanishes with all derivatives at the window
// edges, so differentiating under the integral needs no boundary terms
// even where the clip is active.
struct Mollified {
    double value;
    double deriv;
};

Mollified eval_glue(const GlueSpec& spec, const GaussRule& rule, double x) {
    const double eps = spec.T / 4.0;
    const double lo = std::max(x - eps, -spec.T / 2.0);
    const double hi = std::min(x + eps, spec.T / 2.0);
    if (!(lo < hi))
        return {0.0, 0.0};

    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double norm = bump_mass() * eps;

    double v = 0.0, dv = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double y = mid + half * rule.nodes[i];
        const double w = half * rule.weights[i];
        const double ramp = spec.m * y + spec.A;
        const double s = (x - y) / eps;
        v += w * ramp * bump_raw(s);
        dv += w * ramp * bump_raw_deriv(s) / eps;
    }
    return {v / norm, dv / norm};
}

// Exact integral of |f^(k)|^2 for the piecewise cubic: a 4-point rule per
// cell covers degree 7, more than the squared value needs.
double derivative_square_integral(const HermiteProfile& p, int k) {
    static const GaussRule rule = gauss_legendre(4);
    const Grid& g = p.grid();
    double total = 0.0;
    for (int c = 0; c < g.n_cells; ++c) {
        const double lo = g.node(c);
        const double mid = lo + 0.5 * g.h();
        const double half = 0.5 * g.h();
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double u = p.eval(mid + half * rule.nodes[i], k);
            total += half * rule.weights[i] * u * u;
        }
    }
    return total;
}

} // namespace

HermiteProfile build_glue(const GlueSpec& spec) {
    validate(spec);
    const GaussRule rule = gauss_legendre(64);
    Grid grid(0.0, spec.T, spec.samples);
    std::vector<double> values(grid.n_nodes());
    std::vector<double> derivs(grid.n_nodes());
    for (int i = 0; i < grid.n_nodes(); ++i) {
        Mollified m = eval_glue(spec, rule, grid.node(i));
        values[i] = m.value;
        derivs[i] = m.deriv;
    }
    return HermiteProfile(grid, std::move(values), std::move(derivs));
}

double glue_bound_ratio(const GlueSpec& spec, int k) {
    validate(spec);
    if (k < 0 || k > 2)
        throw std::invalid_argument("glue_bound_ratio: k must be 0, 1, or 2");
    if (spec.A == 0.0 && spec.m == 0.0)
        throw std::invalid_argument(
            "glue_bound_ratio: undefined for the zero connector");

    HermiteProfile f = build_glue(spec);
    const double scale = (spec.A * spec.A + spec.m * spec.m * spec.T * spec.T) *
                         std::pow(spec.T, 1.0 - 2.0 * k);
    return derivative_square_integral(f, k) / scale;
}

GlueReport glue_report(const GlueSpec& spec) {
    validate(spec);
    GlueReport rep;
    rep.spec = spec;

    const GaussRule rule = gauss_legendre(64);
    Mollified at0 = eval_glue(spec, rule, 0.0);
    Mollified atT = eval_glue(spec, rule, spec.T);
    rep.f0 = at0.value;
    rep.df0 = at0.deriv;
    rep.fT = atT.value;
    rep.dfT = atT.deriv;

    double sup = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double x = spec.T * (i + 0.5) / 200.0;
        sup = std::max(sup, std::abs(eval_glue(spec, rule, x).value));
    }
    rep.sup_f = sup;

    if (spec.A == 0.0 && spec.m == 0.0) {
        rep.ratio_k0 = std::numeric_limits<double>::quiet_NaN();
        rep.ratio_k2 = std::numeric_limits<double>::quiet_NaN();
    } else {
        rep.ratio_k0 = glue_bound_ratio(spec, 0);
        rep.ratio_k2 = glue_bound_ratio(spec, 2);
    }
    return rep;
}

namespace {

void append_field(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    line += buf;
}

} // namespace

void write_glue_csv(std::ostream& out, const std::vector<GlueReport>& rows) {
    out << "A,m,T,f0,df0,fT,dfT,sup_f,ratio_k0,ratio_k2\n";
    for (const auto& r : rows) {
        std::string line;
        const double fields[] = {r.spec.A, r.spec.m, r.spec.T, r.f0,   r.df0,
                                 r.fT,     r.dfT,    r.sup_f,  r.ratio_k0,
                                 r.ratio_k2};
        for (std::size_t i = 0; i < std::size(fields); ++i) {
            if (i)
                line += ',';
            append_field(line, fields[i]);
        }
        line += '\n';
        out << line;
    }
}

} // namespace wallenergy
