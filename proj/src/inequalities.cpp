#include "wallenergy/inequalities.hpp"

#include "wallenergy/energy.hpp"
#include "wallenergy/errors.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace wallenergy {

namespace {

// Range of u' over the closed domain. The derivative of a Hermite cell is
// quadratic, so besides the nodal values only the vertex of each cell's
// parabola can extend the range, and only when it falls strictly inside
// the cell.
std::pair<double, double> derivative_range(const HermiteProfile& p) {
    const Grid& g = p.grid();
    const std::vector<double>& v = p.values();
    const std::vector<double>& d = p.derivs();

    double lo = d[0], hi = d[0];
    for (int i = 1; i < g.n_nodes(); ++i) {
        lo = std::min(lo, d[i]);
        hi = std::max(hi, d[i]);
    }
    for (int cell = 0; cell < g.n_cells; ++cell) {
        const double h = g.node(cell + 1) - g.node(cell);
        const double m0 = h * d[cell], m1 = h * d[cell + 1];
        const double dv = v[cell] - v[cell + 1];
        // u'(s)/h on the reference cell is a s^2 + b s + c.
        const double a = 6.0 * dv + 3.0 * (m0 + m1);
        const double b = -6.0 * dv - 4.0 * m0 - 2.0 * m1;
        if (a == 0.0)
            continue;
        const double s = -b / (2.0 * a);
        if (s <= 0.0 || s >= 1.0)
            continue;
        const double q = ((a * s + b) * s + m0) / h;
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    return {lo, hi};
}

void append_field(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    line += buf;
}

} // namespace

double inter1_ratio(const HermiteProfile& p) {
    const auto [lo, hi] = derivative_range(p);
    if (lo > 0.0 || hi < 0.0)
        throw std::domain_error(
            "inter1_ratio: u' never vanishes on the domain, the bound does "
            "not apply");
    const double mass = l2_squared(p);
    const double curv = curvature_energy(p);
    if (mass <= 0.0 || curv <= 0.0)
        throw std::domain_error(
            "inter1_ratio: degenerate profile, the comparison quantity "
            "(int u^2)^{1/2} (int |u''|^2)^{1/2} vanishes");
    return gradient_energy(p) / std::sqrt(mass * curv);
}

double inter2_ratio(const HermiteProfile& p, double l) {
    if (!(l > 0.0) || !(l < p.grid().length()))
        throw std::invalid_argument(
            "inter2_ratio: l must lie strictly between 0 and the domain "
            "length");
    const double denom = std::sqrt(l2_squared(p)) / l +
                         l * std::sqrt(curvature_energy(p));
    if (denom == 0.0)
        throw std::invalid_argument(
            "inter2_ratio: the zero profile has no scale to compare "
            "against");
    return std::sqrt(gradient_energy(p)) / denom;
}

std::vector<RatioSample>
inter3_check(const std::vector<std::pair<HermiteProfile, double>>& seq,
             double inner_margin) {
    for (const auto& [p, eps] : seq) {
        if (!(inner_margin > 0.0) ||
            !(inner_margin < 0.5 * p.grid().length()))
            throw std::invalid_argument(
                "inter3_check: inner_margin must lie strictly between 0 and "
                "half the domain length");
        if (!(eps > 0.0))
            throw std::invalid_argument("inter3_check: eps must be positive");
    }

    std::vector<RatioSample> out;
    out.reserve(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const auto& [p, eps] = seq[i];
        const Grid& g = p.grid();
        RatioSample s;
        char name[32];
        std::snprintf(name, sizeof name, "inter3[%zu]", i);
        s.name = name;
        s.seed = i;
        s.lhs = eps * gradient_energy_on(p, g.x_lo + inner_margin,
                                         g.x_hi - inner_margin);
        s.rhs = f_eps(p, eps);
        if (s.rhs == 0.0) {
            // A vanishing energy pins the profile to a well, so the inner
            // Dirichlet term vanishes with it.
            if (s.lhs != 0.0)
                throw numerical_failure(
                    "inter3_check: zero energy with nonzero inner "
                    "Dirichlet term");
            s.ratio = 0.0;
        } else {
            s.ratio = s.lhs / s.rhs;
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<RatioSample> inter1_sweep(const Grid& grid, int count,
                                      std::uint64_t base_seed) {
    if (count < 1)
        throw std::invalid_argument("inter1_sweep: count must be positive");
    std::vector<RatioSample> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
        const HermiteProfile p = random_fourier_profile(grid, seed);
        RatioSample s;
        s.name = "inter1";
        s.seed = seed;
        s.lhs = gradient_energy(p);
        s.rhs = std::sqrt(l2_squared(p) * curvature_energy(p));
        s.ratio = inter1_ratio(p);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<RatioSample> inter2_sweep(const Grid& grid, int count,
                                      std::uint64_t base_seed) {
    if (count < 1)
        throw std::invalid_argument("inter2_sweep: count must be positive");
    std::vector<RatioSample> out;
    out.reserve(static_cast<std::size_t>(count) * 9);
    for (int i = 0; i < count; ++i) {
        const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
        const HermiteProfile p = random_fourier_profile(grid, seed);
        const double num = std::sqrt(gradient_energy(p));
        const double mass = std::sqrt(l2_squared(p));
        const double curv = std::sqrt(curvature_energy(p));
        for (int tenth = 1; tenth <= 9; ++tenth) {
            const double l = 0.1 * tenth * grid.length();
            RatioSample s;
            char name[32];
            std::snprintf(name, sizeof name, "inter2[l/L=0.%d]", tenth);
            s.name = name;
            s.seed = seed;
            s.lhs = num;
            s.rhs = mass / l + l * curv;
            s.ratio = inter2_ratio(p, l);
            out.push_back(std::move(s));
        }
    }
    return out;
}

void write_ratio_csv(std::ostream& out, const std::vector<RatioSample>& rows) {
    out << "name,seed,lhs,rhs,ratio\n";
    for (const RatioSample& r : rows) {
        std::string line = r.name;
        line += ',';
        line += std::to_string(r.seed);
        for (double v : {r.lhs, r.rhs, r.ratio}) {
            line += ',';
            append_field(line, v);
        }
        line += '\n';
        out << line;
    }
}

} // namespace wallenergy
