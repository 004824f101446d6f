#include "wallenergy/profile.hpp"

#include "wallenergy/rng.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace wallenergy {

namespace {

void require_finite(const std::vector<double>& xs, const char* what) {
    for (double x : xs)
        if (!std::isfinite(x))
            throw std::invalid_argument(std::string("HermiteProfile: non-finite ") + what);
}

// Cubic Hermite basis on the reference cell s in [0,1]. H10/H11 multiply
// nodal derivatives and carry a factor h at the call sites.
inline void hermite_basis(double s, int order, double out[4]) {
    switch (order) {
    case 0:
        out[0] = 1.0 + s * s * (2.0 * s - 3.0);
        out[1] = s * (1.0 + s * (s - 2.0));
        out[2] = s * s * (3.0 - 2.0 * s);
        out[3] = s * s * (s - 1.0);
        return;
    case 1:
        out[0] = 6.0 * s * (s - 1.0);
        out[1] = 1.0 + s * (3.0 * s - 4.0);
        out[2] = 6.0 * s * (1.0 - s);
        out[3] = s * (3.0 * s - 2.0);
        return;
    default:
        out[0] = 12.0 * s - 6.0;
        out[1] = 6.0 * s - 4.0;
        out[2] = 6.0 - 12.0 * s;
        out[3] = 6.0 * s - 2.0;
        return;
    }
}

} // namespace

Grid::Grid(double lo, double hi, int cells) : x_lo(lo), x_hi(hi), n_cells(cells) {
    if (!(std::isfinite(lo) && std::isfinite(hi)))
        throw std::invalid_argument("Grid: endpoints must be finite");
    if (!(hi > lo))
        throw std::invalid_argument("Grid: x_hi must exceed x_lo");
    if (cells < 1)
        throw std::invalid_argument("Grid: need at least one cell");
}

HermiteProfile::HermiteProfile(Grid grid, std::vector<double> values,
                               std::vector<double> derivs)
    : grid_(grid), values_(std::move(values)), derivs_(std::move(derivs)) {
    const auto n = static_cast<std::size_t>(grid_.n_nodes());
    if (values_.size() != n || derivs_.size() != n)
        throw std::invalid_argument("HermiteProfile: nodal arrays must have n_cells+1 entries");
    require_finite(values_, "nodal value");
    require_finite(derivs_, "nodal derivative");
}

HermiteProfile HermiteProfile::sample(const Grid& grid,
                                      const std::function<double(double)>& f,
                                      const std::function<double(double)>& df) {
    std::vector<double> v(grid.n_nodes()), d(grid.n_nodes());
    for (int i = 0; i < grid.n_nodes(); ++i) {
        v[i] = f(grid.node(i));
        d[i] = df(grid.node(i));
    }
    return HermiteProfile(grid, std::move(v), std::move(d));
}

HermiteProfile HermiteProfile::constant(const Grid& grid, double value) {
    return HermiteProfile(grid, std::vector<double>(grid.n_nodes(), value),
                          std::vector<double>(grid.n_nodes(), 0.0));
}

HermiteProfile HermiteProfile::from_dofs(const Grid& grid,
                                         const std::vector<double>& dofs) {
    if (dofs.size() != 2 * static_cast<std::size_t>(grid.n_nodes()))
        throw std::invalid_argument("from_dofs: expected 2*(n_cells+1) entries");
    std::vector<double> v(grid.n_nodes()), d(grid.n_nodes());
    for (int i = 0; i < grid.n_nodes(); ++i) {
        v[i] = dofs[2 * i];
        d[i] = dofs[2 * i + 1];
    }
    return HermiteProfile(grid, std::move(v), std::move(d));
}

std::vector<double> HermiteProfile::dofs() const {
    std::vector<double> q(2 * values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        q[2 * i] = values_[i];
        q[2 * i + 1] = derivs_[i];
    }
    return q;
}

double HermiteProfile::eval(double x, int order) const {
    if (order < 0 || order > 2)
        throw std::invalid_argument("eval: order must be 0, 1 or 2");
    if (x < grid_.x_lo || x > grid_.x_hi)
        throw std::domain_error("eval: x outside the grid");

    const double h = grid_.h();
    int i = static_cast<int>(std::floor((x - grid_.x_lo) / h));
    // Land exact node hits in the right cell so order 2 reports the right
    // limit; the last node necessarily falls back to the final cell.
    if (i < grid_.n_cells && x >= grid_.node(i + 1))
        ++i;
    if (i < 0)
        i = 0;
    if (i > grid_.n_cells - 1)
        i = grid_.n_cells - 1;

    const double s = (x - grid_.node(i)) / h;
    double H[4];
    hermite_basis(s, order, H);
    const double scale = order == 0 ? 1.0 : (order == 1 ? 1.0 / h : 1.0 / (h * h));
    return scale * (H[0] * values_[i] + h * H[1] * derivs_[i] +
                    H[2] * values_[i + 1] + h * H[3] * derivs_[i + 1]);
}

HermiteProfile HermiteProfile::rescale(double new_lo, double new_hi) const {
    if (!(new_hi > new_lo))
        throw std::invalid_argument("rescale: degenerate target interval");
    const double stretch = (new_hi - new_lo) / grid_.length();
    std::vector<double> d(derivs_);
    for (double& di : d)
        di /= stretch;
    return HermiteProfile(Grid(new_lo, new_hi, grid_.n_cells), values_, std::move(d));
}

HermiteProfile HermiteProfile::refined() const {
    const double h = grid_.h();
    std::vector<double> v(2 * grid_.n_cells + 1), d(v.size());
    double H0[4], H1[4];
    hermite_basis(0.5, 0, H0);
    hermite_basis(0.5, 1, H1);
    for (int i = 0; i < grid_.n_cells; ++i) {
        v[2 * i] = values_[i];
        d[2 * i] = derivs_[i];
        v[2 * i + 1] = H0[0] * values_[i] + h * H0[1] * derivs_[i] +
                       H0[2] * values_[i + 1] + h * H0[3] * derivs_[i + 1];
        d[2 * i + 1] = (H1[0] * values_[i] + h * H1[1] * derivs_[i] +
                        H1[2] * values_[i + 1] + h * H1[3] * derivs_[i + 1]) / h;
    }
    v.back() = values_.back();
    d.back() = derivs_.back();
    return HermiteProfile(Grid(grid_.x_lo, grid_.x_hi, 2 * grid_.n_cells),
                          std::move(v), std::move(d));
}

BoundarySpec BoundarySpec::clamped(double lv, double ld, double rv, double rd) {
    return {lv, ld, rv, rd};
}

BoundarySpec BoundarySpec::values_only(double lv, double rv) {
    return {lv, std::nullopt, rv, std::nullopt};
}

std::vector<std::uint8_t> BoundarySpec::free_mask(int n_nodes) const {
    std::vector<std::uint8_t> mask(2 * n_nodes, 1);
    if (left_value)
        mask[0] = 0;
    if (left_deriv)
        mask[1] = 0;
    if (right_value)
        mask[2 * n_nodes - 2] = 0;
    if (right_deriv)
        mask[2 * n_nodes - 1] = 0;
    return mask;
}

void BoundarySpec::apply(std::vector<double>& dofs) const {
    if (left_value)
        dofs[0] = *left_value;
    if (left_deriv)
        dofs[1] = *left_deriv;
    if (right_value)
        dofs[dofs.size() - 2] = *right_value;
    if (right_deriv)
        dofs[dofs.size() - 1] = *right_deriv;
}

bool BoundarySpec::satisfied_by(const HermiteProfile& p) const {
    if (left_value && p.values().front() != *left_value)
        return false;
    if (left_deriv && p.derivs().front() != *left_deriv)
        return false;
    if (right_value && p.values().back() != *right_value)
        return false;
    if (right_deriv && p.derivs().back() != *right_deriv)
        return false;
    return true;
}

HermiteProfile extend_with_constants(const HermiteProfile& p, int cells_left,
                                     int cells_right, double left_value,
                                     double right_value) {
    if (cells_left < 0 || cells_right < 0)
        throw std::invalid_argument("extend_with_constants: negative cell counts");
    const Grid& g = p.grid();
    const double h = g.h();
    Grid wide(g.x_lo - cells_left * h, g.x_hi + cells_right * h,
              g.n_cells + cells_left + cells_right);
    std::vector<double> v(wide.n_nodes()), d(wide.n_nodes(), 0.0);
    for (int i = 0; i < cells_left; ++i)
        v[i] = left_value;
    for (int i = 0; i < g.n_nodes(); ++i) {
        v[cells_left + i] = p.values()[i];
        d[cells_left + i] = p.derivs()[i];
    }
    for (int i = 0; i < cells_right; ++i)
        v[cells_left + g.n_nodes() + i] = right_value;
    return HermiteProfile(wide, std::move(v), std::move(d));
}

HermiteProfile random_fourier_profile(const Grid& grid, std::uint64_t seed,
                                      int modes, double amplitude) {
    if (modes < 1)
        throw std::invalid_argument("random_fourier_profile: modes must be positive");
    SeededRng rng(seed);
    std::vector<double> a(modes);
    for (int j = 0; j < modes; ++j)
        a[j] = amplitude * rng.uniform(-1.0, 1.0) / ((j + 1.0) * (j + 1.0));

    const double len = grid.length();
    std::vector<double> v(grid.n_nodes(), 0.0), d(grid.n_nodes(), 0.0);
    for (int i = 0; i < grid.n_nodes(); ++i) {
        const double y = (grid.node(i) - grid.x_lo) / len;
        for (int j = 1; j <= modes; ++j) {
            const double w = j * std::numbers::pi;
            v[i] += a[j - 1] * std::cos(w * y);
            d[i] -= a[j - 1] * (w / len) * std::sin(w * y);
        }
    }
    return HermiteProfile(grid, std::move(v), std::move(d));
}

void write_profile_csv(std::ostream& out, const HermiteProfile& p) {
    out << "x,u,du\n";
    char line[128];
    for (int i = 0; i < p.grid().n_nodes(); ++i) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", p.grid().node(i),
                      p.values()[i], p.derivs()[i]);
        out << line;
    }
}

} // namespace wallenergy
