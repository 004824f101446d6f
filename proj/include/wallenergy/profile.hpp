#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace wallenergy {

// Uniform 1-D grid on [x_lo, x_hi].
struct Grid {
    double x_lo;
    double x_hi;
    int n_cells;

    Grid(double lo, double hi, int cells);

    double length() const { return x_hi - x_lo; }
    double h() const { return (x_hi - x_lo) / n_cells; }
    int n_nodes() const { return n_cells + 1; }
    double node(int i) const { return x_lo + i * h(); }

    bool operator==(const Grid&) const = default;
};

// C^1 piecewise cubic determined by nodal values and nodal first
// derivatives (cubic Hermite interpolation). The second derivative is
// piecewise linear and may jump at nodes, which keeps the represented
// function in W^{2,inf}. Immutable after construction; every operation
// returns a new profile.
//
// Flat degree-of-freedom layout used throughout the optimizer and the
// gradient assembly: dof[2i] is the value at node i, dof[2i+1] the
// derivative at node i.
class HermiteProfile {
public:
    HermiteProfile(Grid grid, std::vector<double> values,
                   std::vector<double> derivs);

    static HermiteProfile sample(const Grid& grid,
                                 const std::function<double(double)>& f,
                                 const std::function<double(double)>& df);
    static HermiteProfile constant(const Grid& grid, double value);
    static HermiteProfile from_dofs(const Grid& grid,
                                    const std::vector<double>& dofs);

    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& derivs() const { return derivs_; }
    std::vector<double> dofs() const;

    // Interpolant value (order 0), first derivative (1), or second
    // derivative (2) at x. Order 2 is piecewise linear with jumps at the
    // nodes; an x exactly on an interior node reports the right limit.
    double eval(double x, int order = 0) const;

    // The same function carried to [new_lo, new_hi] by the affine change of
    // variables; nodal derivatives pick up the inverse stretch factor.
    HermiteProfile rescale(double new_lo, double new_hi) const;

    // Same function on a grid with doubled n_cells. Cubic midpoint data is
    // interpolated exactly, so this is an embedding: every energy of the
    // result matches the original to roundoff.
    HermiteProfile refined() const;

private:
    Grid grid_;
    std::vector<double> values_;
    std::vector<double> derivs_;
};

// Which endpoint degrees of freedom an optimization run pins, and to what.
// A present field freezes that nodal dof at the given value.
struct BoundarySpec {
    std::optional<double> left_value;
    std::optional<double> left_deriv;
    std::optional<double> right_value;
    std::optional<double> right_deriv;

    static BoundarySpec none() { return {}; }
    static BoundarySpec clamped(double lv, double ld, double rv, double rd);
    static BoundarySpec values_only(double lv, double rv);

    // 1 for free dofs, 0 for frozen, in the flat dof layout.
    std::vector<std::uint8_t> free_mask(int n_nodes) const;

    // Overwrite the frozen entries of a flat dof vector.
    void apply(std::vector<double>& dofs) const;

    // Exact (bitwise) agreement of the pinned entries.
    bool satisfied_by(const HermiteProfile& p) const;
};

// Grow the domain by whole cells on either side, filling the new nodes with
// the given constants (derivative 0). Cell width is preserved exactly.
HermiteProfile extend_with_constants(const HermiteProfile& p, int cells_left,
                                     int cells_right, double left_value,
                                     double right_value);

// Smooth random test profile: a low-pass cosine series
//   u(x) = sum_{j=1..modes} a_j cos(j pi (x - x_lo) / length),  a_j ~ U[-1,1]/j^2,
// sampled with exact derivatives. By construction u'(x_lo) = u'(x_hi) = 0.
HermiteProfile random_fourier_profile(const Grid& grid, std::uint64_t seed,
                                      int modes = 8, double amplitude = 1.0);

// One row per node, header "x,u,du".
void write_profile_csv(std::ostream& out, const HermiteProfile& p);

} // namespace wallenergy
