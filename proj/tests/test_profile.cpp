#include "doctest.h"

#include "wallenergy/energy.hpp"
#include "wallenergy/profile.hpp"
#include "wallenergy/rng.hpp"

#include <cmath>
#include <sstream>

using namespace wallenergy;

TEST_SUITE("profile") {

TEST_CASE("grid validation and node layout") {
    CHECK_THROWS_AS(Grid(1.0, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(Grid(2.0, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(Grid(0.0, 1.0, 0), std::invalid_argument);

    Grid g(0.0, 1.0, 4);
    CHECK(g.n_nodes() == 5);
    CHECK(g.h() == doctest::Approx(0.25));
    CHECK(g.node(0) == 0.0);
    CHECK(g.node(4) == 1.0);
}

TEST_CASE("constant and linear reproduction") {
    Grid g(0.0, 1.0, 8);
    auto flat = HermiteProfile::constant(g, -1.0);
    CHECK(flat.eval(0.37) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(flat.eval(1.0) == doctest::Approx(-1.0).epsilon(1e-15));

    auto line = HermiteProfile::sample(g, [](double x) { return x; },
                                       [](double) { return 1.0; });
    SeededRng rng(7);
    for (int i = 0; i < 100; ++i) {
        const double x = rng.uniform(0.0, 1.0);
        CHECK(line.eval(x, 0) == doctest::Approx(x).epsilon(1e-14));
        CHECK(line.eval(x, 1) == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("quadratics are reproduced exactly, including second derivatives") {
    Grid g(0.0, 2.0, 4);
    auto p = HermiteProfile::sample(g, [](double x) { return x * x; },
                                    [](double x) { return 2.0 * x; });
    CHECK(p.eval(0.5, 2) == doctest::Approx(2.0).epsilon(1e-12));
    // 0.5 is a node of this grid; the right-limit convention must not change
    // the answer for a globally quadratic interpolant.
    CHECK(p.eval(1.3, 2) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(p.eval(2.0, 2) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("second derivative takes the right limit at interior nodes") {
    // Nodal data engineered so u'' jumps at the middle node.
    Grid g(0.0, 2.0, 2);
    HermiteProfile p(g, {0.0, 0.0, 0.0}, {0.0, 1.0, 0.0});
    const double left = (6.0 * 1.0 - 4.0) * 1.0;   // limit from cell 0 at s=1
    const double right = (6.0 * 0.0 - 4.0) * 1.0;  // limit from cell 1 at s=0
    CHECK(left != right);
    CHECK(p.eval(1.0, 2) == doctest::Approx(right).epsilon(1e-13));
}

TEST_CASE("eval rejects out-of-range input") {
    auto p = HermiteProfile::constant(Grid(0.0, 1.0, 4), 0.0);
    CHECK_THROWS_AS(p.eval(-0.01), std::domain_error);
    CHECK_THROWS_AS(p.eval(1.01), std::domain_error);
    CHECK_THROWS_AS(p.eval(0.5, 3), std::invalid_argument);
    CHECK_THROWS_AS(p.eval(0.5, -1), std::invalid_argument);
}

TEST_CASE("rescale: identity, affine case, derivative scaling") {
    Grid g(0.0, 1.0, 8);
    auto line = HermiteProfile::sample(g, [](double x) { return x; },
                                       [](double) { return 1.0; });

    auto same = line.rescale(0.0, 1.0);
    for (int i = 0; i < g.n_nodes(); ++i) {
        CHECK(same.values()[i] == line.values()[i]);
        CHECK(same.derivs()[i] == line.derivs()[i]);
    }

    auto wide = line.rescale(0.0, 2.0);
    CHECK(wide.grid().n_cells == 8);
    CHECK(wide.eval(1.0) == doctest::Approx(0.5).epsilon(1e-14));
    for (double d : wide.derivs())
        CHECK(d == doctest::Approx(0.5).epsilon(1e-15));

    CHECK_THROWS_AS(line.rescale(1.0, 1.0), std::invalid_argument);
}

TEST_CASE("rescale scaling laws for the two energy integrals") {
    Grid g(0.0, 1.0, 64);
    auto p = random_fourier_profile(g, 123);
    const double P = potential_energy(p);
    const double C = curvature_energy(p);

    const double s = 2.37;
    auto q = p.rescale(0.0, s);
    CHECK(potential_energy(q) == doctest::Approx(s * P).epsilon(1e-10));
    CHECK(curvature_energy(q) == doctest::Approx(C / (s * s * s)).epsilon(1e-10));
}

TEST_CASE("refinement converges at fourth order") {
    auto f = [](double x) { return std::sin(3.0 * x) + 0.5 * std::cos(x); };
    auto df = [](double x) { return 3.0 * std::cos(3.0 * x) - 0.5 * std::sin(x); };

    double prev_err = 0.0;
    std::vector<double> errs;
    for (int n : {16, 32, 64}) {
        auto p = HermiteProfile::sample(Grid(0.0, 1.0, n), f, df);
        SeededRng rng(99);
        double e = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double x = rng.uniform(0.0, 1.0);
            e = std::max(e, std::abs(p.eval(x) - f(x)));
        }
        errs.push_back(e);
        prev_err = e;
    }
    (void)prev_err;
    const double order1 = std::log2(errs[0] / errs[1]);
    const double order2 = std::log2(errs[1] / errs[2]);
    CHECK(order1 >= 3.5);
    CHECK(order2 >= 3.5);
}

TEST_CASE("refined() is an exact embedding") {
    Grid g(-1.0, 2.0, 16);
    auto p = random_fourier_profile(g, 5);
    auto q = p.refined();
    CHECK(q.grid().n_cells == 32);

    SeededRng rng(11);
    for (int i = 0; i < 50; ++i) {
        const double x = rng.uniform(-1.0, 2.0);
        CHECK(q.eval(x) == doctest::Approx(p.eval(x)).epsilon(1e-13));
        CHECK(q.eval(x, 1) == doctest::Approx(p.eval(x, 1)).epsilon(1e-12));
    }
    CHECK(psi(q) == doctest::Approx(psi(p)).epsilon(1e-12));
}

TEST_CASE("dof layout round trip") {
    Grid g(0.0, 1.0, 3);
    HermiteProfile p(g, {1, 2, 3, 4}, {5, 6, 7, 8});
    auto q = p.dofs();
    REQUIRE(q.size() == 8);
    CHECK(q[0] == 1);
    CHECK(q[1] == 5);
    CHECK(q[6] == 4);
    CHECK(q[7] == 8);
    auto back = HermiteProfile::from_dofs(g, q);
    CHECK(back.values() == p.values());
    CHECK(back.derivs() == p.derivs());
}

TEST_CASE("profiles reject malformed nodal data") {
    Grid g(0.0, 1.0, 2);
    CHECK_THROWS_AS(HermiteProfile(g, {1, 2}, {0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(HermiteProfile(g, {1, 2, std::nan("")}, {0, 0, 0}),
                    std::invalid_argument);
}

TEST_CASE("extend_with_constants pads by whole cells") {
    Grid g(-1.0, 1.0, 8);
    auto p = HermiteProfile::sample(g, [](double x) { return x; },
                                    [](double) { return 1.0; });
    auto q = extend_with_constants(p, 4, 2, -1.0, 1.0);
    CHECK(q.grid().n_cells == 14);
    CHECK(q.grid().x_lo == doctest::Approx(-2.0));
    CHECK(q.grid().x_hi == doctest::Approx(1.5));
    CHECK(q.eval(-1.7) == doctest::Approx(-1.0));
    CHECK(q.eval(1.4) == doctest::Approx(1.0));
    CHECK(q.eval(1.4, 1) == doctest::Approx(0.0));
    CHECK(q.eval(0.25) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("boundary spec masks and exact satisfaction") {
    Grid g(0.0, 1.0, 4);
    BoundarySpec bc = BoundarySpec::clamped(-1.0, 0.0, 1.0, 0.0);
    auto mask = bc.free_mask(g.n_nodes());
    REQUIRE(mask.size() == 10);
    CHECK(mask[0] == 0);
    CHECK(mask[1] == 0);
    CHECK(mask[8] == 0);
    CHECK(mask[9] == 0);
    int frozen = 0;
    for (auto m : mask)
        frozen += m == 0;
    CHECK(frozen == 4);

    std::vector<double> dofs(10, 0.5);
    bc.apply(dofs);
    CHECK(dofs[0] == -1.0);
    CHECK(dofs[9] == 0.0);

    auto p = HermiteProfile::from_dofs(g, dofs);
    CHECK(bc.satisfied_by(p));
    dofs[0] = -1.0 + 1e-12;
    CHECK_FALSE(bc.satisfied_by(HermiteProfile::from_dofs(g, dofs)));

    BoundarySpec partial = BoundarySpec::values_only(-1.0, 0.3);
    auto m2 = partial.free_mask(g.n_nodes());
    CHECK(m2[0] == 0);
    CHECK(m2[1] == 1);
    CHECK(m2[8] == 0);
    CHECK(m2[9] == 1);
}

TEST_CASE("profile CSV dump") {
    Grid g(0.0, 1.0, 2);
    HermiteProfile p(g, {0.0, 0.5, 1.0}, {1.0, 1.0, 1.0});
    std::ostringstream out;
    write_profile_csv(out, p);
    const std::string s = out.str();
    CHECK(s.rfind("x,u,du\n", 0) == 0);
    int rows = 0;
    for (char c : s)
        rows += c == '\n';
    CHECK(rows == 4);
}

TEST_CASE("random fourier profiles are seeded and start flat") {
    Grid g(0.0, 2.0, 32);
    auto a = random_fourier_profile(g, 42);
    auto b = random_fourier_profile(g, 42);
    auto c = random_fourier_profile(g, 43);
    CHECK(a.values() == b.values());
    CHECK(a.derivs() == b.derivs());
    CHECK(a.values() != c.values());
    CHECK(a.derivs().front() == 0.0);
    CHECK(a.derivs().back() == doctest::Approx(0.0).epsilon(1e-12));
}

} // TEST_SUITE
