#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "popsteady/errors.hpp"
#include "popsteady/grid.hpp"
#include "popsteady/quadrature.hpp"
#include "test_helpers.hpp"

using namespace popsteady;

TEST_SUITE("grid") {

TEST_CASE("construction invariants") {
    Grid g(7, 2.5);
    CHECK(g.dx() * g.n() == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(g.node(g.n() - 1) == doctest::Approx(2.5).epsilon(1e-15));
    for (int i = 1; i < g.n(); ++i) CHECK(g.node(i) > g.node(i - 1));
    CHECK_THROWS_AS(Grid(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid(4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid(4, -1.0), std::invalid_argument);
}

TEST_CASE("project: constant function is its own cell average") {
    Grid g(4, 1.0);
    auto v = project([](double) { return 1.0; }, g);
    for (int i = 0; i < 4; ++i) CHECK(v.coeffs[i] == 1.0);
}

TEST_CASE("project: linear function, exact averages") {
    Grid g(2, 1.0);
    auto v = project([](double x) { return x; }, g);
    CHECK(v.coeffs[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(v.coeffs[1] == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("project: cell averages of 1/(x+1)^2 against the antiderivative") {
    Grid g(100, 1.0);
    auto f = [](double x) { return 1.0 / ((x + 1.0) * (x + 1.0)); };
    // the closed-form average over cell j is (1/(x_l+1) - 1/(x_r+1)) / dx
    auto exact_avg = [&](int j) {
        const double xl = g.left(j), xr = g.node(j);
        return (1.0 / (xl + 1.0) - 1.0 / (xr + 1.0)) / g.dx();
    };
    auto fine = project(f, g, 1024);
    double worst_fine = 0.0;
    for (int j = 0; j < g.n(); ++j) {
        worst_fine = std::max(worst_fine, std::abs(fine.coeffs[j] - exact_avg(j)));
    }
    CHECK(worst_fine <= 1e-10);

    auto coarse = project(f, g); // default 8 subpoints
    double worst_coarse = 0.0;
    for (int j = 0; j < g.n(); ++j) {
        worst_coarse = std::max(worst_coarse, std::abs(coarse.coeffs[j] - exact_avg(j)));
    }
    CHECK(worst_coarse <= 1e-5);
}

TEST_CASE("project: non-finite sample names the cell") {
    Grid g(4, 1.0);
    auto f = [](double x) { return x > 0.5 && x < 0.75 ? NAN : 1.0; };
    CHECK_THROWS_WITH_AS(project(f, g), doctest::Contains("cell 2"),
                         RateEvaluationError);
}

TEST_CASE("embed: cell membership and boundary convention") {
    Grid g(2, 1.0);
    GridVector v(g, (Vector(2) << 2.0, 5.0).finished());
    CHECK(embed(v, 0.3) == 2.0);
    CHECK(embed(v, 0.5) == 2.0); // cells are left-open, right-closed
    CHECK(embed(v, 0.50001) == 5.0);
    CHECK(embed(v, 0.0) == 2.0);
    CHECK(embed(v, 1.0) == 5.0);
    CHECK_THROWS_AS(embed(v, -0.1), std::domain_error);
    CHECK_THROWS_AS(embed(v, 1.1), std::domain_error);
}

TEST_CASE("project after embed is the identity on coefficients") {
    Grid g(9, 2.0);
    GridVector w(g, test_helpers::random_vector(9, -3.0, 3.0));
    auto f = [&](double x) { return embed(w, x); };
    auto one = project(f, g, 1); // single midpoint sample, bit-exact
    for (int i = 0; i < g.n(); ++i) CHECK(one.coeffs[i] == w.coeffs[i]);
    auto eight = project(f, g, 8); // averaging identical values, ulp-level only
    for (int i = 0; i < g.n(); ++i) {
        CHECK(eight.coeffs[i] == doctest::Approx(w.coeffs[i]).epsilon(1e-15));
    }
}

TEST_CASE("moments: displayed formulas") {
    Grid g2(2, 1.0);
    auto [m0, m1] = moments(GridVector(g2, Vector::Constant(2, 1.0)));
    CHECK(m0 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m1 == doctest::Approx(0.5).epsilon(1e-15));

    auto [z0, z1] = moments(GridVector(g2, Vector::Zero(2)));
    CHECK(z0 == 0.0);
    CHECK(z1 == 0.0);

    Grid g4(4, 1.0);
    Vector last = Vector::Zero(4);
    last[3] = 1.0;
    auto [l0, l1] = moments(GridVector(g4, last));
    CHECK(l0 == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(l1 == doctest::Approx(0.21875).epsilon(1e-15));
}

TEST_CASE("moments of projections converge to the integrals at first order") {
    auto f = [](double x) { return 1.0 / ((x + 1.0) * (x + 1.0)); };
    const double i0 = 0.5;                   // int f
    const double i1 = std::log(2.0) - 0.5;   // int x f
    double err100, err200;
    {
        Grid g(100, 1.0);
        auto [m0, m1] = moments(project(f, g, 64));
        err100 = std::abs(m0 - i0) + std::abs(m1 - i1);
    }
    {
        Grid g(200, 1.0);
        auto [m0, m1] = moments(project(f, g, 64));
        err200 = std::abs(m0 - i0) + std::abs(m1 - i1);
    }
    // at least first order (for this smooth f the midpoint pairing is
    // actually second order, so the ratio lands near 4)
    CHECK(err100 / err200 > 1.8);
    CHECK(err100 < 1e-4);
}

TEST_CASE("L1 norm of the embedded function equals dx * sum |a_i|") {
    Grid g(11, 1.0);
    GridVector v(g, test_helpers::random_vector(11, -2.0, 2.0));
    const double direct = g.dx() * v.coeffs.cwiseAbs().sum();
    // midpoint samples never hit a cell boundary, so the quadrature is exact
    const double integrated = composite_midpoint(
        [&](double x) { return std::abs(embed(v, x)); }, 0.0, 1.0, 3 * g.n());
    CHECK(integrated == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("GridVector length must match the grid") {
    Grid g(4, 1.0);
    CHECK_THROWS_AS(GridVector(g, Vector::Zero(3)), std::invalid_argument);
}

} // TEST_SUITE
