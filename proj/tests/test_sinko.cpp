#include <doctest.h>

#include <cmath>

#include "popsteady/errors.hpp"
#include "popsteady/sinko.hpp"
#include "popsteady/stability.hpp"
#include "test_helpers.hpp"

using namespace popsteady;

namespace {

const double kLn2 = std::log(2.0);

SinkoRates canonical() { return sinko_canonical({1.0 / kLn2, 1.0, 1.0}); }

double sup_error_vs_exact(const GridVector& state, const ExactSinkoSolution& exact) {
    double err = 0.0;
    const int fine = 50 * state.grid.n();
    for (int k = 0; k <= fine; ++k) {
        const double x = state.grid.x_max() * k / fine;
        err = std::max(err, std::abs(embed(state, x) - exact(x)));
    }
    return err;
}

} // namespace

TEST_SUITE("sinko") {

TEST_CASE("assemble: 2x2 canonical generator, exact entries") {
    Grid grid(2, 1.0);
    SinkoOperator op = assemble(grid, canonical());
    // x_1 = 0.5, x_2 = 1, dx = 0.5
    CHECK(op.matrix(0, 0) == doctest::Approx(-4.0 + 1.5 / kLn2).epsilon(1e-14));
    CHECK(op.matrix(0, 1) == doctest::Approx(2.0 / kLn2).epsilon(1e-14));
    CHECK(op.matrix(1, 0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(op.matrix(1, 1) == doctest::Approx(-5.0).epsilon(1e-14));
    // four-decimal reference
    CHECK(std::abs(op.matrix(0, 0) - (-1.8359)) < 1e-4);
    CHECK(std::abs(op.matrix(0, 1) - 2.8854) < 1e-4);
}

TEST_CASE("assemble: transport-only generator is a pure shift") {
    SinkoRates r{[](double) { return 0.0; }, [](double) { return 1.0; },
                 [](double) { return 0.0; }};
    Grid grid(3, 3.0);
    SinkoOperator op = assemble(grid, r);
    Matrix expected = Matrix::Zero(3, 3);
    expected.diagonal() << -1, -1, -1;
    expected(1, 0) = 1;
    expected(2, 1) = 1;
    CHECK((op.matrix - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("assemble: column sums telescope to q - mu") {
    Grid grid(17, 1.0);
    SinkoRates r = sinko_canonical({0.9, 1.3, 0.4});
    SinkoOperator op = assemble(grid, r);
    for (int j = 0; j < grid.n(); ++j) {
        const double x = grid.node(j);
        double expected = r.q(x) - r.mu(x);
        if (j == grid.n() - 1) expected -= r.g(x) / grid.dx();
        CHECK(op.matrix.col(j).sum() ==
              doctest::Approx(expected).epsilon(1e-12).scale(std::abs(expected) + 1.0));
    }
}

TEST_CASE("assemble: rate evaluation failures surface") {
    SinkoRates r{[](double) { return 0.0; },
                 [](double x) { return x > 0.9 ? NAN : 1.0; },
                 [](double) { return 0.0; }};
    CHECK_THROWS_AS(assemble(Grid(4, 1.0), r), RateEvaluationError);
}

TEST_CASE("exact_steady_state: canonical closed form 1/(x+1)^2") {
    ExactSinkoSolution exact(canonical(), 1.0);
    CHECK(exact(0.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(exact(1.0) == doctest::Approx(0.25).epsilon(1e-8));
    for (double x : {0.2, 0.5, 0.8}) {
        CHECK(exact(x) == doctest::Approx(1.0 / ((x + 1) * (x + 1))).epsilon(1e-8));
    }
    CHECK(exact_steady_state(canonical(), 0.5, 1.0) ==
          doctest::Approx(1.0 / 2.25).epsilon(1e-8));
}

TEST_CASE("exact_steady_state: constant solution without removal") {
    // mu = 0, g = 1, q = 1 on [0, 1]: the existence integral is exactly 1
    SinkoRates r{[](double) { return 1.0; }, [](double) { return 1.0; },
                 [](double) { return 0.0; }};
    ExactSinkoSolution exact(r, 1.0);
    for (double x : {0.0, 0.3, 1.0}) {
        CHECK(exact(x) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("exact_steady_state: violated existence condition throws") {
    try {
        ExactSinkoSolution exact(sinko_canonical({0.1, 1.0, 1.0}), 1.0);
        FAIL("expected NoSteadyStateError");
    } catch (const NoSteadyStateError& e) {
        CHECK(e.condition_value() == doctest::Approx(0.1 * kLn2).epsilon(1e-8));
    }
}

TEST_CASE("necessary_condition: closed form (a/b) ln(x_max + 1)") {
    CHECK(necessary_condition(canonical(), 1.0) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(necessary_condition(sinko_canonical({2.0 / kLn2, 1.0, 1.0}), 1.0) ==
          doctest::Approx(2.0).epsilon(1e-9));
    SinkoRates none{[](double) { return 0.0; }, [](double x) { return x + 1.0; },
                    [](double) { return 1.0; }};
    CHECK(necessary_condition(none, 1.0) == 0.0);
}

TEST_CASE("steady_state: canonical benchmark at n = 100") {
    Grid grid(100, 1.0);
    SinkoOperator op = assemble(grid, canonical());
    auto state = steady_state(op);
    REQUIRE(state.has_value());
    CHECK(state->positive);
    CHECK(state->seed_index == -1);

    // B = 1 gauge holds on the returned vector
    double b_functional = 0.0;
    for (int i = 0; i < grid.n(); ++i) {
        b_functional += op.rates.q(grid.node(i)) * state->state.coeffs[i];
    }
    CHECK(grid.dx() * b_functional == doctest::Approx(1.0).epsilon(1e-12));

    // near-null residual at the existence threshold
    const double mnorm = op.matrix.norm();
    CHECK(state->residual_norm <= 2e-4 * mnorm * state->state.coeffs.norm());

    // the approximation error against the closed form is at the dx scale
    ExactSinkoSolution exact(canonical(), 1.0);
    const double err = sup_error_vs_exact(state->state, exact);
    CHECK(err < 0.05);
    CHECK(err > 1e-4);
    MESSAGE("n=100 sup error vs closed form: ", err);
}

TEST_CASE("steady_state: linearity of the residual under scaling") {
    Grid grid(60, 1.0);
    SinkoOperator op = assemble(grid, canonical());
    auto state = steady_state(op);
    REQUIRE(state.has_value());
    const Vector& u = state->state.coeffs;
    const double r1 = (op.matrix * u).norm();
    const double r3 = (op.matrix * (3.0 * u)).norm();
    CHECK(r3 == doctest::Approx(3.0 * r1).epsilon(1e-12));

    // any multiple of the stationary solution is stationary: projecting the
    // scaled closed form scales the discrete residual exactly
    ExactSinkoSolution exact(canonical(), 1.0);
    auto pu = project([&](double x) { return exact(x); }, grid, 32);
    auto pu3 = project([&](double x) { return 3.0 * exact(x); }, grid, 32);
    const double res1 = (op.matrix * pu.coeffs).norm();
    const double res3 = (op.matrix * pu3.coeffs).norm();
    CHECK(res3 == doctest::Approx(3.0 * res1).epsilon(1e-10));
}

TEST_CASE("steady_state: none when the existence condition fails") {
    Grid grid(100, 1.0);
    SinkoOperator op = assemble(grid, sinko_canonical({0.1, 1.0, 1.0}));
    CHECK(!steady_state(op).has_value());
}

TEST_CASE("steady_state: degenerate nullspace is an error") {
    Grid grid(2, 1.0);
    SinkoOperator op = assemble(grid, canonical());
    op.matrix = Matrix::Zero(2, 2);
    CHECK_THROWS_AS(steady_state(op), DegenerateNullspaceError);
}

TEST_CASE("convergence: sup error falls at first order in dx") {
    ExactSinkoSolution exact(canonical(), 1.0);
    std::vector<double> ns, errs;
    for (int n : {25, 50, 100, 200}) {
        Grid grid(n, 1.0);
        auto state = steady_state(assemble(grid, canonical()));
        REQUIRE(state.has_value());
        ns.push_back(n);
        errs.push_back(sup_error_vs_exact(state->state, exact));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t k = 0; k < ns.size(); ++k) {
        const double lx = std::log(ns[k]), ly = std::log(errs[k]);
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    const double slope = (ns.size() * sxy - sx * sy) / (ns.size() * sxx - sx * sx);
    MESSAGE("sinko convergence slope: ", slope);
    CHECK(slope < -0.75);
    CHECK(slope > -1.25);
}

TEST_CASE("generator spectrum is stable when q < mu at every node") {
    SinkoRates r = sinko_canonical({0.3, 1.0, 1.0}); // q(x) <= 0.6 < 1 = mu
    for (int n : {10, 50, 100}) {
        SinkoOperator op = assemble(Grid(n, 1.0), r);
        StabilityReport report = classify(op.matrix);
        CHECK(report.classification == Classification::Stable);
    }
}

} // TEST_SUITE
