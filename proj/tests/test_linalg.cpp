#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "popsteady/errors.hpp"
#include "popsteady/linalg.hpp"
#include "popsteady/model.hpp"
#include "popsteady/sinko.hpp"
#include "test_helpers.hpp"

using namespace popsteady;
using test_helpers::random_matrix;

namespace {
const double kLn2 = std::log(2.0);
}

TEST_SUITE("linalg") {

TEST_CASE("nullspace: full-rank matrix gives an empty basis") {
    CHECK(nullspace(Matrix::Identity(3, 3)).empty());
}

TEST_CASE("nullspace: symmetric rank-one matrix") {
    Matrix m(2, 2);
    m << 1, 1, 1, 1;
    auto basis = nullspace(m);
    REQUIRE(basis.size() == 1);
    const Vector& v = basis[0];
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(v[0] + v[1]) <= 1e-12); // direction (1,-1)/sqrt(2)
    CHECK((m * v).norm() <= 1e-12);
}

TEST_CASE("nullspace: residual bound on exactly singular matrices") {
    Matrix m = random_matrix(6);
    m.col(5) = m.col(0) + m.col(3); // forced rank deficiency
    auto basis = nullspace(m);
    REQUIRE(!basis.empty());
    const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
    for (const auto& v : basis) {
        CHECK((m * v).norm() <= 10.0 * 1e-10 * norm);
    }
}

TEST_CASE("nullspace: canonical sinko generator at n = 100 is one-dimensional") {
    // existence of the steady direction at the operator-level threshold
    Grid grid(100, 1.0);
    SinkoOperator op = assemble(grid, sinko_canonical({1.0 / kLn2, 1.0, 1.0}));
    auto basis = nullspace(op.matrix, 2e-4);
    CHECK(basis.size() == 1);
    // far from the existence surface the small singular values disappear
    SinkoOperator off = assemble(grid, sinko_canonical({0.1, 1.0, 1.0}));
    CHECK(nullspace(off.matrix, 2e-4).empty());
}

TEST_CASE("nullspace rejects bad tolerances") {
    CHECK_THROWS_AS(nullspace(Matrix::Identity(2, 2), 0.0), std::invalid_argument);
}

TEST_CASE("eigen_spectrum: diagonal and rotation matrices") {
    Matrix d = Matrix::Zero(3, 3);
    d.diagonal() << -1, -2, -3;
    Spectrum s = eigen_spectrum(d);
    REQUIRE(s.eigenvalues.size() == 3);
    CHECK(s.rightmost.real() == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(s.eigenvalues[1].real() == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(s.eigenvalues[2].real() == doctest::Approx(-3.0).epsilon(1e-14));

    Matrix rot(2, 2);
    rot << 0, -1, 1, 0;
    Spectrum r = eigen_spectrum(rot);
    CHECK(r.rightmost.real() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(std::abs(r.eigenvalues[0].imag()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(r.eigenvalues[1].imag()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.eigenvalues[0].imag() * r.eigenvalues[1].imag() < 0.0);
}

TEST_CASE("eigen_spectrum: 2x2 generator against the characteristic roots") {
    Grid grid(2, 1.0);
    SinkoOperator op = assemble(grid, sinko_canonical({1.0 / kLn2, 1.0, 1.0}));
    const double tr = op.matrix.trace();
    const double det = op.matrix(0, 0) * op.matrix(1, 1) -
                       op.matrix(0, 1) * op.matrix(1, 0);
    const double disc = std::sqrt(tr * tr - 4.0 * det);
    const double lo = 0.5 * (tr - disc), hi = 0.5 * (tr + disc);
    Spectrum s = eigen_spectrum(op.matrix);
    CHECK(s.eigenvalues[0].real() == doctest::Approx(hi).epsilon(1e-10));
    CHECK(s.eigenvalues[1].real() == doctest::Approx(lo).epsilon(1e-10));
    // the rounded reference values
    CHECK(std::abs(s.eigenvalues[0].real() - (-0.0773)) <= 1e-3);
    CHECK(std::abs(s.eigenvalues[1].real() - (-6.7586)) <= 1e-3);
}

TEST_CASE("spectrum invariants: conjugate symmetry, trace, determinant") {
    for (int n = 2; n <= 6; ++n) {
        Matrix m = random_matrix(n, 2.0);
        Spectrum s = eigen_spectrum(m);
        std::complex<double> sum = 0.0, prod = 1.0;
        for (const auto& ev : s.eigenvalues) {
            sum += ev;
            prod *= ev;
            if (std::abs(ev.imag()) > 1e-12) {
                const bool has_conjugate =
                    std::any_of(s.eigenvalues.begin(), s.eigenvalues.end(),
                                [&](const std::complex<double>& other) {
                                    return std::abs(other - std::conj(ev)) <= 1e-9;
                                });
                CHECK(has_conjugate);
            }
        }
        const double scale = std::max(1.0, std::abs(m.trace()));
        CHECK(std::abs(sum.real() - m.trace()) <= 1e-8 * scale);
        CHECK(std::abs(sum.imag()) <= 1e-8 * scale);
        const double det = test_helpers::cofactor_determinant(m);
        CHECK(std::abs(prod.real() - det) <= 1e-8 * std::max(1.0, std::abs(det)));
    }
}

TEST_CASE("eigen_pairs: residual contract") {
    Matrix m = random_matrix(12, 3.0);
    EigenPairs pairs = eigen_pairs(m);
    const double norm = m.norm();
    for (Eigen::Index k = 0; k < pairs.values.size(); ++k) {
        const auto residual =
            (m.cast<std::complex<double>>() * pairs.vectors.col(k) -
             pairs.values[k] * pairs.vectors.col(k))
                .norm();
        CHECK(residual <= 1e-8 * norm);
    }
}

TEST_CASE("gershgorin_columns: identity and the 2x2 generator") {
    auto disks = gershgorin_columns(Matrix::Identity(2, 2));
    for (const auto& d : disks) {
        CHECK(d.center == 1.0);
        CHECK(d.radius == 0.0);
    }

    Grid grid(2, 1.0);
    SinkoOperator op = assemble(grid, sinko_canonical({1.0 / kLn2, 1.0, 1.0}));
    disks = gershgorin_columns(op.matrix);
    CHECK(disks[0].center == doctest::Approx(-4.0 + 1.5 / kLn2).epsilon(1e-12));
    CHECK(disks[0].radius == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(disks[1].center == doctest::Approx(-5.0).epsilon(1e-12));
    CHECK(disks[1].radius == doctest::Approx(2.0 / kLn2).epsilon(1e-12));
}

TEST_CASE("gershgorin containment of the spectrum") {
    for (int trial = 0; trial < 25; ++trial) {
        Matrix m = random_matrix(8, 5.0);
        Spectrum s = eigen_spectrum(m);
        auto disks = gershgorin_columns(m);
        const double slack = 1e-9 * (1.0 + m.cwiseAbs().maxCoeff());
        for (const auto& ev : s.eigenvalues) {
            const bool inside =
                std::any_of(disks.begin(), disks.end(), [&](const GershgorinDisk& d) {
                    return std::abs(ev - std::complex<double>(d.center)) <=
                           d.radius + slack;
                });
            CHECK(inside);
        }
    }
}

TEST_CASE("solve_linear: exact cases and the residual bound") {
    Vector rhs(2);
    rhs << 3, 4;
    Vector x = solve_linear(Matrix::Identity(2, 2), rhs);
    CHECK(x[0] == 3.0);
    CHECK(x[1] == 4.0);

    Matrix d = Matrix::Zero(2, 2);
    d.diagonal() << 2, 4;
    rhs << 2, 8;
    x = solve_linear(d, rhs);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-15));

    Matrix m = random_matrix(50, 1.0) + 10.0 * Matrix::Identity(50, 50);
    Vector b = test_helpers::random_vector(50, -1.0, 1.0);
    Vector sol = solve_linear(m, b);
    CHECK((m * sol - b).norm() <= 1e-10 * (m.norm() * sol.norm() + b.norm()));
}

TEST_CASE("solve_linear: singular matrix reports a pivot index") {
    Matrix m(2, 2);
    m << 0, 1, 0, 2; // zero first column
    Vector rhs(2);
    rhs << 1, 1;
    try {
        solve_linear(m, rhs);
        FAIL("expected SingularMatrixError");
    } catch (const SingularMatrixError& e) {
        CHECK(e.pivot_index() >= 0);
        CHECK(e.pivot_index() < 2);
    }
}

} // TEST_SUITE
