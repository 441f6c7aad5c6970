#pragma once

#include <complex>
#include <vector>

#include "popsteady/grid.hpp"

namespace popsteady {

/// All eigenvalues of a real square matrix. Eigenvalues are sorted by
/// descending real part (ties by descending imaginary part), so
/// eigenvalues.front() == rightmost.
struct Spectrum {
    std::vector<std::complex<double>> eigenvalues;
    std::complex<double> rightmost;
};

/// Column Gershgorin disk: center a_ii, radius sum_{j != i} |a_ji|.
struct GershgorinDisk {
    double center = 0.0;
    double radius = 0.0;
};

/// Eigenvalue/eigenvector pairs (column k of `vectors` pairs with
/// `values[k]`); used where the residual contract ||Av - lv|| matters.
struct EigenPairs {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;
};

/// Orthonormal basis of the numerical nullspace: right singular vectors
/// whose singular values fall below rank_tol * sigma_max. Empty result
/// means full numerical rank. rank_tol is relative (default 1e-10).
std::vector<Vector> nullspace(const Matrix& m, double rank_tol = 1e-10);

/// Full eigen-spectrum of a real square matrix (dense Schur-based solver).
/// Throws NumericalError on non-convergence.
Spectrum eigen_spectrum(const Matrix& m);

/// As eigen_spectrum but also returns eigenvectors.
EigenPairs eigen_pairs(const Matrix& m);

std::vector<GershgorinDisk> gershgorin_columns(const Matrix& m);

/// x with m x = rhs via partially pivoted LU. Throws SingularMatrixError
/// (carrying the failing pivot index) when a pivot magnitude drops below
/// 1e-14 * ||m||_inf.
Vector solve_linear(const Matrix& m, const Vector& rhs);

} // namespace popsteady
