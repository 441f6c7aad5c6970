#include "popsteady/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

#include "popsteady/errors.hpp"

namespace popsteady {

namespace {

void require_square(const Matrix& m, const char* who) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument(std::string(who) + ": matrix must be square");
    }
    if (!m.allFinite()) {
        throw std::invalid_argument(std::string(who) + ": matrix has non-finite entries");
    }
}

} // namespace

std::vector<Vector> nullspace(const Matrix& m, double rank_tol) {
    require_square(m, "nullspace");
    if (!(rank_tol > 0.0)) {
        throw std::invalid_argument("nullspace: rank_tol must be positive");
    }
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success) {
        throw NumericalError("nullspace: SVD did not converge");
    }
    const auto& sigma = svd.singularValues();
    const double cutoff = rank_tol * (sigma.size() > 0 ? sigma[0] : 0.0);
    std::vector<Vector> basis;
    for (Eigen::Index k = 0; k < sigma.size(); ++k) {
        if (sigma[k] <= cutoff) {
            basis.push_back(svd.matrixV().col(k));
        }
    }
    return basis;
}

Spectrum eigen_spectrum(const Matrix& m) {
    require_square(m, "eigen_spectrum");
    Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigen_spectrum: QR iteration did not converge");
    }
    Spectrum spec;
    const auto& vals = solver.eigenvalues();
    spec.eigenvalues.assign(vals.data(), vals.data() + vals.size());
    std::sort(spec.eigenvalues.begin(), spec.eigenvalues.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  if (a.real() != b.real()) return a.real() > b.real();
                  return a.imag() > b.imag();
              });
    spec.rightmost = spec.eigenvalues.empty() ? std::complex<double>(0.0)
                                              : spec.eigenvalues.front();
    return spec;
}

EigenPairs eigen_pairs(const Matrix& m) {
    require_square(m, "eigen_pairs");
    Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigen_pairs: QR iteration did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

std::vector<GershgorinDisk> gershgorin_columns(const Matrix& m) {
    require_square(m, "gershgorin_columns");
    const Eigen::Index n = m.rows();
    std::vector<GershgorinDisk> disks(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        double radius = m.col(i).cwiseAbs().sum() - std::abs(m(i, i));
        disks[static_cast<size_t>(i)] = {m(i, i), radius};
    }
    return disks;
}

Vector solve_linear(const Matrix& m, const Vector& rhs) {
    require_square(m, "solve_linear");
    if (rhs.size() != m.rows()) {
        throw std::invalid_argument("solve_linear: rhs length mismatch");
    }
    Eigen::PartialPivLU<Matrix> lu(m);
    const double scale = m.cwiseAbs().rowwise().sum().maxCoeff();
    const double pivot_tol = 1e-14 * scale;
    const auto diag = lu.matrixLU().diagonal();
    for (Eigen::Index k = 0; k < diag.size(); ++k) {
        if (std::abs(diag[k]) <= pivot_tol) {
            throw SingularMatrixError(
                static_cast<int>(k),
                "solve_linear: pivot " + std::to_string(k) + " magnitude " +
                    std::to_string(std::abs(diag[k])) + " below tolerance");
        }
    }
    return lu.solve(rhs);
}

} // namespace popsteady
