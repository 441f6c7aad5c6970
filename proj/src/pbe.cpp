#include "popsteady/pbe.hpp"

#include <cmath>
#include <string>

#include "popsteady/errors.hpp"
#include "popsteady/sinko.hpp"

namespace popsteady {

PBEOperator::PBEOperator(const Grid& grid, const PBERates& rates)
    : grid_(grid), rates_(rates), gn_(assemble(grid, rates.transport()).matrix) {
    const int n = grid_.n();
    const double dx = grid_.dx();

    agg_.resize(n, n);
    for (int i = 0; i < n; ++i) {
        const double xi = grid_.node(i);
        for (int j = 0; j <= i; ++j) {
            const double w = rates_.ka(xi, grid_.node(j)) * dx;
            if (!std::isfinite(w)) {
                throw RateEvaluationError("ka non-finite at (" + std::to_string(xi) +
                                          ", " + std::to_string(grid_.node(j)) + ")");
            }
            agg_(i, j) = w;
            agg_(j, i) = w;
        }
    }

    frag_ = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        const double xj = grid_.node(j);
        const double kfj = rates_.kf(xj);
        if (!std::isfinite(kfj)) {
            throw RateEvaluationError("kf non-finite at " + std::to_string(xj));
        }
        frag_(j, j) = -0.5 * kfj;
        for (int i = 0; i < j; ++i) {
            const double gam = rates_.gamma(grid_.node(i), xj);
            if (!std::isfinite(gam)) {
                throw RateEvaluationError("gamma non-finite at (" +
                                          std::to_string(grid_.node(i)) + ", " +
                                          std::to_string(xj) + ")");
            }
            frag_(i, j) = gam * kfj * dx;
        }
    }
}

Vector PBEOperator::apply_aggregation(const Vector& u) const {
    const int n = grid_.n();
    Vector out(n);
    for (int r = 0; r < n; ++r) {
        // gain: 0-based index pairs (s, r-1-s) merge into class r
        double gain = 0.0;
        for (int s = 0; s < r; ++s) {
            gain += agg_(s, r - 1 - s) * u[s] * u[r - 1 - s];
        }
        // loss: partners up to the largest class that still fits in [0, x_max]
        double loss = 0.0;
        const int partners = n - r - 1;
        for (int s = 0; s < partners; ++s) {
            loss += agg_(r, s) * u[s];
        }
        out[r] = 0.5 * gain - u[r] * loss;
    }
    return out;
}

Vector PBEOperator::apply_breakage(const Vector& u) const { return frag_ * u; }

Vector PBEOperator::apply(const Vector& u) const {
    Vector out = gn_ * u;
    out += frag_ * u;
    out += apply_aggregation(u);
    return out;
}

Matrix PBEOperator::jacobian(const Vector& u) const {
    const int n = grid_.n();
    Matrix jac = gn_ + frag_;
    for (int r = 0; r < n; ++r) {
        const int partners = n - r - 1;
        double diag = 0.0;
        for (int s = 0; s < partners; ++s) {
            jac(r, s) -= u[r] * agg_(r, s);
            diag += agg_(r, s) * u[s];
        }
        jac(r, r) -= diag;
        for (int m = 0; m < r; ++m) {
            jac(r, m) += agg_(m, r - 1 - m) * u[r - 1 - m];
        }
    }
    return jac;
}

} // namespace popsteady
