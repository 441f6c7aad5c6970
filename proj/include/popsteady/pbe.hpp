#pragma once

#include "popsteady/grid.hpp"
#include "popsteady/model.hpp"

namespace popsteady {

/// Discrete population balance right-hand side
///     F(u) = G u + A(u) + B(u)
/// with G the linear transport/renewal/removal generator, A the quadratic
/// aggregation operator and B the linear breakage operator. All kernel and
/// rate samples are precomputed at assembly; apply/jacobian perform no rate
/// evaluations. Immutable after construction and safe to share across
/// threads.
class PBEOperator {
public:
    PBEOperator(const Grid& grid, const PBERates& rates);

    const Grid& grid() const { return grid_; }
    const PBERates& rates() const { return rates_; }
    /// The linear generator G (same assembly as the linear model).
    const Matrix& linear_part() const { return gn_; }
    /// The breakage matrix B: strictly upper triangular daughter gains plus
    /// the -kf/2 loss diagonal. Constant in u, equals the breakage Jacobian.
    const Matrix& breakage_matrix() const { return frag_; }
    /// Precomputed ka(x_i, x_j) * dx.
    double aggregation_weight(int i, int j) const { return agg_(i, j); }

    /// Aggregation vector: row i carries the pair-merge gain
    ///   (1/2) sum_{j=1}^{i-1} ka(x_j, x_{i-j}) a_j a_{i-j} dx
    /// and the truncated loss
    ///   a_i sum_{j=1}^{n-i} ka(x_i, x_j) a_j dx,
    /// so no mass is created above x_max (first row has no gain, last row
    /// no loss).
    Vector apply_aggregation(const Vector& u) const;

    /// Breakage vector: daughter gain from all larger classes minus the
    /// kf/2 self-loss.
    Vector apply_breakage(const Vector& u) const;

    /// F(u) = G u + A(u) + B(u).
    Vector apply(const Vector& u) const;

    /// Analytic Jacobian of F at u: G plus the breakage matrix plus the
    /// aggregation derivative (gain band over index pairs summing to the
    /// row, loss terms below and on the diagonal; its last column is
    /// identically zero).
    Matrix jacobian(const Vector& u) const;

private:
    Grid grid_;
    PBERates rates_;
    Matrix gn_;
    Matrix agg_;  // ka(x_i, x_j) * dx, symmetric
    Matrix frag_; // breakage matrix / Jacobian
};

} // namespace popsteady
