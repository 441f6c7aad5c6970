#pragma once

#include <optional>

#include "popsteady/grid.hpp"
#include "popsteady/model.hpp"
#include "popsteady/steady_state.hpp"

namespace popsteady {

/// Discrete generator of the linear model on a grid: lower-bidiagonal
/// transport/removal with the renewal boundary condition folded into the
/// first row.
struct SinkoOperator {
    Grid grid;
    SinkoRates rates;
    Matrix matrix;
};

/// Entries:
///   (0,0)    = -g(x_1)/dx - mu(x_1) + q(x_1)
///   (0,j>0)  =  q(x_{j+1})
///   (i,i)    = -g(x_{i+1})/dx - mu(x_{i+1})      for i >= 1
///   (i,i-1)  =  g(x_i)/dx
/// with x_k the right endpoints. Throws RateEvaluationError on non-finite
/// rate values.
SinkoOperator assemble(const Grid& grid, const SinkoRates& rates);

/// Existence integral: int_0^x_max (q/g) exp(-int_0^x mu/g) dx, evaluated
/// by adaptive quadrature; a steady state requires the value to be 1.
double necessary_condition(const SinkoRates& rates, double x_max,
                           double quad_tol = 1e-10);

/// Closed-form stationary solution under the B = 1 normalization:
///   u*(x) = (1/g(x)) exp(-int_0^x mu/g ds).
/// Construction verifies the existence condition to `condition_tol` and
/// throws NoSteadyStateError (carrying the integral value) otherwise.
class ExactSinkoSolution {
public:
    ExactSinkoSolution(SinkoRates rates, double x_max,
                       double quad_tol = 1e-10, double condition_tol = 1e-6);
    double operator()(double x) const;
    double x_max() const { return x_max_; }

private:
    SinkoRates rates_;
    double x_max_;
    double quad_tol_;
};

/// Single-point convenience wrapper around ExactSinkoSolution.
double exact_steady_state(const SinkoRates& rates, double x, double x_max,
                          double quad_tol = 1e-10);

/// Steady state via nullspace extraction. The numerical nullspace is taken
/// at the relative threshold `existence_tol` on sigma_min/sigma_max; an
/// empty nullspace returns nullopt, a multidimensional one throws
/// DegenerateNullspaceError. The basis vector is sign-fixed to nonnegative
/// entries and rescaled so dx * sum_i q(x_i) a_i = 1 (the B = 1 gauge).
std::optional<SteadyState> steady_state(const SinkoOperator& op,
                                        double existence_tol = 2e-4);

} // namespace popsteady
