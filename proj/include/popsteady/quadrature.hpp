#pragma once

#include <functional>

namespace popsteady {

using RealFn = std::function<double(double)>;

/// Composite midpoint rule with `points` equal subintervals.
/// Never evaluates f at the endpoints.
double composite_midpoint(const RealFn& f, double a, double b, int points);

/// Composite Simpson rule with `intervals` subintervals (rounded up to even).
double composite_simpson(const RealFn& f, double a, double b, int intervals);

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
/// Throws NumericalError when the recursion depth limit is reached before
/// the tolerance is met, or when f is non-finite on a sample point.
double adaptive_simpson(const RealFn& f, double a, double b, double tol,
                        int max_depth = 48);

} // namespace popsteady
