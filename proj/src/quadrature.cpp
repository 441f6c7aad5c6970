#include "popsteady/quadrature.hpp"

#include <cmath>

#include "popsteady/errors.hpp"

namespace popsteady {

double composite_midpoint(const RealFn& f, double a, double b, int points) {
    if (points < 1) points = 1;
    const double h = (b - a) / points;
    double sum = 0.0;
    for (int k = 0; k < points; ++k) {
        sum += f(a + (k + 0.5) * h);
    }
    return sum * h;
}

double composite_simpson(const RealFn& f, double a, double b, int intervals) {
    if (intervals < 2) intervals = 2;
    if (intervals % 2 != 0) ++intervals;
    const double h = (b - a) / intervals;
    double sum = f(a) + f(b);
    for (int k = 1; k < intervals; ++k) {
        sum += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

namespace {

double simpson(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const RealFn& f, double a, double b, double fa, double fm,
                     double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    if (!std::isfinite(flm) || !std::isfinite(frm)) {
        throw NumericalError("adaptive_simpson: non-finite integrand sample");
    }
    const double left = simpson(fa, flm, fm, a, m);
    const double right = simpson(fm, frm, fb, m, b);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    if (depth <= 0) {
        throw NumericalError("adaptive_simpson: depth limit before tolerance");
    }
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const RealFn& f, double a, double b, double tol,
                        int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb)) {
        throw NumericalError("adaptive_simpson: non-finite integrand sample");
    }
    const double whole = simpson(fa, fm, fb, a, b);
    return adaptive_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

} // namespace popsteady
