#pragma once

#include <functional>

namespace popsteady {

/// Scalar parameters of the canonical rate families.
struct ParamPoint {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

/// Rates of the linear transport-mortality-renewal model:
///   q  renewal (new individuals per unit time per unit size),
///   g  growth (size per unit time, must stay positive),
///   mu removal (per unit time).
struct SinkoRates {
    std::function<double(double)> q;
    std::function<double(double)> g;
    std::function<double(double)> mu;
};

/// Rates of the nonlinear population balance model. In addition to the
/// transport/renewal/removal triple:
///   ka(x, y)     symmetric aggregation kernel,
///   kf(x)        fragmentation rate,
///   gamma(x, y)  post-fragmentation daughter density, daughter x of
///                parent y; zero for x > y and integrates to one in x
///                over [0, y].
struct PBERates {
    std::function<double(double)> q;
    std::function<double(double)> g;
    std::function<double(double)> mu;
    std::function<double(double)> kf;
    std::function<double(double, double)> ka;
    std::function<double(double, double)> gamma;

    SinkoRates transport() const { return {q, g, mu}; }
};

/// q(x) = a(x+1), g(x) = b(x+1), mu(x) = c.
/// Throws InvalidRateError when b <= 0 (degenerate growth) or any
/// parameter is negative/non-finite.
SinkoRates sinko_canonical(const ParamPoint& p);

/// q(x) = a(x+1), g(x) = b(x+1), mu(x) = c x, kf(x) = x,
/// ka(x, y) = (x^(1/3) + y^(1/3))^3 (laminar shear kernel),
/// gamma(x, y) = 1_{[0,y]}(x) * 6 x (y - x) / y^3 (Beta(2,2) daughters).
PBERates pbe_canonical(const ParamPoint& p);

/// Verifies int_0^y gamma(x, y) dx == 1 to `tol` by composite Simpson at
/// `samples` parent sizes spread over (y_min, x_max]. Throws
/// InvalidRateError on violation. y_min exists for sampled densities whose
/// small-parent slices fall below the table resolution.
void check_gamma_normalization(const PBERates& rates, double x_max,
                               double tol = 1e-6, int samples = 7,
                               double y_min = 0.0);

} // namespace popsteady
