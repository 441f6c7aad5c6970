#include "popsteady/model.hpp"

#include <cmath>
#include <string>

#include "popsteady/errors.hpp"
#include "popsteady/quadrature.hpp"

namespace popsteady {

namespace {

void validate_params(const ParamPoint& p) {
    if (!std::isfinite(p.a) || !std::isfinite(p.b) || !std::isfinite(p.c) ||
        p.a < 0.0 || p.b < 0.0 || p.c < 0.0) {
        throw InvalidRateError("rate parameters must be finite and nonnegative");
    }
    if (p.b <= 0.0) {
        throw InvalidRateError("growth parameter b must be positive");
    }
}

} // namespace

SinkoRates sinko_canonical(const ParamPoint& p) {
    validate_params(p);
    const double a = p.a, b = p.b, c = p.c;
    return {
        [a](double x) { return a * (x + 1.0); },
        [b](double x) { return b * (x + 1.0); },
        [c](double) { return c; },
    };
}

PBERates pbe_canonical(const ParamPoint& p) {
    validate_params(p);
    const double a = p.a, b = p.b, c = p.c;
    PBERates r;
    r.q = [a](double x) { return a * (x + 1.0); };
    r.g = [b](double x) { return b * (x + 1.0); };
    r.mu = [c](double x) { return c * x; };
    r.kf = [](double x) { return x; };
    r.ka = [](double x, double y) {
        const double s = std::cbrt(x) + std::cbrt(y);
        return s * s * s;
    };
    r.gamma = [](double x, double y) {
        if (x < 0.0 || x > y || y <= 0.0) return 0.0;
        return 6.0 * x * (y - x) / (y * y * y);
    };
    return r;
}

void check_gamma_normalization(const PBERates& rates, double x_max, double tol,
                               int samples, double y_min) {
    if (samples < 1) samples = 1;
    for (int k = 1; k <= samples; ++k) {
        const double y = y_min + (x_max - y_min) * k / samples;
        const double integral = composite_simpson(
            [&](double x) { return rates.gamma(x, y); }, 0.0, y, 2048);
        if (std::abs(integral - 1.0) > tol) {
            throw InvalidRateError(
                "gamma daughter density integrates to " + std::to_string(integral) +
                " (expected 1) for parent size " + std::to_string(y));
        }
    }
}

} // namespace popsteady
