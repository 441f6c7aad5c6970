#include "popsteady/stability.hpp"

#include <algorithm>
#include <cmath>

namespace popsteady {

const char* to_string(Classification c) {
    switch (c) {
        case Classification::Stable: return "Stable";
        case Classification::Unstable: return "Unstable";
        case Classification::Marginal: return "Marginal";
    }
    return "Marginal";
}

StabilityReport classify(const Matrix& jac, double margin_tol) {
    StabilityReport report;
    report.spectrum = eigen_spectrum(jac);
    report.rightmost_re = report.spectrum.rightmost.real();
    if (report.rightmost_re < -margin_tol) {
        report.classification = Classification::Stable;
    } else if (report.rightmost_re > margin_tol) {
        report.classification = Classification::Unstable;
    } else {
        report.classification = Classification::Marginal;
    }
    report.gershgorin = gershgorin_columns(jac);
    return report;
}

ConditionReport sinko_condition(const SinkoRates& rates, const Grid& grid) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.n(); ++i) {
        const double x = grid.node(i);
        worst = std::max(worst, rates.q(x) - rates.mu(x));
    }
    return {worst < 0.0, worst};
}

PBEConditionReport pbe_condition(const PBERates& rates, const Grid& grid,
                                 const GridVector& u_star) {
    PBEConditionReport report;
    const int n = grid.n();
    const double dx = grid.dx();
    const Vector& alpha = u_star.coeffs;

    double margin1 = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double xi = grid.node(i);
        double pressure = 0.0; // right Riemann sum of ka(x_i, .) u* over [0, x_max - x_i]
        for (int j = 0; j < n - i - 1; ++j) {
            pressure += rates.ka(xi, grid.node(j)) * alpha[j] * dx;
        }
        const double lhs = rates.q(xi) + 0.5 * rates.kf(xi) - rates.mu(xi) + pressure;
        margin1 = std::max(margin1, lhs);
    }
    report.margin1 = margin1;
    report.cond1 = margin1 < 0.0;

    double margin_ka = -std::numeric_limits<double>::infinity();
    double margin_gamma = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double xi = grid.node(i);
        for (int j = 0; j + 1 < n; ++j) {
            const double rise = rates.ka(xi, grid.node(j + 1)) * alpha[j + 1] -
                                rates.ka(xi, grid.node(j)) * alpha[j];
            margin_ka = std::max(margin_ka, rise);
        }
        // daughter density of parent x_i across daughter nodes inside support
        for (int j = 0; j + 1 <= i; ++j) {
            const double rise =
                rates.gamma(grid.node(j + 1), xi) - rates.gamma(grid.node(j), xi);
            margin_gamma = std::max(margin_gamma, rise);
        }
    }
    if (!std::isfinite(margin_gamma)) margin_gamma = 0.0; // n == 1, no pairs
    report.margin2_ka = margin_ka;
    report.margin2_gamma = margin_gamma;
    report.cond2_ka = margin_ka <= 0.0;
    report.cond2_gamma = margin_gamma <= 0.0;
    return report;
}

bool gershgorin_prescreen(const Matrix& jac) {
    for (const auto& disk : gershgorin_columns(jac)) {
        if (!(disk.center + disk.radius < 0.0)) return false;
    }
    return true;
}

} // namespace popsteady
