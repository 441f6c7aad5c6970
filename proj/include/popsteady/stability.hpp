#pragma once

#include <optional>

#include "popsteady/grid.hpp"
#include "popsteady/linalg.hpp"
#include "popsteady/model.hpp"

namespace popsteady {

enum class Classification { Stable, Unstable, Marginal };

const char* to_string(Classification c);

/// Sufficient-condition check: holds iff the worst margin is strictly
/// negative. The conditions are sufficient only, so a failed check means
/// "inconclusive", never "unstable" — the spectrum is the ground truth.
struct ConditionReport {
    bool holds = false;
    double worst_margin = 0.0;
};

struct PBEConditionReport {
    bool cond1 = false;        // q + kf/2 - mu + aggregation pressure < 0
    double margin1 = 0.0;
    bool cond2_ka = false;     // ka(x, .) u*(.) nonincreasing across nodes
    double margin2_ka = 0.0;
    bool cond2_gamma = false;  // gamma(., parent) nonincreasing across nodes
    double margin2_gamma = 0.0;

    bool cond2() const { return cond2_ka && cond2_gamma; }
};

struct StabilityReport {
    Spectrum spectrum;
    double rightmost_re = 0.0;
    Classification classification = Classification::Marginal;
    std::vector<GershgorinDisk> gershgorin;
    std::optional<ConditionReport> sinko_cond;
    std::optional<PBEConditionReport> pbe_cond;
};

/// Full spectrum of the Jacobian; Stable iff the rightmost real part is
/// below -margin_tol, Unstable above +margin_tol, Marginal in between.
StabilityReport classify(const Matrix& jac, double margin_tol = 1e-9);

/// q(x_i) - mu(x_i) < 0 at every node.
ConditionReport sinko_condition(const SinkoRates& rates, const Grid& grid);

/// Proposition-style sufficient conditions at a steady state: the pointwise
/// inequality with the aggregation integral as a right Riemann sum on the
/// grid, and the two monotonicity conditions checked by finite differences
/// across adjacent nodes.
PBEConditionReport pbe_condition(const PBERates& rates, const Grid& grid,
                                 const GridVector& u_star);

/// True iff every column disk lies strictly in the left half-plane
/// (center + radius < 0): a cheap sufficient certificate of stability.
bool gershgorin_prescreen(const Matrix& jac);

} // namespace popsteady
