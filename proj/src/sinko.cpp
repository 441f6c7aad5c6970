#include "popsteady/sinko.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "popsteady/errors.hpp"
#include "popsteady/linalg.hpp"
#include "popsteady/quadrature.hpp"

namespace popsteady {

namespace {

double eval_rate(const std::function<double(double)>& f, double x,
                 const char* name) {
    const double v = f(x);
    if (!std::isfinite(v)) {
        throw RateEvaluationError(std::string(name) + " evaluated non-finite at x = " +
                                  std::to_string(x));
    }
    return v;
}

} // namespace

SinkoOperator assemble(const Grid& grid, const SinkoRates& rates) {
    const int n = grid.n();
    const double dx = grid.dx();
    Matrix m = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        m(0, j) = eval_rate(rates.q, grid.node(j), "q");
    }
    m(0, 0) += -eval_rate(rates.g, grid.node(0), "g") / dx -
               eval_rate(rates.mu, grid.node(0), "mu");
    for (int i = 1; i < n; ++i) {
        const double xi = grid.node(i);
        m(i, i) = -eval_rate(rates.g, xi, "g") / dx - eval_rate(rates.mu, xi, "mu");
        m(i, i - 1) = eval_rate(rates.g, grid.node(i - 1), "g") / dx;
    }
    return {grid, rates, std::move(m)};
}

namespace {

double survival_exponent(const SinkoRates& rates, double x, double tol) {
    return adaptive_simpson(
        [&](double s) { return rates.mu(s) / rates.g(s); }, 0.0, x, tol);
}

} // namespace

double necessary_condition(const SinkoRates& rates, double x_max, double quad_tol) {
    const double inner_tol = quad_tol * 1e-2;
    return adaptive_simpson(
        [&](double x) {
            return rates.q(x) / rates.g(x) *
                   std::exp(-survival_exponent(rates, x, inner_tol));
        },
        0.0, x_max, quad_tol);
}

ExactSinkoSolution::ExactSinkoSolution(SinkoRates rates, double x_max,
                                       double quad_tol, double condition_tol)
    : rates_(std::move(rates)), x_max_(x_max), quad_tol_(quad_tol) {
    const double value = necessary_condition(rates_, x_max_, quad_tol_);
    if (std::abs(value - 1.0) > condition_tol) {
        throw NoSteadyStateError(
            value, "existence condition integral is " + std::to_string(value) +
                       ", a stationary solution requires 1");
    }
}

double ExactSinkoSolution::operator()(double x) const {
    return std::exp(-survival_exponent(rates_, x, quad_tol_)) / rates_.g(x);
}

double exact_steady_state(const SinkoRates& rates, double x, double x_max,
                          double quad_tol) {
    return ExactSinkoSolution(rates, x_max, quad_tol)(x);
}

std::optional<SteadyState> steady_state(const SinkoOperator& op,
                                        double existence_tol) {
    auto basis = nullspace(op.matrix, existence_tol);
    if (basis.empty()) return std::nullopt;
    if (basis.size() > 1) {
        throw DegenerateNullspaceError(
            static_cast<int>(basis.size()),
            "nullspace dimension " + std::to_string(basis.size()) +
                "; steady direction is not unique");
    }
    Vector v = basis.front();
    if (v.sum() < 0.0) v = -v;

    // B = 1 gauge: dx * sum_i q(x_i) a_i = 1
    double b_functional = 0.0;
    for (int i = 0; i < op.grid.n(); ++i) {
        b_functional += op.rates.q(op.grid.node(i)) * v[i];
    }
    b_functional *= op.grid.dx();
    if (b_functional != 0.0) v /= b_functional;

    SteadyState out{GridVector(op.grid, v),
                    (op.matrix * v).norm(),
                    v.minCoeff() >= -1e-8 * v.cwiseAbs().maxCoeff(),
                    /*seed_index=*/-1,
                    /*iterations=*/0,
                    {}};
    return out;
}

} // namespace popsteady
