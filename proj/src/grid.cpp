#include "popsteady/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "popsteady/errors.hpp"

namespace popsteady {

Grid::Grid(int n, double x_max) : n_(n), x_max_(x_max), dx_(x_max / n) {
    if (n < 1) throw std::invalid_argument("Grid: n must be >= 1");
    if (!(x_max > 0.0) || !std::isfinite(x_max)) {
        throw std::invalid_argument("Grid: x_max must be positive and finite");
    }
}

std::vector<double> Grid::nodes() const {
    std::vector<double> xs(static_cast<size_t>(n_));
    for (int i = 0; i < n_; ++i) xs[static_cast<size_t>(i)] = node(i);
    return xs;
}

int Grid::cell_of(double x) const {
    // A couple of ulps of slack so x_max computed as n*dx round-trips.
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * x_max_;
    if (x < -slack || x > x_max_ + slack) {
        throw std::domain_error("Grid::cell_of: x = " + std::to_string(x) +
                                " outside [0, " + std::to_string(x_max_) + "]");
    }
    if (x <= 0.0) return 0;
    int i = static_cast<int>(std::ceil(x / dx_)) - 1;
    if (i < 0) i = 0;
    if (i >= n_) i = n_ - 1;
    return i;
}

GridVector::GridVector(Grid g, Vector c) : grid(g), coeffs(std::move(c)) {
    if (coeffs.size() != grid.n()) {
        throw std::invalid_argument("GridVector: coefficient length " +
                                    std::to_string(coeffs.size()) +
                                    " does not match grid dimension " +
                                    std::to_string(grid.n()));
    }
}

GridVector project(const std::function<double(double)>& f, const Grid& grid,
                   int subpoints) {
    if (subpoints < 1) subpoints = 1;
    Vector coeffs(grid.n());
    const double h = grid.dx() / subpoints;
    for (int i = 0; i < grid.n(); ++i) {
        const double x0 = grid.left(i);
        double sum = 0.0;
        for (int k = 0; k < subpoints; ++k) {
            const double fx = f(x0 + (k + 0.5) * h);
            if (!std::isfinite(fx)) {
                throw RateEvaluationError(
                    "project: non-finite value in cell " + std::to_string(i) +
                    " near x = " + std::to_string(x0 + (k + 0.5) * h));
            }
            sum += fx;
        }
        coeffs[i] = sum / subpoints;
    }
    return GridVector(grid, std::move(coeffs));
}

double embed(const GridVector& v, double x) {
    return v.coeffs[v.grid.cell_of(x)];
}

std::pair<double, double> moments(const GridVector& v) {
    const Grid& g = v.grid;
    double m0 = 0.0;
    double m1 = 0.0;
    for (int i = 0; i < g.n(); ++i) {
        m0 += v.coeffs[i];
        m1 += v.coeffs[i] * (g.node(i) + g.left(i));
    }
    return {g.dx() * m0, 0.5 * g.dx() * m1};
}

} // namespace popsteady
