#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

namespace popsteady {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Uniform partition of [0, x_max] into n cells. Cells are left-open,
/// right-closed: cell i (0-based) is (i*dx, (i+1)*dx]. node(i) is the right
/// endpoint of cell i, so node(n-1) == x_max. Immutable after construction.
class Grid {
public:
    Grid(int n, double x_max);

    int n() const { return n_; }
    double x_max() const { return x_max_; }
    double dx() const { return dx_; }

    /// Right endpoint of cell i (0-based).
    double node(int i) const { return (i + 1) * dx_; }
    /// Left endpoint of cell i.
    double left(int i) const { return i * dx_; }
    /// All right endpoints, ascending.
    std::vector<double> nodes() const;

    /// 0-based index of the cell containing x under the left-open,
    /// right-closed convention; x == 0 maps to cell 0.
    /// Throws std::domain_error for x outside [0, x_max].
    int cell_of(double x) const;

    bool operator==(const Grid& other) const {
        return n_ == other.n_ && x_max_ == other.x_max_;
    }

private:
    int n_;
    double x_max_;
    double dx_;
};

/// Coefficient vector of a piecewise-constant function on a Grid.
struct GridVector {
    Grid grid;
    Vector coeffs;

    GridVector(Grid g, Vector c);
};

/// Cell averages of f, computed per cell with the composite midpoint rule
/// on `subpoints` equal subintervals (endpoints are never evaluated).
/// Throws RateEvaluationError naming the cell if f is non-finite there.
GridVector project(const std::function<double(double)>& f, const Grid& grid,
                   int subpoints = 8);

/// Value of the piecewise-constant function at x: the coefficient of the
/// cell containing x. Throws std::domain_error outside [0, x_max].
double embed(const GridVector& v, double x);

/// Discrete zeroth and first moments:
///   m0 = dx * sum_i a_i,   m1 = (dx/2) * sum_i a_i (x_i + x_{i-1}).
std::pair<double, double> moments(const GridVector& v);

} // namespace popsteady
