#include "popsteady/solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "popsteady/errors.hpp"
#include "popsteady/linalg.hpp"

namespace popsteady {

std::vector<GridVector> seed_ladder(const Grid& grid) {
    std::vector<GridVector> seeds;
    seeds.reserve(10);
    for (int i = 0; i < 10; ++i) {
        seeds.emplace_back(grid, Vector::Constant(grid.n(), std::pow(2.0, i)));
    }
    return seeds;
}

namespace {

double discrete_l1(const Grid& grid, const Vector& u) {
    return grid.dx() * u.cwiseAbs().sum();
}

Vector dogleg_step(const Vector& newton, const Vector& gradient,
                   const Matrix& jac, double radius) {
    if (newton.norm() <= radius) return newton;
    const double gnorm2 = gradient.squaredNorm();
    const double jg2 = (jac * gradient).squaredNorm();
    if (jg2 <= 0.0 || gnorm2 <= 0.0) {
        return newton * (radius / newton.norm());
    }
    Vector cauchy = -(gnorm2 / jg2) * gradient;
    const double cnorm = cauchy.norm();
    if (cnorm >= radius) return cauchy * (radius / cnorm);
    // walk from the Cauchy point toward the Newton point up to the boundary
    Vector d = newton - cauchy;
    const double a = d.squaredNorm();
    const double b = cauchy.dot(d);
    const double c = cauchy.squaredNorm() - radius * radius;
    const double tau = (-b + std::sqrt(std::max(0.0, b * b - a * c))) / a;
    return cauchy + tau * d;
}

struct SeedResult {
    bool converged = false;
    bool rejected = false; // converged but failed positivity/nontriviality
    Vector state;
    double residual = 0.0;
    int iterations = 0;
    std::vector<double> history;
};

SeedResult run_seed(const PBEOperator& op, Vector u, double tol,
                    const SolverOptions& opt) {
    SeedResult out;
    double radius = std::max(1.0, u.norm());
    const double radius_max = 1e10 * (1.0 + u.norm());
    bool damped_retry_used = false;

    for (int iter = 0; iter <= opt.max_iterations; ++iter) {
        Vector f = op.apply(u);
        const double r = f.norm();
        out.history.push_back(r);
        if (!std::isfinite(r)) return out;
        // a seed whose residual exploded past any recovery is hopeless
        if (r > 1e8 * (1.0 + out.history.front())) return out;
        if (r <= tol) {
            out.iterations = iter;
            out.residual = r;
            out.state = u;
            const double mx = u.cwiseAbs().maxCoeff();
            const bool positive = u.minCoeff() >= -opt.positivity_tol * mx;
            const bool nontrivial = discrete_l1(op.grid(), u) >= opt.nontrivial_l1;
            if (positive && nontrivial) {
                out.converged = true;
            } else {
                out.rejected = true;
            }
            return out;
        }
        if (iter == opt.max_iterations) return out;

        Matrix jac = op.jacobian(u);
        Vector newton;
        try {
            newton = solve_linear(jac, -f);
        } catch (const SingularMatrixError&) {
            if (damped_retry_used) return out;
            damped_retry_used = true;
            const double damping =
                1e-8 * (1.0 + jac.cwiseAbs().rowwise().sum().maxCoeff());
            Matrix damped = jac;
            damped.diagonal().array() += damping;
            try {
                newton = solve_linear(damped, -f);
            } catch (const SingularMatrixError&) {
                return out;
            }
        }
        Vector gradient = jac.transpose() * f;

        bool accepted = false;
        for (int shrink = 0; shrink < 60 && !accepted; ++shrink) {
            Vector p = dogleg_step(newton, gradient, jac, radius);
            Vector trial = u + p;
            Vector f_trial = op.apply(trial);
            const double predicted = r * r - (f + jac * p).squaredNorm();
            const double actual =
                f_trial.allFinite()
                    ? r * r - f_trial.squaredNorm()
                    : -std::numeric_limits<double>::infinity();
            const double rho = predicted > 0.0 ? actual / predicted : 0.0;
            if (rho < 0.25) {
                radius = 0.25 * p.norm();
            } else if (rho > 0.75 && p.norm() >= 0.99 * radius) {
                radius = std::min(2.0 * radius, radius_max);
            }
            if (rho > 1e-4) {
                u = trial;
                accepted = true;
            } else if (radius < 1e-14 * (1.0 + u.norm())) {
                return out; // trust region collapsed, seed stalls
            }
        }
        if (!accepted) return out;
    }
    return out;
}

} // namespace

std::optional<SteadyState> find_steady_state(const PBEOperator& op,
                                             const std::vector<GridVector>& seeds,
                                             const SolverOptions& options) {
    const double tol = options.tol > 0.0
                           ? options.tol
                           : 1e-8 * std::sqrt(static_cast<double>(op.grid().n()));
    for (size_t k = 0; k < seeds.size(); ++k) {
        if (!(seeds[k].grid == op.grid())) {
            throw std::invalid_argument("find_steady_state: seed grid mismatch");
        }
        SeedResult result = run_seed(op, seeds[k].coeffs, tol, options);
        if (!result.converged) continue;
        return SteadyState{GridVector(op.grid(), result.state),
                           result.residual,
                           /*positive=*/true,
                           static_cast<int>(k),
                           result.iterations,
                           std::move(result.history)};
    }
    return std::nullopt;
}

std::optional<SteadyState> find_steady_state(const PBEOperator& op,
                                             const SolverOptions& options) {
    return find_steady_state(op, seed_ladder(op.grid()), options);
}

namespace {

void push_sample(Trajectory& traj, const Grid& grid, double t, const Vector& u) {
    GridVector gv(grid, u);
    auto [m0, m1] = moments(gv);
    traj.times.push_back(t);
    traj.m0.push_back(m0);
    traj.m1.push_back(m1);
    traj.min_coefficient = std::min(traj.min_coefficient, u.minCoeff());
    traj.states.push_back(std::move(gv));
}

// Dormand-Prince 5(4) tableau
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187,
                 A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = B1 - 5179.0 / 57600, E3 = B3 - 7571.0 / 16695,
                 E4 = B4 - 393.0 / 640, E5 = B5 + 92097.0 / 339200,
                 E6 = B6 - 187.0 / 2100, E7 = -1.0 / 40;

} // namespace

Trajectory integrate(const PBEOperator& op, const GridVector& u0, double t_end,
                     const IntegrateOptions& options) {
    if (!(u0.grid == op.grid())) {
        throw std::invalid_argument("integrate: initial state grid mismatch");
    }
    Trajectory traj;
    traj.min_coefficient = std::numeric_limits<double>::infinity();
    const Grid& grid = op.grid();
    push_sample(traj, grid, 0.0, u0.coeffs);
    if (!(t_end > 0.0)) return traj;

    const int samples = std::max(2, options.samples);
    const double dt_out = t_end / (samples - 1);
    int next_output = 1;

    Vector u = u0.coeffs;
    Vector k1 = op.apply(u);
    double t = 0.0;
    double h = std::min(dt_out, 1e-2 * (1.0 + u.norm()) / (1.0 + k1.norm()));
    const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * t_end;
    long steps = 0;

    while (t < t_end) {
        if (++steps > options.max_steps) {
            throw StiffnessError(
                "integrate: step budget exhausted; the system looks stiff, use "
                "the implicit integrator");
        }
        if (h < h_min) {
            throw StiffnessError(
                "integrate: step size underflow; the system looks stiff, use "
                "the implicit integrator");
        }
        const double t_next_out = next_output * dt_out;
        bool hit_output = false;
        double step = h;
        if (t + step >= t_next_out - 1e-14 * t_end) {
            step = t_next_out - t;
            hit_output = true;
        }

        Vector k2 = op.apply(u + step * (A21 * k1));
        Vector k3 = op.apply(u + step * (A31 * k1 + A32 * k2));
        Vector k4 = op.apply(u + step * (A41 * k1 + A42 * k2 + A43 * k3));
        Vector k5 = op.apply(u + step * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        Vector k6 = op.apply(u + step * (A61 * k1 + A62 * k2 + A63 * k3 +
                                         A64 * k4 + A65 * k5));
        Vector u_new =
            u + step * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        Vector k7 = op.apply(u_new);
        Vector err = step * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 +
                             E7 * k7);

        double err_norm = 0.0;
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            const double scale =
                options.atol +
                options.rtol * std::max(std::abs(u[i]), std::abs(u_new[i]));
            const double e = err[i] / scale;
            err_norm += e * e;
        }
        err_norm = std::sqrt(err_norm / static_cast<double>(u.size()));

        if (err_norm <= 1.0 && u_new.allFinite()) {
            t += step;
            u = std::move(u_new);
            k1 = std::move(k7); // first-same-as-last
            if (hit_output) {
                push_sample(traj, grid, t, u);
                ++next_output;
                if (next_output >= samples && t >= t_end - 1e-14 * t_end) break;
            }
        }
        const double factor = err_norm > 0.0
                                  ? 0.9 * std::pow(err_norm, -0.2)
                                  : 5.0;
        h = step * std::clamp(factor, 0.2, 5.0);
    }
    return traj;
}

Trajectory integrate_implicit(const PBEOperator& op, const GridVector& u0,
                              double t_end, int steps, int samples) {
    if (!(u0.grid == op.grid())) {
        throw std::invalid_argument("integrate_implicit: initial state grid mismatch");
    }
    Trajectory traj;
    traj.min_coefficient = std::numeric_limits<double>::infinity();
    const Grid& grid = op.grid();
    push_sample(traj, grid, 0.0, u0.coeffs);
    if (!(t_end > 0.0)) return traj;
    if (steps < 1) steps = 1;

    const double h = t_end / steps;
    const int stride = std::max(1, steps / std::max(1, samples - 1));
    const Matrix identity = Matrix::Identity(grid.n(), grid.n());
    Vector u = u0.coeffs;

    for (int k = 1; k <= steps; ++k) {
        Vector v = u;
        bool converged = false;
        for (int newton = 0; newton < 25; ++newton) {
            Vector residual = v - u - h * op.apply(v);
            if (residual.norm() <= 1e-10 * (1.0 + v.norm())) {
                converged = true;
                break;
            }
            Matrix jac = identity - h * op.jacobian(v);
            v += solve_linear(jac, -residual);
        }
        if (!converged) {
            throw NumericalError("integrate_implicit: Newton stalled at step " +
                                 std::to_string(k));
        }
        u = std::move(v);
        if (k % stride == 0 || k == steps) {
            push_sample(traj, grid, k * h, u);
        }
    }
    return traj;
}

} // namespace popsteady
