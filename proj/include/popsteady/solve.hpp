#pragma once

#include <optional>
#include <vector>

#include "popsteady/pbe.hpp"
#include "popsteady/steady_state.hpp"

namespace popsteady {

struct SolverOptions {
    double tol = -1.0;             // residual target; < 0 means 1e-8 * sqrt(n)
    int max_iterations = 200;      // accepted Newton steps per seed
    double positivity_tol = 1e-8;  // min coeff >= -positivity_tol * ||u||_inf
    double nontrivial_l1 = 1e-6;   // discrete L1 floor rejecting u == 0
};

/// The ten constant seed states 2^i, i = 0..9, projected onto the grid.
std::vector<GridVector> seed_ladder(const Grid& grid);

/// Trust-region dogleg Newton (Powell-hybrid family) on F(u) = 0 using the
/// analytic Jacobian. Seeds are tried in order; the first converged state
/// that passes the positivity and nontriviality rules wins. A singular
/// Jacobian gets one diagonally damped retry per seed. Returns nullopt when
/// every seed fails.
std::optional<SteadyState> find_steady_state(
    const PBEOperator& op, const std::vector<GridVector>& seeds,
    const SolverOptions& options = {});

/// Same with the default 2^i seed ladder.
std::optional<SteadyState> find_steady_state(const PBEOperator& op,
                                             const SolverOptions& options = {});

struct Trajectory {
    std::vector<double> times;
    std::vector<GridVector> states;
    std::vector<double> m0;
    std::vector<double> m1;
    double min_coefficient = 0.0; // smallest coefficient seen over all samples
};

struct IntegrateOptions {
    double rtol = 1e-6;
    double atol = 1e-9;
    int samples = 50;             // >= this many uniform output times
    long max_steps = 2000000;     // stiffness guard
};

/// Adaptive embedded Runge-Kutta 5(4) (Dormand-Prince) integration of
/// du/dt = F(u) with moments attached per sample. Throws StiffnessError
/// when the step budget or minimum step size is exhausted; the implicit
/// integrator below is the fallback for that case.
Trajectory integrate(const PBEOperator& op, const GridVector& u0, double t_end,
                     const IntegrateOptions& options = {});

/// Backward Euler with the analytic Jacobian, fixed step t_end/steps.
Trajectory integrate_implicit(const PBEOperator& op, const GridVector& u0,
                              double t_end, int steps, int samples = 50);

} // namespace popsteady
