#pragma once

#include <vector>

#include "popsteady/grid.hpp"

namespace popsteady {

/// A converged steady-state candidate.
/// seed_index is the 0-based position of the initial guess that converged
/// (-1 when the state came from nullspace extraction rather than iteration).
struct SteadyState {
    GridVector state;
    double residual_norm = 0.0;
    bool positive = false;
    int seed_index = -1;
    int iterations = 0;
    std::vector<double> residual_history; // 2-norm of F per accepted iterate
};

} // namespace popsteady
