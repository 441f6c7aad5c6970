#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "popsteady/config.hpp"
#include "popsteady/grid.hpp"
#include "popsteady/model.hpp"

namespace popsteady {

struct SweepSpec {
    std::string model; // "sinko" | "pbe"
    RangeSpec a, b, c;
    int grid_n = 100;
    double x_max = 1.0;
    double solver_tol = -1.0;    // pbe residual target; < 0 means 1e-8 sqrt(n)
    double existence_tol = 2e-4; // sinko nullspace threshold
    double margin_tol = 1e-9;
    bool warm_start = false;

    long point_count() const;
};

enum class SweepStatus { Stable, Unstable, NotFound };

const char* to_string(SweepStatus s);

struct SweepRecord {
    ParamPoint point;
    SweepStatus status = SweepStatus::NotFound;
    std::optional<double> rightmost_re; // absent iff status == NotFound
    std::optional<double> residual;
    std::optional<int> seed_index;
    std::optional<double> wall_ms;
    std::string note; // failure detail, empty on success
};

/// Evaluates every grid point of the parameter box: build rates, assemble
/// the operator, find the steady state (multi-seed Newton for pbe,
/// nullspace for sinko), classify the Jacobian at the found state.
/// Per-point failures become NotFound records with a note. Work is
/// distributed over (b, c) lines so results are independent of the worker
/// count; records come back in deterministic point order (b, then c, then
/// a fastest).
std::vector<SweepRecord> run_sweep(const SweepSpec& spec, int workers);

/// Seed list for the point after `prev` on the same sweep line: the
/// previous converged state (when available) prepended to the default
/// ladder, which stays intact as the fallback.
std::vector<GridVector> warm_start_policy(const SweepRecord& prev,
                                          const std::optional<GridVector>& prev_state,
                                          const Grid& grid);

/// CSV with the fixed header a,b,c,status,rightmost_re,residual,seed_index,
/// wall_ms. The wall_ms field stays empty unless `include_timing` (timing
/// breaks byte-for-byte reproducibility). With `scaled_dx` set, a
/// rightmost_re_dx column is appended carrying rightmost_re * dx.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records,
                     bool include_timing = false,
                     std::optional<double> scaled_dx = std::nullopt);

nlohmann::json sweep_spec_json(const SweepSpec& spec);

} // namespace popsteady
