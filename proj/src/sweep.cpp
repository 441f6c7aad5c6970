#include "popsteady/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "popsteady/errors.hpp"
#include "popsteady/pbe.hpp"
#include "popsteady/sinko.hpp"
#include "popsteady/solve.hpp"
#include "popsteady/stability.hpp"

namespace popsteady {

long SweepSpec::point_count() const {
    return static_cast<long>(a.count()) * b.count() * c.count();
}

const char* to_string(SweepStatus s) {
    switch (s) {
        case SweepStatus::Stable: return "Stable";
        case SweepStatus::Unstable: return "Unstable";
        case SweepStatus::NotFound: return "NotFound";
    }
    return "NotFound";
}

std::vector<GridVector> warm_start_policy(const SweepRecord& prev,
                                          const std::optional<GridVector>& prev_state,
                                          const Grid& grid) {
    std::vector<GridVector> seeds;
    if (prev.status != SweepStatus::NotFound && prev_state &&
        prev_state->grid == grid) {
        seeds.push_back(*prev_state);
    }
    auto ladder = seed_ladder(grid);
    seeds.insert(seeds.end(), ladder.begin(), ladder.end());
    return seeds;
}

namespace {

struct PointOutcome {
    SweepRecord record;
    std::optional<GridVector> state;
};

PointOutcome evaluate_sinko(const SweepSpec& spec, const ParamPoint& p,
                            const Grid& grid) {
    PointOutcome out;
    out.record.point = p;
    try {
        SinkoRates rates = sinko_canonical(p);
        SinkoOperator op = assemble(grid, rates);
        auto state = steady_state(op, spec.existence_tol);
        if (!state) {
            out.record.note = "no nullspace direction at tolerance";
            return out;
        }
        if (!state->positive) {
            out.record.note = "nullspace direction not positive";
            return out;
        }
        StabilityReport report = classify(op.matrix, spec.margin_tol);
        out.record.status = report.classification == Classification::Unstable
                                ? SweepStatus::Unstable
                                : SweepStatus::Stable;
        out.record.rightmost_re = report.rightmost_re;
        out.record.residual = state->residual_norm;
        out.state = state->state;
    } catch (const std::exception& e) {
        out.record.status = SweepStatus::NotFound;
        out.record.note = e.what();
    }
    return out;
}

PointOutcome evaluate_pbe(const SweepSpec& spec, const ParamPoint& p,
                          const Grid& grid,
                          const std::vector<GridVector>& seeds) {
    PointOutcome out;
    out.record.point = p;
    try {
        PBERates rates = pbe_canonical(p);
        PBEOperator op(grid, rates);
        SolverOptions options;
        options.tol = spec.solver_tol;
        auto state = find_steady_state(op, seeds, options);
        if (!state) {
            out.record.note = "no positive steady state from seed ladder";
            return out;
        }
        StabilityReport report =
            classify(op.jacobian(state->state.coeffs), spec.margin_tol);
        out.record.status = report.classification == Classification::Unstable
                                ? SweepStatus::Unstable
                                : SweepStatus::Stable;
        out.record.rightmost_re = report.rightmost_re;
        out.record.residual = state->residual_norm;
        out.record.seed_index = state->seed_index;
        out.state = state->state;
    } catch (const std::exception& e) {
        out.record.status = SweepStatus::NotFound;
        out.record.note = e.what();
    }
    return out;
}

} // namespace

std::vector<SweepRecord> run_sweep(const SweepSpec& spec, int workers) {
    if (spec.model != "sinko" && spec.model != "pbe") {
        throw ConfigError("model", "sweep model must be \"sinko\" or \"pbe\"");
    }
    if (workers < 1) workers = 1;
    const int na = spec.a.count();
    const int nb = spec.b.count();
    const int nc = spec.c.count();
    const long lines = static_cast<long>(nb) * nc;
    const Grid grid(spec.grid_n, spec.x_max);

    std::vector<SweepRecord> records(static_cast<size_t>(spec.point_count()));
    std::atomic<long> next_line{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto run_line = [&](long line) {
        const int ib = static_cast<int>(line / nc);
        const int ic = static_cast<int>(line % nc);
        SweepRecord prev;
        std::optional<GridVector> prev_state;
        for (int ia = 0; ia < na; ++ia) {
            const ParamPoint p{spec.a.at(ia), spec.b.at(ib), spec.c.at(ic)};
            const auto start = std::chrono::steady_clock::now();
            PointOutcome outcome;
            if (spec.model == "sinko") {
                outcome = evaluate_sinko(spec, p, grid);
            } else {
                const auto seeds = spec.warm_start && ia > 0
                                       ? warm_start_policy(prev, prev_state, grid)
                                       : seed_ladder(grid);
                outcome = evaluate_pbe(spec, p, grid, seeds);
            }
            const auto stop = std::chrono::steady_clock::now();
            outcome.record.wall_ms =
                std::chrono::duration<double, std::milli>(stop - start).count();
            const size_t index =
                (static_cast<size_t>(ib) * nc + ic) * na + static_cast<size_t>(ia);
            prev = outcome.record;
            prev_state = std::move(outcome.state);
            records[index] = std::move(outcome.record);
        }
    };

    auto worker_loop = [&] {
        try {
            for (;;) {
                const long line = next_line.fetch_add(1);
                if (line >= lines) return;
                run_line(line);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };

    if (workers == 1) {
        worker_loop();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker_loop);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return records;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records,
                     bool include_timing, std::optional<double> scaled_dx) {
    out << "a,b,c,status,rightmost_re,residual,seed_index,wall_ms";
    if (scaled_dx) out << ",rightmost_re_dx";
    out << "\n";
    for (const auto& r : records) {
        out << fmt(r.point.a) << ',' << fmt(r.point.b) << ',' << fmt(r.point.c)
            << ',' << to_string(r.status) << ',';
        if (r.rightmost_re) out << fmt(*r.rightmost_re);
        out << ',';
        if (r.residual) out << fmt(*r.residual);
        out << ',';
        if (r.seed_index) out << *r.seed_index;
        out << ',';
        if (include_timing && r.wall_ms) out << fmt(*r.wall_ms);
        if (scaled_dx) {
            out << ',';
            if (r.rightmost_re) out << fmt(*r.rightmost_re * *scaled_dx);
        }
        out << "\n";
    }
}

nlohmann::json sweep_spec_json(const SweepSpec& spec) {
    auto range = [](const RangeSpec& r) {
        return nlohmann::json{{"lo", r.lo}, {"hi", r.hi}, {"step", r.step}};
    };
    return nlohmann::json{
        {"model", spec.model},
        {"a", range(spec.a)},
        {"b", range(spec.b)},
        {"c", range(spec.c)},
        {"grid_n", spec.grid_n},
        {"x_max", spec.x_max},
        {"solver_tol", spec.solver_tol},
        {"existence_tol", spec.existence_tol},
        {"margin_tol", spec.margin_tol},
        {"warm_start", spec.warm_start},
    };
}

} // namespace popsteady
