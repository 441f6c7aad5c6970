// popsteady: steady states and local stability of size-structured population
// models. Subcommands: steady | sweep | simulate | convergence | spectrum.
//
// Exit codes: 0 success, 1 usage/config/IO error, 2 numerical advisory
// (stiff integration, retry with --implicit), 3 steady state not found.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "popsteady/config.hpp"
#include "popsteady/errors.hpp"
#include "popsteady/pbe.hpp"
#include "popsteady/sinko.hpp"
#include "popsteady/solve.hpp"
#include "popsteady/stability.hpp"
#include "popsteady/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace popsteady;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string file_digest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "unreadable";
    std::ostringstream ss;
    ss << in.rdbuf();
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(ss.str())));
    return std::string("fnv1a64:") + buf;
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const fs::path& config_path, const json& resolved_config,
                    const json& flags) {
    json manifest{
        {"command", command},
        {"tool_version", kVersion},
        {"timestamp", timestamp_utc()},
        {"inputs", json::array({json{{"path", config_path.string()},
                                     {"digest", file_digest(config_path)}}})},
        {"config", resolved_config},
        {"flags", flags},
    };
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

json spectrum_json(const Spectrum& spec) {
    json eigs = json::array();
    for (const auto& ev : spec.eigenvalues) {
        eigs.push_back(json::array({ev.real(), ev.imag()}));
    }
    return eigs;
}

json stability_json(const StabilityReport& report, const SteadyState& state) {
    json disks = json::array();
    for (const auto& d : report.gershgorin) {
        disks.push_back(json::array({d.center, d.radius}));
    }
    json out{
        {"classification", to_string(report.classification)},
        {"rightmost_re", report.rightmost_re},
        {"eigenvalues", spectrum_json(report.spectrum)},
        {"gershgorin", disks},
        {"residual_norm", state.residual_norm},
        {"positive", state.positive},
        {"seed_index", state.seed_index},
        {"iterations", state.iterations},
    };
    json conditions = json::object();
    if (report.sinko_cond) {
        conditions["sinko_cond"] = {{"holds", report.sinko_cond->holds},
                                    {"worst_margin", report.sinko_cond->worst_margin}};
    }
    if (report.pbe_cond) {
        conditions["pbe_cond1"] = {{"holds", report.pbe_cond->cond1},
                                   {"worst_margin", report.pbe_cond->margin1}};
        conditions["pbe_cond2_ka"] = {{"holds", report.pbe_cond->cond2_ka},
                                      {"worst_margin", report.pbe_cond->margin2_ka}};
        conditions["pbe_cond2_gamma"] = {
            {"holds", report.pbe_cond->cond2_gamma},
            {"worst_margin", report.pbe_cond->margin2_gamma}};
    }
    out["conditions"] = conditions;
    return out;
}

void write_profile_csv(const fs::path& path, const GridVector& state) {
    std::ostringstream out;
    out << "x,u\n";
    for (int i = 0; i < state.grid.n(); ++i) {
        out << fmt(state.grid.node(i)) << ',' << fmt(state.coeffs[i]) << "\n";
    }
    write_text(path, out.str());
}

std::optional<SteadyState> solve_steady(const ProblemConfig& cfg) {
    const Grid grid(cfg.n, cfg.x_max);
    if (cfg.model == "sinko") {
        SinkoOperator op = assemble(grid, sinko_rates(cfg));
        return steady_state(op, cfg.existence_tol);
    }
    PBEOperator op(grid, pbe_rates(cfg));
    SolverOptions options;
    options.tol = cfg.solver_tol;
    return find_steady_state(op, options);
}

StabilityReport report_for(const ProblemConfig& cfg, const SteadyState& state) {
    const Grid grid(cfg.n, cfg.x_max);
    if (cfg.model == "sinko") {
        SinkoRates rates = sinko_rates(cfg);
        SinkoOperator op = assemble(grid, rates);
        StabilityReport report = classify(op.matrix, cfg.margin_tol);
        report.sinko_cond = sinko_condition(rates, grid);
        return report;
    }
    PBERates rates = pbe_rates(cfg);
    PBEOperator op(grid, rates);
    StabilityReport report = classify(op.jacobian(state.state.coeffs), cfg.margin_tol);
    report.pbe_cond = pbe_condition(rates, grid, state.state);
    return report;
}

int cmd_steady(const fs::path& config_path, const fs::path& out_dir,
               std::optional<int> n, std::optional<double> x_max,
               std::optional<double> tol) {
    ProblemConfig cfg = load_config(config_path);
    if (n) cfg.n = *n, cfg.raw["n"] = *n;
    if (x_max) cfg.x_max = *x_max, cfg.raw["x_max"] = *x_max;
    if (tol) {
        cfg.solver_tol = *tol;
        cfg.existence_tol = *tol;
        cfg.raw["solver_tol"] = *tol;
        cfg.raw["existence_tol"] = *tol;
    }
    fs::create_directories(out_dir);
    json flags{{"n", cfg.n}, {"x_max", cfg.x_max}};
    write_manifest(out_dir, "steady", config_path, cfg.raw, flags);

    auto state = solve_steady(cfg);
    if (!state || !state->positive) {
        std::cerr << "steady: no positive steady state found\n";
        return 3;
    }
    write_profile_csv(out_dir / "steady_state.csv", state->state);
    StabilityReport report = report_for(cfg, *state);
    write_text(out_dir / "stability.json",
               stability_json(report, *state).dump(2) + "\n");
    std::cout << "steady: " << to_string(report.classification)
              << ", rightmost Re = " << report.rightmost_re
              << ", residual = " << state->residual_norm << "\n";
    return 0;
}

int cmd_sweep(const fs::path& config_path, const fs::path& out_dir, int workers,
              std::optional<double> steps, bool warm_start, bool timing) {
    ProblemConfig cfg = load_config(config_path);
    if (!cfg.sweep) {
        throw ConfigError("sweep", "config has no sweep ranges");
    }
    SweepSpec spec;
    spec.model = cfg.model;
    spec.a = cfg.sweep->a;
    spec.b = cfg.sweep->b;
    spec.c = cfg.sweep->c;
    if (steps) spec.a.step = spec.b.step = spec.c.step = *steps;
    spec.grid_n = cfg.sweep->grid_n;
    spec.x_max = cfg.x_max;
    spec.solver_tol = cfg.solver_tol;
    spec.existence_tol = cfg.existence_tol;
    spec.margin_tol = cfg.margin_tol;
    spec.warm_start = warm_start;

    fs::create_directories(out_dir);
    json flags{{"workers", workers}, {"warm_start", warm_start}, {"timing", timing}};
    write_manifest(out_dir, "sweep", config_path, cfg.raw, flags);
    write_text(out_dir / "sweep_spec.json", sweep_spec_json(spec).dump(2) + "\n");

    auto records = run_sweep(spec, workers);
    std::ostringstream csv;
    std::optional<double> scaled_dx;
    if (cfg.emit_scaled_rightmost) scaled_dx = spec.x_max / spec.grid_n;
    write_sweep_csv(csv, records, timing, scaled_dx);
    write_text(out_dir / "sweep.csv", csv.str());

    long found = 0;
    for (const auto& r : records) {
        if (r.status != SweepStatus::NotFound) ++found;
    }
    std::cout << "sweep: " << records.size() << " points, " << found
              << " with steady states\n";
    return 0;
}

GridVector initial_condition(const std::string& ic, const Grid& grid) {
    if (ic.rfind("const:", 0) == 0) {
        const double v = std::stod(ic.substr(6));
        return GridVector(grid, Vector::Constant(grid.n(), v));
    }
    if (ic.rfind("file:", 0) == 0) {
        const fs::path path = ic.substr(5);
        std::ifstream in(path);
        if (!in) throw ConfigError(path.string(), "cannot open initial condition");
        std::vector<double> values;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            values.push_back(std::stod(line));
        }
        if (static_cast<int>(values.size()) != grid.n()) {
            throw ConfigError(path.string(),
                              "expected " + std::to_string(grid.n()) +
                                  " coefficients, got " + std::to_string(values.size()));
        }
        Vector u(grid.n());
        for (int i = 0; i < grid.n(); ++i) u[i] = values[static_cast<size_t>(i)];
        return GridVector(grid, std::move(u));
    }
    throw ConfigError("--ic", "expected const:<value> or file:<path>");
}

int cmd_simulate(const fs::path& config_path, const fs::path& out_dir,
                 double t_end, const std::string& ic, bool implicit, int steps,
                 int samples, const std::vector<double>& snapshot_times) {
    ProblemConfig cfg = load_config(config_path);
    if (cfg.model != "pbe") {
        throw ConfigError("model", "simulate requires the pbe model");
    }
    const Grid grid(cfg.n, cfg.x_max);
    PBEOperator op(grid, pbe_rates(cfg));
    GridVector u0 = initial_condition(ic, grid);

    fs::create_directories(out_dir);
    json flags{{"t_end", t_end}, {"ic", ic}, {"implicit", implicit},
               {"samples", samples}};
    write_manifest(out_dir, "simulate", config_path, cfg.raw, flags);

    Trajectory traj;
    if (implicit) {
        traj = integrate_implicit(op, u0, t_end, steps, samples);
    } else {
        IntegrateOptions options;
        options.samples = samples;
        traj = integrate(op, u0, t_end, options);
    }

    std::ostringstream csv;
    csv << "t,m0,m1\n";
    for (size_t k = 0; k < traj.times.size(); ++k) {
        csv << fmt(traj.times[k]) << ',' << fmt(traj.m0[k]) << ','
            << fmt(traj.m1[k]) << "\n";
    }
    write_text(out_dir / "trajectory.csv", csv.str());

    for (size_t s = 0; s < snapshot_times.size(); ++s) {
        // nearest recorded sample
        size_t best = 0;
        for (size_t k = 1; k < traj.times.size(); ++k) {
            if (std::abs(traj.times[k] - snapshot_times[s]) <
                std::abs(traj.times[best] - snapshot_times[s])) {
                best = k;
            }
        }
        write_profile_csv(out_dir / ("snapshot_" + std::to_string(s) + ".csv"),
                          traj.states[best]);
    }
    std::cout << "simulate: " << traj.times.size() << " samples to t = "
              << (traj.times.empty() ? 0.0 : traj.times.back()) << "\n";
    return 0;
}

std::vector<int> parse_n_list(const std::string& arg) {
    std::vector<int> ns;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) ns.push_back(std::stoi(item));
    }
    return ns;
}

double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (size_t k = 0; k < xs.size(); ++k) {
        const double lx = std::log(xs[k]);
        const double ly = std::log(ys[k]);
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

int cmd_convergence(const fs::path& config_path, const fs::path& out_dir,
                    const std::string& n_list) {
    ProblemConfig cfg = load_config(config_path);
    std::vector<int> ns = parse_n_list(n_list);
    if (ns.size() < 3) {
        std::cerr << "convergence: need at least 3 grid sizes to fit a slope\n";
        return 1;
    }
    std::sort(ns.begin(), ns.end());
    fs::create_directories(out_dir);
    write_manifest(out_dir, "convergence", config_path, cfg.raw,
                   json{{"n_list", ns}});

    std::ostringstream csv;
    json summary;
    if (cfg.model == "sinko") {
        SinkoRates rates = sinko_rates(cfg);
        ExactSinkoSolution exact(rates, cfg.x_max); // throws if no steady state
        std::vector<double> errors;
        csv << "n,error_inf\n";
        for (int n : ns) {
            const Grid grid(n, cfg.x_max);
            SinkoOperator op = assemble(grid, rates);
            auto state = steady_state(op, cfg.existence_tol);
            if (!state) {
                std::cerr << "convergence: no steady state at n = " << n << "\n";
                return 3;
            }
            double err = 0.0;
            const int fine = 40 * n;
            for (int k = 0; k <= fine; ++k) {
                const double x = cfg.x_max * k / fine;
                err = std::max(err, std::abs(embed(state->state, x) - exact(x)));
            }
            errors.push_back(err);
            csv << n << ',' << fmt(err) << "\n";
        }
        std::vector<double> xs(ns.begin(), ns.end());
        summary["slope"] = fit_loglog_slope(xs, errors);
    } else {
        std::vector<double> m0s, m1s;
        csv << "n,m0,m1\n";
        for (int n : ns) {
            const Grid grid(n, cfg.x_max);
            PBEOperator op(grid, pbe_rates(cfg));
            SolverOptions options;
            options.tol = cfg.solver_tol;
            auto state = find_steady_state(op, options);
            if (!state) {
                std::cerr << "convergence: no steady state at n = " << n << "\n";
                return 3;
            }
            auto [m0, m1] = moments(state->state);
            m0s.push_back(m0);
            m1s.push_back(m1);
            csv << n << ',' << fmt(m0) << ',' << fmt(m1) << "\n";
        }
        summary["reference_n"] = ns.back();
        summary["m0_reference"] = m0s.back();
        summary["m1_reference"] = m1s.back();
        std::vector<double> xs, errs;
        for (size_t k = 0; k + 1 < m0s.size(); ++k) {
            const double err = std::abs(m0s[k] - m0s.back()) +
                               std::abs(m1s[k] - m1s.back());
            if (err > 0.0) {
                xs.push_back(static_cast<double>(ns[k]));
                errs.push_back(err);
            }
        }
        if (xs.size() >= 2) summary["slope"] = fit_loglog_slope(xs, errs);
    }
    write_text(out_dir / "convergence.csv", csv.str());
    write_text(out_dir / "summary.json", summary.dump(2) + "\n");
    std::cout << "convergence: " << summary.dump() << "\n";
    return 0;
}

int cmd_spectrum(const fs::path& config_path, const fs::path& out_dir,
                 const std::string& n_list, bool scale_dx) {
    ProblemConfig cfg = load_config(config_path);
    std::vector<int> ns = parse_n_list(n_list);
    if (ns.empty()) {
        std::cerr << "spectrum: empty n-list\n";
        return 1;
    }
    std::sort(ns.begin(), ns.end());
    fs::create_directories(out_dir);
    write_manifest(out_dir, "spectrum", config_path, cfg.raw,
                   json{{"n_list", ns}, {"scale_dx", scale_dx}});

    std::ostringstream eig_csv, right_csv;
    eig_csv << "n,re,im,scaled\n";
    right_csv << "n,rightmost_re\n";
    for (int n : ns) {
        ProblemConfig point = cfg;
        point.n = n;
        auto state = solve_steady(point);
        if (!state || !state->positive) {
            std::cerr << "spectrum: no steady state at n = " << n << ", skipped\n";
            right_csv << n << ",\n";
            continue;
        }
        const Grid grid(n, cfg.x_max);
        Matrix jac;
        if (cfg.model == "sinko") {
            jac = assemble(grid, sinko_rates(cfg)).matrix;
        } else {
            PBEOperator op(grid, pbe_rates(cfg));
            jac = op.jacobian(state->state.coeffs);
        }
        Spectrum spec = eigen_spectrum(jac);
        const double scale = scale_dx ? grid.dx() : 1.0;
        for (const auto& ev : spec.eigenvalues) {
            eig_csv << n << ',' << fmt(ev.real() * scale) << ','
                    << fmt(ev.imag() * scale) << ',' << (scale_dx ? "true" : "false")
                    << "\n";
        }
        right_csv << n << ',' << fmt(spec.rightmost.real() * scale) << "\n";
    }
    write_text(out_dir / "eigenvalues.csv", eig_csv.str());
    write_text(out_dir / "rightmost.csv", right_csv.str());
    std::cout << "spectrum: wrote eigenvalues for " << ns.size() << " grid sizes\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"steady states and stability of size-structured population models"};
    app.require_subcommand(1);

    std::string config;
    std::string out = "out";
    std::optional<int> n_override;
    std::optional<double> xmax_override, tol_override;
    int workers = 0;
    std::optional<double> steps_override;
    bool warm_start = false, timing = false, implicit = false, scale_dx = false;
    double t_end = 10.0;
    std::string ic = "const:1";
    int implicit_steps = 1000, samples = 50;
    std::string snapshot_arg, n_list;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config, "JSON configuration file")->required();
        cmd->add_option("--out", out, "output directory");
    };

    CLI::App* steady = app.add_subcommand("steady", "compute one steady state");
    add_common(steady);
    steady->add_option("--n", n_override, "grid dimension override");
    steady->add_option("--x-max", xmax_override, "domain size override");
    steady->add_option("--tol", tol_override, "solver/existence tolerance override");

    CLI::App* sweep = app.add_subcommand("sweep", "parameter-region sweep");
    add_common(sweep);
    sweep->add_option("--workers", workers,
                      "worker threads (default: POPSTEADY_WORKERS or 1)");
    sweep->add_option("--steps", steps_override, "override all three range steps");
    sweep->add_flag("--warm-start", warm_start,
                    "seed each point with the previous point's state");
    sweep->add_flag("--timing", timing,
                    "fill the wall_ms column (breaks byte reproducibility)");

    CLI::App* simulate = app.add_subcommand("simulate", "integrate the ODE system");
    add_common(simulate);
    simulate->add_option("--t-end", t_end, "end time (default 10)");
    simulate->add_option("--ic", ic, "initial condition: const:<v> or file:<path>");
    simulate->add_flag("--implicit", implicit, "backward Euler fallback");
    simulate->add_option("--steps", implicit_steps, "implicit-Euler step count");
    simulate->add_option("--samples", samples, "number of output samples (>= 50)");
    simulate->add_option("--snapshots", snapshot_arg,
                         "comma-separated times for state snapshots");

    CLI::App* convergence =
        app.add_subcommand("convergence", "error/moments vs grid dimension");
    add_common(convergence);
    convergence->add_option("--n-list", n_list, "comma-separated grid sizes")
        ->required();

    CLI::App* spectrum = app.add_subcommand("spectrum", "Jacobian spectra vs n");
    add_common(spectrum);
    spectrum->add_option("--n-list", n_list, "comma-separated grid sizes")
        ->required();
    spectrum->add_flag("--scale-dx", scale_dx, "multiply eigenvalues by dx");

    CLI11_PARSE(app, argc, argv);

    try {
        if (steady->parsed()) {
            return cmd_steady(config, out, n_override, xmax_override, tol_override);
        }
        if (sweep->parsed()) {
            if (workers <= 0) {
                const char* env = std::getenv("POPSTEADY_WORKERS");
                workers = env ? std::max(1, std::atoi(env)) : 1;
            }
            return cmd_sweep(config, out, workers, steps_override, warm_start,
                             timing);
        }
        if (simulate->parsed()) {
            std::vector<double> snaps;
            if (!snapshot_arg.empty()) {
                std::stringstream ss(snapshot_arg);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    if (!item.empty()) snaps.push_back(std::stod(item));
                }
            }
            return cmd_simulate(config, out, t_end, ic, implicit, implicit_steps,
                                std::max(samples, 50), snaps);
        }
        if (convergence->parsed()) return cmd_convergence(config, out, n_list);
        if (spectrum->parsed()) return cmd_spectrum(config, out, n_list, scale_dx);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const StiffnessError& e) {
        std::cerr << "numerical advisory: " << e.what() << "\n";
        return 2;
    } catch (const NoSteadyStateError& e) {
        std::cerr << "no steady state: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
