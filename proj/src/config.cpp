#include "popsteady/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <vector>

#include "popsteady/errors.hpp"

namespace popsteady {

using nlohmann::json;

int RangeSpec::count() const {
    if (!(step > 0.0)) throw ConfigError("sweep", "step must be positive");
    if (hi < lo) throw ConfigError("sweep", "hi must be >= lo");
    return static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

namespace {

double get_number(const json& j, const std::string& key, const std::string& path,
                  std::optional<double> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(path + key, "missing required number");
    }
    if (!j.at(key).is_number()) {
        throw ConfigError(path + key, "expected a number");
    }
    return j.at(key).get<double>();
}

std::string get_string(const json& j, const std::string& key,
                       const std::string& path) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        throw ConfigError(path + key, "missing required string");
    }
    return j.at(key).get<std::string>();
}

std::vector<double> get_array(const json& j, const std::string& key,
                              const std::string& path) {
    if (!j.contains(key) || !j.at(key).is_array()) {
        throw ConfigError(path + key, "missing required array");
    }
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) throw ConfigError(path + key, "non-numeric entry");
        out.push_back(v.get<double>());
    }
    return out;
}

/// Sampled 1-D rate with linear interpolation, clamped outside the range.
class Table1D {
public:
    Table1D(std::vector<double> xs, std::vector<double> vs, const std::string& path)
        : xs_(std::move(xs)), vs_(std::move(vs)) {
        if (xs_.size() != vs_.size() || xs_.size() < 2) {
            throw ConfigError(path, "x and value arrays must match, length >= 2");
        }
        if (!std::is_sorted(xs_.begin(), xs_.end())) {
            throw ConfigError(path, "x samples must be ascending");
        }
    }

    double operator()(double x) const {
        if (x <= xs_.front()) return vs_.front();
        if (x >= xs_.back()) return vs_.back();
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        const size_t k = static_cast<size_t>(it - xs_.begin());
        const double t = (x - xs_[k - 1]) / (xs_[k] - xs_[k - 1]);
        return (1.0 - t) * vs_[k - 1] + t * vs_[k];
    }

    const std::vector<double>& values() const { return vs_; }

private:
    std::vector<double> xs_, vs_;
};

/// Sampled 2-D kernel with bilinear interpolation, clamped outside the grid.
/// rows index the first argument, columns the second.
class Table2D {
public:
    Table2D(std::vector<double> xs, std::vector<double> ys,
            std::vector<std::vector<double>> vals, const std::string& path)
        : xs_(std::move(xs)), ys_(std::move(ys)), vals_(std::move(vals)) {
        if (xs_.size() < 2 || ys_.size() < 2) {
            throw ConfigError(path, "x and y grids need length >= 2");
        }
        if (vals_.size() != xs_.size()) {
            throw ConfigError(path, "value row count must match x grid");
        }
        for (const auto& row : vals_) {
            if (row.size() != ys_.size()) {
                throw ConfigError(path, "value column count must match y grid");
            }
        }
        if (!std::is_sorted(xs_.begin(), xs_.end()) ||
            !std::is_sorted(ys_.begin(), ys_.end())) {
            throw ConfigError(path, "grids must be ascending");
        }
    }

    double operator()(double x, double y) const {
        const auto [i, tx] = locate(xs_, x);
        const auto [j, ty] = locate(ys_, y);
        return (1 - tx) * (1 - ty) * vals_[i][j] + tx * (1 - ty) * vals_[i + 1][j] +
               (1 - tx) * ty * vals_[i][j + 1] + tx * ty * vals_[i + 1][j + 1];
    }

    std::vector<std::vector<double>>& values() { return vals_; }
    const std::vector<double>& xgrid() const { return xs_; }
    const std::vector<double>& ygrid() const { return ys_; }

private:
    static std::pair<size_t, double> locate(const std::vector<double>& g, double v) {
        if (v <= g.front()) return {0, 0.0};
        if (v >= g.back()) return {g.size() - 2, 1.0};
        const auto it = std::upper_bound(g.begin(), g.end(), v);
        const size_t k = static_cast<size_t>(it - g.begin());
        return {k - 1, (v - g[k - 1]) / (g[k] - g[k - 1])};
    }

    std::vector<double> xs_, ys_;
    std::vector<std::vector<double>> vals_;
};

Table1D load_table1d(const json& tables, const std::string& name) {
    const std::string path = "tables." + name + ".";
    if (!tables.contains(name)) {
        throw ConfigError("tables." + name, "missing table for rate function");
    }
    const json& t = tables.at(name);
    return Table1D(get_array(t, "x", path), get_array(t, "value", path),
                   "tables." + name);
}

Table2D load_table2d(const json& tables, const std::string& name) {
    const std::string path = "tables." + name + ".";
    if (!tables.contains(name)) {
        throw ConfigError("tables." + name, "missing table for kernel");
    }
    const json& t = tables.at(name);
    if (!t.contains("value") || !t.at("value").is_array()) {
        throw ConfigError(path + "value", "missing 2-d value array");
    }
    std::vector<std::vector<double>> vals;
    for (const auto& row : t.at("value")) {
        std::vector<double> r;
        for (const auto& v : row) {
            if (!v.is_number()) throw ConfigError(path + "value", "non-numeric entry");
            r.push_back(v.get<double>());
        }
        vals.push_back(std::move(r));
    }
    return Table2D(get_array(t, "x", path), get_array(t, "y", path),
                   std::move(vals), "tables." + name);
}

void require_nonnegative(const Table1D& t, const std::string& path) {
    for (double v : t.values()) {
        if (v < 0.0 || !std::isfinite(v)) {
            throw ConfigError(path, "sampled values must be finite and >= 0");
        }
    }
}

/// Trapezoid integral of a gamma slice over daughters in [0, parent].
double slice_integral(const std::vector<double>& xs,
                      const std::vector<std::vector<double>>& vals, size_t col,
                      double parent) {
    double integral = 0.0;
    double prev_x = 0.0, prev_v = 0.0;
    bool first = true;
    for (size_t i = 0; i < xs.size(); ++i) {
        double x = xs[i];
        double v = vals[i][col];
        if (x > parent) {
            // cut the last trapezoid at the parent size, gamma is 0 beyond
            if (!first && prev_x < parent) {
                const double t = (parent - prev_x) / (x - prev_x);
                const double vc = (1 - t) * prev_v + t * v;
                integral += 0.5 * (prev_v + vc) * (parent - prev_x);
            }
            return integral;
        }
        if (!first) integral += 0.5 * (prev_v + v) * (x - prev_x);
        prev_x = x;
        prev_v = v;
        first = false;
    }
    return integral;
}

SinkoRates table_sinko(const json& cfg) {
    if (!cfg.contains("tables")) throw ConfigError("tables", "table family needs tables");
    const json& tables = cfg.at("tables");
    auto q = load_table1d(tables, "q");
    auto g = load_table1d(tables, "g");
    auto mu = load_table1d(tables, "mu");
    require_nonnegative(q, "tables.q.value");
    require_nonnegative(mu, "tables.mu.value");
    for (double v : g.values()) {
        if (!(v > 0.0)) throw ConfigError("tables.g.value", "growth must stay positive");
    }
    return {
        [q = std::move(q)](double x) { return q(x); },
        [g = std::move(g)](double x) { return g(x); },
        [mu = std::move(mu)](double x) { return mu(x); },
    };
}

PBERates table_pbe(const json& cfg) {
    SinkoRates base = table_sinko(cfg);
    const json& tables = cfg.at("tables");
    auto kf = load_table1d(tables, "k_f");
    require_nonnegative(kf, "tables.k_f.value");
    auto ka = load_table2d(tables, "k_a");
    auto gam = load_table2d(tables, "gamma");

    // symmetry spot-check for the aggregation kernel
    const auto& kx = ka.xgrid();
    const auto& ky = ka.ygrid();
    for (double x : {kx.front(), 0.5 * (kx.front() + kx.back()), kx.back()}) {
        for (double y : {ky.front(), 0.5 * (ky.front() + ky.back()), ky.back()}) {
            const double fwd = ka(x, y), rev = ka(y, x);
            if (std::abs(fwd - rev) > 1e-9 * (1.0 + std::abs(fwd))) {
                throw ConfigError("tables.k_a.value", "kernel samples are not symmetric");
            }
            if (fwd < 0.0) throw ConfigError("tables.k_a.value", "kernel must be >= 0");
        }
    }

    // per-parent-slice normalization of gamma: rescale within 5%, reject beyond
    {
        auto& vals = gam.values();
        const auto& xs = gam.xgrid();
        const auto& ys = gam.ygrid();
        for (size_t j = 0; j < ys.size(); ++j) {
            if (!(ys[j] > 0.0)) continue;
            // slices spanning fewer than a handful of daughter samples cannot
            // be integrated meaningfully from the table; leave them untouched
            size_t support_samples = 0;
            for (double x : xs) {
                if (x > 0.0 && x <= ys[j]) ++support_samples;
            }
            if (support_samples < 6) continue;
            const double integral = slice_integral(xs, vals, j, ys[j]);
            if (std::abs(integral - 1.0) > 0.05) {
                throw ConfigError("tables.gamma.value",
                                  "daughter density integrates to " +
                                      std::to_string(integral) + " for parent " +
                                      std::to_string(ys[j]) +
                                      "; beyond the 5% rescale band");
            }
            for (size_t i = 0; i < xs.size(); ++i) vals[i][j] /= integral;
        }
    }

    // parents thinner than this cannot be verified against the table
    double resolved_y_min = 0.0;
    {
        size_t positive_seen = 0;
        for (double x : gam.xgrid()) {
            if (x > 0.0 && ++positive_seen == 6) {
                resolved_y_min = x;
                break;
            }
        }
    }

    PBERates r;
    r.q = base.q;
    r.g = base.g;
    r.mu = base.mu;
    r.kf = [kf = std::move(kf)](double x) { return kf(x); };
    r.ka = [ka = std::move(ka)](double x, double y) { return ka(x, y); };
    r.gamma = [gam = std::move(gam)](double x, double y) {
        if (x > y || y <= 0.0) return 0.0;
        return std::max(0.0, gam(x, y));
    };
    const double x_max = get_number(cfg, "x_max", "", 1.0);
    check_gamma_normalization(r, x_max, 1e-2, 7, resolved_y_min);
    return r;
}

} // namespace

RatesVariant rates_from_config(const json& cfg) {
    const std::string family = get_string(cfg, "family", "");
    const double x_max = get_number(cfg, "x_max", "", 1.0);
    ParamPoint p{get_number(cfg, "a", "", 0.0), get_number(cfg, "b", "", 0.0),
                 get_number(cfg, "c", "", 0.0)};
    try {
        if (family == "canonical-sinko") {
            return sinko_canonical(p);
        }
        if (family == "canonical-pbe") {
            PBERates r = pbe_canonical(p);
            check_gamma_normalization(r, x_max);
            return r;
        }
        if (family == "table") {
            const std::string model = get_string(cfg, "model", "");
            if (model == "sinko") return table_sinko(cfg);
            if (model == "pbe") return table_pbe(cfg);
            throw ConfigError("model", "expected \"sinko\" or \"pbe\", got \"" + model + "\"");
        }
    } catch (const InvalidRateError& e) {
        throw ConfigError("family", e.what());
    }
    throw ConfigError("family", "unknown rate family \"" + family + "\"");
}

ProblemConfig parse_config(const json& doc) {
    ProblemConfig cfg;
    cfg.model = get_string(doc, "model", "");
    if (cfg.model != "sinko" && cfg.model != "pbe") {
        throw ConfigError("model", "expected \"sinko\" or \"pbe\"");
    }
    cfg.family = doc.contains("family")
                     ? get_string(doc, "family", "")
                     : (cfg.model == "sinko" ? "canonical-sinko" : "canonical-pbe");
    cfg.params = {get_number(doc, "a", "", 0.0), get_number(doc, "b", "", 0.0),
                  get_number(doc, "c", "", 0.0)};
    cfg.x_max = get_number(doc, "x_max", "", 1.0);
    if (!(cfg.x_max > 0.0)) throw ConfigError("x_max", "must be positive");
    cfg.n = static_cast<int>(get_number(doc, "n", "", 100.0));
    if (cfg.n < 1) throw ConfigError("n", "must be >= 1");
    cfg.existence_tol = get_number(doc, "existence_tol", "", 2e-4);
    if (!(cfg.existence_tol > 0.0)) throw ConfigError("existence_tol", "must be positive");
    cfg.solver_tol = get_number(doc, "solver_tol", "", -1.0);
    cfg.margin_tol = get_number(doc, "margin_tol", "", 1e-9);
    if (doc.contains("emit_scaled_rightmost")) {
        if (!doc.at("emit_scaled_rightmost").is_boolean()) {
            throw ConfigError("emit_scaled_rightmost", "expected a boolean");
        }
        cfg.emit_scaled_rightmost = doc.at("emit_scaled_rightmost").get<bool>();
    }
    if (doc.contains("sweep")) {
        const json& s = doc.at("sweep");
        SweepConfig sw;
        for (auto [name, range] : {std::pair<const char*, RangeSpec*>{"a", &sw.a},
                                   {"b", &sw.b},
                                   {"c", &sw.c}}) {
            if (!s.contains(name)) {
                throw ConfigError(std::string("sweep.") + name, "missing range");
            }
            const json& r = s.at(name);
            const std::string path = std::string("sweep.") + name + ".";
            range->lo = get_number(r, "lo", path);
            range->hi = get_number(r, "hi", path);
            range->step = get_number(r, "step", path);
            if (!(range->step > 0.0)) throw ConfigError(path + "step", "must be positive");
            if (range->hi < range->lo) throw ConfigError(path + "hi", "must be >= lo");
        }
        sw.grid_n = static_cast<int>(get_number(s, "grid_n", "sweep.", 100.0));
        if (sw.grid_n < 1) throw ConfigError("sweep.grid_n", "must be >= 1");
        cfg.sweep = sw;
    }
    cfg.raw = doc;
    // materialize resolved defaults so the manifest records the effective run
    cfg.raw["model"] = cfg.model;
    cfg.raw["family"] = cfg.family;
    cfg.raw["a"] = cfg.params.a;
    cfg.raw["b"] = cfg.params.b;
    cfg.raw["c"] = cfg.params.c;
    cfg.raw["x_max"] = cfg.x_max;
    cfg.raw["n"] = cfg.n;
    cfg.raw["existence_tol"] = cfg.existence_tol;
    cfg.raw["solver_tol"] = cfg.solver_tol;
    cfg.raw["margin_tol"] = cfg.margin_tol;
    cfg.raw["emit_scaled_rightmost"] = cfg.emit_scaled_rightmost;
    return cfg;
}

ProblemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open config file");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string(), std::string("JSON parse error: ") + e.what());
    }
    return parse_config(doc);
}

SinkoRates sinko_rates(const ProblemConfig& cfg) {
    auto rates = rates_from_config(cfg.raw);
    if (auto* r = std::get_if<SinkoRates>(&rates)) return *r;
    throw ConfigError("family", "family \"" + cfg.family +
                                    "\" does not provide sinko rates");
}

PBERates pbe_rates(const ProblemConfig& cfg) {
    auto rates = rates_from_config(cfg.raw);
    if (auto* r = std::get_if<PBERates>(&rates)) return *r;
    throw ConfigError("family", "family \"" + cfg.family +
                                    "\" does not provide pbe rates");
}

} // namespace popsteady
