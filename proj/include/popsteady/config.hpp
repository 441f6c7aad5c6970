#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "popsteady/model.hpp"

namespace popsteady {

struct RangeSpec {
    double lo = 0.0;
    double hi = 0.0;
    double step = 1.0;

    int count() const;
    double at(int k) const { return lo + k * step; }
};

struct SweepConfig {
    RangeSpec a, b, c;
    int grid_n = 100;
};

/// Resolved run configuration. Flags may override scalar fields after
/// loading (flag wins; see the CLI).
struct ProblemConfig {
    std::string model;  // "sinko" | "pbe"
    std::string family; // "canonical-sinko" | "canonical-pbe" | "table"
    ParamPoint params;
    double x_max = 1.0;
    int n = 100;
    double existence_tol = 2e-4;  // sinko: sigma_min/sigma_max threshold
    double solver_tol = -1.0;     // pbe: <0 means 1e-8 * sqrt(n)
    double margin_tol = 1e-9;     // stability classification band
    bool emit_scaled_rightmost = false;
    std::optional<SweepConfig> sweep;
    nlohmann::json raw;           // resolved document, for the manifest
};

ProblemConfig load_config(const std::filesystem::path& path);
ProblemConfig parse_config(const nlohmann::json& doc);

using RatesVariant = std::variant<SinkoRates, PBERates>;

/// Builds rate closures from a configuration document. Dispatches on
/// "family"; the "table" family reads sampled values with linear
/// interpolation and re-checks the gamma normalization per parent slice,
/// rescaling when the integral is within 5% of one and rejecting otherwise.
/// Throws ConfigError with the offending field path.
RatesVariant rates_from_config(const nlohmann::json& cfg);

SinkoRates sinko_rates(const ProblemConfig& cfg);
PBERates pbe_rates(const ProblemConfig& cfg);

} // namespace popsteady
