#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "wavefoa/foa.hpp"
#include "wavefoa/metrics.hpp"

namespace wavefoa {

/// Flat run configuration mirrored 1:1 by the JSON config file.
/// Precedence: preset defaults < config file < command-line flags.
/// Unknown keys in the file are hard errors.
struct RunConfig {
    std::string model = "DW"; // H | DW | custom

    // PDE
    double m = 1.0 / 25000.0;
    double d = 1.0 / 100.0;
    double c = 1.0;
    double tau = 0.04;
    std::string scheme = "implicit"; // explicit | implicit

    // mass / inhibition
    double alpha1 = 1.0;
    double alpha2 = 1.0;
    double k = 250000.0;
    double beta = 10.0;
    double sigma = 0.0; // 0 = w/16 at run time
    double gamma = 0.1;

    // FOA dynamics
    double lambda = 5.0;
    double v_fix = 25.0;
    double t_fix = 0.1;
    double jitter = -1.0; // <0 = 5% of min(w,h)

    // saliency / metrics
    double sigma_map = 0.0; // 0 = w/16
    int sed_rows = 5;
    int sed_cols = 5;
    int stde_k = 3;

    // run shape
    double duration = 5.0;
    double fps = 25.0;
    int n_scanpaths = 5;
    std::uint64_t seed = 0;
    int threads = 1;
    int snapshot_stride = 0; // 0 = no potential snapshots
    std::string out_dir = "out";

    /// Apply the named preset's PDE/dynamics row to m, d, c, lambda.
    void apply_model_preset(const std::string& name);
    /// Merge keys from a JSON file; unknown keys throw ConfigError.
    void load_file(const std::filesystem::path& path);
    void validate() const;

    SimulationParams simulation_params(const Grid& g) const;
    MetricsConfig metrics_config() const;
    double saliency_sigma(const Grid& g) const;

    /// Serialise every field (defaults materialised) to pretty JSON.
    std::string to_json() const;
    /// Write to_json() as <out_dir>/config.resolved.json.
    void echo_resolved(const std::filesystem::path& out_dir) const;
};

} // namespace wavefoa
