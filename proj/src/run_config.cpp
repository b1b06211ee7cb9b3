#include "wavefoa/run_config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace wavefoa {

using nlohmann::json;

void RunConfig::apply_model_preset(const std::string& name) {
    if (name == "H") {
        m = 0.0;
        d = 1.0 / 2500.0;
        c = 1.0;
        lambda = 5.0;
        alpha1 = 1.0;
        alpha2 = 1.0;
    } else if (name == "DW") {
        m = 1.0 / 25000.0;
        d = 1.0 / 100.0;
        c = 1.0;
        lambda = 5.0;
        alpha1 = 1.0;
        alpha2 = 1.0;
    } else if (name != "custom") {
        throw ConfigError("unknown model '" + name + "' (expected H, DW or custom)");
    }
    model = name;
}

void RunConfig::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("bad config json: " + std::string(e.what()));
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    // The model preset applies first so explicit keys can override it.
    if (j.contains("model")) apply_model_preset(j.at("model").get<std::string>());

    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "model") continue;
            else if (key == "m") m = value.get<double>();
            else if (key == "d") d = value.get<double>();
            else if (key == "c") c = value.get<double>();
            else if (key == "tau") tau = value.get<double>();
            else if (key == "scheme") scheme = value.get<std::string>();
            else if (key == "alpha1") alpha1 = value.get<double>();
            else if (key == "alpha2") alpha2 = value.get<double>();
            else if (key == "k") k = value.get<double>();
            else if (key == "beta") beta = value.get<double>();
            else if (key == "sigma") sigma = value.get<double>();
            else if (key == "gamma") gamma = value.get<double>();
            else if (key == "lambda") lambda = value.get<double>();
            else if (key == "v_fix") v_fix = value.get<double>();
            else if (key == "t_fix") t_fix = value.get<double>();
            else if (key == "jitter") jitter = value.get<double>();
            else if (key == "sigma_map") sigma_map = value.get<double>();
            else if (key == "sed_rows") sed_rows = value.get<int>();
            else if (key == "sed_cols") sed_cols = value.get<int>();
            else if (key == "stde_k") stde_k = value.get<int>();
            else if (key == "duration") duration = value.get<double>();
            else if (key == "fps") fps = value.get<double>();
            else if (key == "n_scanpaths") n_scanpaths = value.get<int>();
            else if (key == "seed") seed = value.get<std::uint64_t>();
            else if (key == "threads") threads = value.get<int>();
            else if (key == "snapshot_stride") snapshot_stride = value.get<int>();
            else if (key == "out_dir") out_dir = value.get<std::string>();
            else throw ConfigError("unknown config key '" + key + "'");
        } catch (const json::exception& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }
}

void RunConfig::validate() const {
    if (model != "H" && model != "DW" && model != "custom")
        throw ConfigError("model must be H, DW or custom");
    if (scheme != "explicit" && scheme != "implicit")
        throw ConfigError("scheme must be explicit or implicit");
    if (duration <= 0.0) throw ConfigError("duration must be > 0");
    if (tau <= 0.0) throw ConfigError("tau must be > 0");
    if (fps <= 0.0) throw ConfigError("fps must be > 0");
    if (n_scanpaths < 1) throw ConfigError("n_scanpaths must be >= 1");
    if (threads < 1) throw ConfigError("threads must be >= 1");
    if (snapshot_stride < 0) throw ConfigError("snapshot_stride must be >= 0");
    PdeParams{m, d, c, tau}.validate();
}

SimulationParams RunConfig::simulation_params(const Grid& g) const {
    validate();
    SimulationParams p;
    p.pde = PdeParams{m, d, c, tau};
    p.mass = MassParams{alpha1, alpha2, k, beta, sigma, gamma}.resolved_for(g);
    p.dyn = DynamicsParams{lambda, v_fix, t_fix, jitter, seed}.resolved_for(g);
    p.scheme = scheme == "explicit" ? Scheme::Explicit : Scheme::Implicit;
    p.duration = duration;
    p.threads = threads;
    return p;
}

MetricsConfig RunConfig::metrics_config() const { return {sed_rows, sed_cols, stde_k}; }

double RunConfig::saliency_sigma(const Grid& g) const {
    return sigma_map > 0.0 ? sigma_map : g.width / 16.0;
}

std::string RunConfig::to_json() const {
    json j;
    j["model"] = model;
    j["m"] = m;
    j["d"] = d;
    j["c"] = c;
    j["tau"] = tau;
    j["scheme"] = scheme;
    j["alpha1"] = alpha1;
    j["alpha2"] = alpha2;
    j["k"] = k;
    j["beta"] = beta;
    j["sigma"] = sigma;
    j["gamma"] = gamma;
    j["lambda"] = lambda;
    j["v_fix"] = v_fix;
    j["t_fix"] = t_fix;
    j["jitter"] = jitter;
    j["sigma_map"] = sigma_map;
    j["sed_rows"] = sed_rows;
    j["sed_cols"] = sed_cols;
    j["stde_k"] = stde_k;
    j["duration"] = duration;
    j["fps"] = fps;
    j["n_scanpaths"] = n_scanpaths;
    j["seed"] = seed;
    j["threads"] = threads;
    j["snapshot_stride"] = snapshot_stride;
    j["out_dir"] = out_dir;
    return j.dump(2) + "\n";
}

void RunConfig::echo_resolved(const std::filesystem::path& out_dir_path) const {
    std::filesystem::create_directories(out_dir_path);
    std::ofstream out(out_dir_path / "config.resolved.json", std::ios::trunc);
    if (!out) throw IoError("cannot write resolved config");
    out << to_json();
}

} // namespace wavefoa
