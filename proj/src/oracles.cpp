#include "wavefoa/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace wavefoa {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

PointMassWaveResult point_mass_wave_experiment(int grid_size, double drag, double tau,
                                               double ct, std::vector<int> radii,
                                               int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    if (grid_size % 2 == 0) ++grid_size; // centre the mass on a node
    const Grid g(grid_size, grid_size);
    const int cx = grid_size / 2;
    const int cy = grid_size / 2;

    ScalarField mass(g, 0.0);
    mass.at(cx, cy) = 1.0;

    PdeParams params{1.0, drag, 1.0, tau};
    if (tau > stability_bound(params) / 4.0)
        throw ConfigError("point-mass experiment wants tau <= stability_bound/4");
    const long steps = std::llround(ct / tau);

    PotentialState state(g, params);
    StepOptions opt;
    opt.scheme = Scheme::Implicit;
    opt.threads = threads;
    for (long i = 0; i < steps; ++i) state = step(state, mass, opt);

    PointMassWaveResult res;
    res.radii = radii;
    const double t = static_cast<double>(steps) * tau;
    for (int r : radii) {
        res.numeric_phi.push_back(state.current().at(cx + r, cy));
        res.analytic_phi.push_back(analytic_point_mass_wave(r, t, 1.0));
    }
    for (size_t i = 0; i < radii.size(); ++i) {
        for (size_t j = i + 1; j < radii.size(); ++j) {
            const double num = res.numeric_phi[i] - res.numeric_phi[j];
            const double ana = res.analytic_phi[i] - res.analytic_phi[j];
            res.pair_rel_error.push_back(std::abs(num - ana) / std::abs(ana));
        }
    }
    for (double e : res.pair_rel_error) res.max_pair_rel_error = std::max(res.max_pair_rel_error, e);
    res.elapsed_s = seconds_since(t0);
    return res;
}

HeatKernelResult heat_kernel_experiment(int grid_size, double tau,
                                        std::vector<double> probe_ct, int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    if (grid_size % 2 == 0) ++grid_size;
    const Grid g(grid_size, grid_size);
    const int cx = grid_size / 2;
    const int cy = grid_size / 2;

    const PdeParams params = PdeParams::heat_preset(tau);
    const double diffusivity = 1.0 / params.effective_d();
    const double amplitude = tau / params.effective_d(); // impulse level after one step

    ScalarField impulse(g, 0.0);
    impulse.at(cx, cy) = 1.0;
    const ScalarField no_source(g, 0.0);

    StepOptions opt;
    opt.scheme = Scheme::Explicit;
    opt.threads = threads;

    std::sort(probe_ct.begin(), probe_ct.end());
    const int half = grid_size / 2;
    for (double pct : probe_ct)
        if (!(std::sqrt(2.0 * pct) < half / 6.0))
            throw ConfigError("probe horizon too wide for the grid");

    HeatKernelResult res;
    PotentialState state(g, params);
    state = step(state, impulse, opt); // source acts for exactly one step
    long done = 1;
    for (double pct : probe_ct) {
        // Diffusion time runs from the end of the impulse step.
        const long target = 1 + std::llround(pct / diffusivity / tau);
        for (; done < target; ++done) state = step(state, no_source, opt);
        const double t_diff = static_cast<double>(target - 1) * tau;

        const double sigma = std::sqrt(2.0 * diffusivity * t_diff);
        double worst = 0.0;
        for (int r : {0, static_cast<int>(std::lround(0.5 * sigma)),
                      static_cast<int>(std::lround(sigma)),
                      static_cast<int>(std::lround(1.5 * sigma))}) {
            const double numeric = state.current().at(cx + r, cy) / amplitude;
            const double analytic = analytic_heat_kernel(r, t_diff, diffusivity);
            worst = std::max(worst, std::abs(numeric - analytic) / analytic);
        }
        res.probe_ct.push_back(pct);
        res.max_rel_error.push_back(worst);
        res.worst = std::max(res.worst, worst);
    }
    res.elapsed_s = seconds_since(t0);
    return res;
}

PoissonEquivalenceResult poisson_equivalence_experiment(int grid_size, int n_masses,
                                                        std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const Grid g(grid_size, grid_size);
    std::mt19937_64 rng(seed);

    PoissonEquivalenceResult res;
    for (int i = 0; i < n_masses; ++i) {
        ScalarField mu(g, 0.0);
        for (int y = 1; y < g.height - 1; ++y)
            for (int x = 1; x < g.width - 1; ++x) mu.at(x, y) = uniform(rng);
        const ScalarField iterative = solve_poisson(mu, 1e-10);
        const ScalarField direct = dense_solve_shifted_laplacian(mu, 0.0);
        double diff = 0.0;
        for (size_t n = 0; n < iterative.values().size(); ++n)
            diff = std::max(diff, std::abs(iterative.values()[n] - direct.values()[n]));
        res.max_abs_diff.push_back(diff);
        res.worst = std::max(res.worst, diff);
    }
    res.elapsed_s = seconds_since(t0);
    return res;
}

EnergyDissipationResult energy_dissipation_experiment(int runs, int steps_per_run,
                                                      int grid_size, std::uint64_t seed) {
    const Grid g(grid_size, grid_size);
    std::mt19937_64 rng(seed);
    EnergyDissipationResult res;
    res.runs = runs;

    for (int run = 0; run < runs; ++run) {
        const double m = 0.01 + uniform(rng) * 0.99;
        const double d = 0.01 + uniform(rng) * 0.99; // always > 0
        const double tau = 0.01 + uniform(rng) * 0.09;
        PdeParams params{m, d, 1.0, tau};

        ScalarField curr(g, 0.0), prev(g, 0.0);
        for (int y = 1; y < g.height - 1; ++y)
            for (int x = 1; x < g.width - 1; ++x) {
                curr.at(x, y) = 2.0 * uniform(rng) - 1.0;
                prev.at(x, y) = 2.0 * uniform(rng) - 1.0;
            }
        PotentialState state(std::move(curr), std::move(prev), 0, params);
        const ScalarField no_source(g, 0.0);

        double energy = discrete_energy(state);
        StepOptions opt;
        opt.scheme = Scheme::Implicit;
        for (int s = 0; s < steps_per_run; ++s) {
            state = step(state, no_source, opt);
            const double next = discrete_energy(state);
            if (next > energy) {
                ++res.violations;
                res.worst_increase = std::max(res.worst_increase, next - energy);
            }
            energy = next;
        }
    }
    return res;
}

ScalarField three_blob_mass(Grid g, double amplitude) {
    ScalarField mu(g, 0.0);
    const double sigma = std::max(2.0, 0.06 * std::min(g.width, g.height));
    const double centers[3][2] = {{0.30, 0.30}, {0.70, 0.45}, {0.45, 0.75}};
    for (int y = 1; y < g.height - 1; ++y) {
        for (int x = 1; x < g.width - 1; ++x) {
            double v = 0.0;
            for (const auto& c : centers) {
                const double dx = x - c[0] * (g.width - 1);
                const double dy = y - c[1] * (g.height - 1);
                v += std::exp(-0.5 * (dx * dx + dy * dy) / (sigma * sigma));
            }
            mu.at(x, y) = amplitude * v;
        }
    }
    return mu;
}

BenchResult bench_steps(int grid_size, Scheme scheme, int steps, int threads) {
    const Grid g(grid_size, grid_size);
    const ScalarField mass = three_blob_mass(g, 1.0);

    PdeParams params = PdeParams::damped_wave_preset();
    if (scheme == Scheme::Explicit) params.tau = stability_bound(params) / 2.0;

    PotentialState state(g, params);
    StepOptions opt;
    opt.scheme = scheme;
    opt.threads = threads;

    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < steps; ++i) state = step(state, mass, opt);
    BenchResult res;
    res.seconds = seconds_since(t0);
    res.steps_per_second = res.seconds > 0.0 ? steps / res.seconds : 0.0;
    res.checksum = field_checksum(state.current());
    return res;
}

} // namespace wavefoa
