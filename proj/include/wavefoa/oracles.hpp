#pragma once

#include <cstdint>
#include <vector>

#include "wavefoa/pde.hpp"

namespace wavefoa {

/// Reusable verification experiments: each runs a solver against an
/// independent reference (closed form, dense solve, or the Poisson
/// limit) and reports measured errors. The verify command and the
/// acceptance suite judge these numbers against their tolerances.

struct PointMassWaveResult {
    std::vector<int> radii;               // probe radii, px
    std::vector<double> numeric_phi;      // stepped potential at the probes
    std::vector<double> analytic_phi;     // closed form at the probes
    std::vector<double> pair_rel_error;   // relative error of each probe-pair difference
    double max_pair_rel_error = 0.0;
    double elapsed_s = 0.0;
};

/// Step a unit centre mass under m=1, d=stab drag, c=1 up to ct = probe
/// horizon and compare probe-pair potential differences against the
/// closed-form point-mass wave potential. Differences are compared
/// because the closed form carries a spatially constant part.
PointMassWaveResult point_mass_wave_experiment(int grid_size = 257, double drag = 1e-3,
                                               double tau = 0.04, double ct = 64.0,
                                               std::vector<int> radii = {8, 16, 32},
                                               int threads = 1);

struct HeatKernelResult {
    std::vector<double> probe_ct;       // diffusion horizons probed
    std::vector<double> max_rel_error;  // per horizon, worst probe error
    double worst = 0.0;
    double elapsed_s = 0.0;
};

/// Explicit diffusion-preset run from a one-step impulse source compared
/// against the heat kernel at horizons where the kernel std is small
/// against the half-width.
HeatKernelResult heat_kernel_experiment(int grid_size = 129, double tau = 2e-5,
                                        std::vector<double> probe_ct = {25.0, 50.0},
                                        int threads = 1);

struct PoissonEquivalenceResult {
    std::vector<double> max_abs_diff; // per random mass
    double worst = 0.0;
    double elapsed_s = 0.0;
};

/// solve_poisson vs the dense direct solve on n random masses.
PoissonEquivalenceResult poisson_equivalence_experiment(int grid_size = 16, int n_masses = 10,
                                                        std::uint64_t seed = 2024);

struct EnergyDissipationResult {
    int runs = 0;
    int violations = 0;       // steps where energy increased
    double worst_increase = 0.0;
};

/// Source-free damped-wave runs from random states; counts any step
/// where the discrete energy rises.
EnergyDissipationResult energy_dissipation_experiment(int runs = 100, int steps_per_run = 30,
                                                      int grid_size = 12,
                                                      std::uint64_t seed = 7);

/// Three off-centre Gaussian blobs; the static source of the
/// convergence experiment and of test fixtures.
ScalarField three_blob_mass(Grid g, double amplitude = 1.0);

struct BenchResult {
    double seconds = 0.0;
    double steps_per_second = 0.0;
    std::uint64_t checksum = 0; // FNV-1a of the final potential bits
};

/// Time `steps` solver steps of the damped-wave preset driven by the
/// three-blob source.
BenchResult bench_steps(int grid_size, Scheme scheme, int steps, int threads);

} // namespace wavefoa
