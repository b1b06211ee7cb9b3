#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wavefoa/mass.hpp"
#include "wavefoa/pde.hpp"

namespace wavefoa {

/// Focus-of-attention state: position a(t) and velocity in pixels.
struct FoaState {
    Vec2 pos;
    Vec2 vel;
};

/// Trajectory integration and fixation-extraction constants. The
/// 25 px/s threshold sits between the model's fixation creep (< 10)
/// and its saccade peaks (> 40) at desk-scale resolutions.
struct DynamicsParams {
    double lambda = 5.0;   // velocity dissipation, 1/s
    double v_fix = 25.0;   // fixation speed threshold, px/s
    double t_fix = 0.1;    // minimum fixation duration, s
    double jitter = -1.0;  // initial-position jitter radius, px; <0 = 5% of min(w,h)
    std::uint64_t seed = 0;

    DynamicsParams resolved_for(const Grid& g) const;
};

struct Fixation {
    double x = 0.0;
    double y = 0.0;
    double onset = 0.0;    // seconds
    double duration = 0.0; // seconds
};

/// Ordered fixations for one stimulus; the unit of scanpath metrics.
struct Scanpath {
    std::string stimulus_id;
    std::vector<Fixation> fixations;
};

struct TrajectorySample {
    double t = 0.0;
    Vec2 pos;
};

/// One semi-implicit Euler step of a'' = grad(phi)(a) - lambda a':
///   v' = v + tau (grad - lambda v),  a' = a + tau v',
/// then the position is clamped to the interior margin and the velocity
/// component normal to a hit wall is zeroed.
FoaState step_foa(const FoaState& s, const ScalarField& potential,
                  const DynamicsParams& dp, double tau);

/// Maximal runs of consecutive samples slower than v_fix and at least
/// t_fix long become fixations at the run centroid; faster stretches are
/// saccades and are discarded. Samples must be uniformly spaced in t.
Scanpath extract_fixations(const std::vector<TrajectorySample>& trajectory,
                           const DynamicsParams& dp,
                           const std::string& stimulus_id = {});

/// Duration-weighted fixation histogram blurred with an isotropic
/// Gaussian of std sigma_map and normalised to sum 1.
ScalarField accumulate_saliency(const std::vector<Scanpath>& paths, const Grid& grid,
                                double sigma_map);

struct SimulationParams {
    PdeParams pde = PdeParams::damped_wave_preset();
    MassParams mass;
    DynamicsParams dyn;
    Scheme scheme = Scheme::Implicit;
    double duration = 5.0; // seconds of simulated exposure
    int threads = 1;
};

struct SimulationResult {
    Scanpath scanpath;
    std::vector<TrajectorySample> trajectory;
    ScalarField potential;
    InhibitionField inhibition;
    ScalarField last_mass;
    long steps = 0;
};

/// Per-step observer: (step index, potential, inhibition, foa).
using StepObserver =
    std::function<void(long, const ScalarField&, const InhibitionField&, const FoaState&)>;

/// The full simulation loop. Each step: compute mass, advance the
/// potential, move the FOA, update inhibition. Frames are consumed one
/// per step; for multi-frame streams the step length is the frame
/// interval (params.pde.tau applies to static single-frame runs), and
/// the last frame is held once the stream ends. The initial FOA is the
/// retina centre plus a seeded uniform-disk jitter; identical seeds and
/// inputs give bit-identical scanpaths.
SimulationResult simulate(const std::vector<Frame>& frames, const SimulationParams& params,
                          const std::string& stimulus_id = {},
                          const StepObserver& observer = nullptr);

} // namespace wavefoa
