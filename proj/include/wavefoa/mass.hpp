#pragma once

#include <optional>

#include "wavefoa/grid.hpp"

namespace wavefoa {

/// One luma frame of the stimulus stream, brightness in [0,1].
struct Frame {
    ScalarField brightness;
    double timestamp = 0.0; // seconds, strictly increasing within a stream
};

/// Inhibition-of-return state; every value stays in [0,1].
struct InhibitionField {
    ScalarField level;

    InhibitionField() = default;
    explicit InhibitionField(Grid g) : level(g, 0.0) {}
};

/// Source-term and IoR constants.
struct MassParams {
    double alpha1 = 1.0;    // detail weight
    double alpha2 = 1.0;    // motion weight
    double k = 250000.0;    // potential rescale, applied to the source
    double beta = 10.0;     // IoR deposit rate, 1/s
    double sigma = 0.0;     // IoR Gaussian radius, px; 0 = resolve to w/16
    double gamma = 0.1;     // IoR recovery rate, 1/s

    /// Fill grid-dependent defaults (sigma = w/16 when left at 0).
    MassParams resolved_for(const Grid& g) const;
    void validate() const;
};

/// Virtual mass density mu = k * (a1*|grad b| + a2*|db/dt|) * (1 - inh).
/// The detail term uses central differences with a zero boundary ring;
/// the motion term is zero when prev is absent. Result is nonnegative
/// with a zero boundary ring.
ScalarField compute_mass(const Frame& curr, const Frame* prev,
                         const InhibitionField& inh, const MassParams& p);

/// compute_mass rescaled so the suppressed feature field integrates to
/// exactly k: the total attracting mass is k at any resolution and stays
/// k as inhibition erodes attended regions. This is what the simulation
/// loop feeds the potential; with raw per-pixel feature sums the model
/// constants put the FOA oscillator far beyond what the time step can
/// resolve.
ScalarField compute_mass_normalized(const Frame& curr, const Frame* prev,
                                    const InhibitionField& inh, const MassParams& p);

/// One IoR update over a time slice tau:
///   inh'(x) = clamp(inh(x) + beta*tau*exp(-|x-foa|^2 / 2 sigma^2)
///                          - gamma*tau*inh(x), 0, 1).
InhibitionField update_inhibition(InhibitionField inh, Vec2 foa,
                                  const MassParams& p, double tau);

} // namespace wavefoa
