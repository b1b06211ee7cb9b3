#pragma once

#include <vector>

#include "wavefoa/foa.hpp"
#include "wavefoa/grid.hpp"

namespace wavefoa {

/// Pooled human fixation locations for one stimulus.
struct FixationSet {
    std::vector<Vec2> points;
};

struct MetricsConfig {
    int sed_rows = 5;  // region grid for the string quantisation
    int sed_cols = 5;
    int stde_k = 3;    // embedding length; clamped to the shorter path
};

struct MetricReport {
    double auc = 0.0;
    double nss = 0.0;
    double sed_mean = 0.0;
    double sed_best = 0.0;  // min over pairs
    double stde_mean = 0.0;
    double stde_best = 0.0; // max over pairs
};

/// Normalized scanpath saliency: mean z-scored map value at the
/// fixations (bilinear sampling, population std).
double nss(const ScalarField& sal, const FixationSet& fix);

/// ROC area with fixated pixels as positives and every other pixel as a
/// negative; thresholds sweep the fixated saliency values and ties count
/// half, which makes the sweep equal to the trapezoidal ROC.
double auc_judd(const ScalarField& sal, const FixationSet& fix);

/// String edit distance between the two fixation sequences quantised on
/// a rows x cols partition of the retina.
int sed(const Scanpath& a, const Scanpath& b, const Grid& retina, int rows = 5,
        int cols = 5);

/// Scaled time-delay embedding similarity in (0,1]: embed every
/// consecutive k-tuple of fixations scaled by the retina diagonal, score
/// exp(-min distance) averaged over tuples, symmetrised.
double stde(const Scanpath& a, const Scanpath& b, const Grid& retina, int k = 3);

/// Pairwise SED/STDE between model and human scanpaths with mean and
/// best aggregation. auc/nss fields are left 0; the evaluation pipeline
/// fills them from the saliency map.
MetricReport aggregate(const std::vector<Scanpath>& model_paths,
                       const std::vector<Scanpath>& human_paths, const Grid& retina,
                       const MetricsConfig& cfg = {});

} // namespace wavefoa
