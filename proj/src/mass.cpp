#include "wavefoa/mass.hpp"

#include <algorithm>
#include <cmath>

namespace wavefoa {

MassParams MassParams::resolved_for(const Grid& g) const {
    MassParams out = *this;
    if (out.sigma <= 0.0) out.sigma = g.width / 16.0;
    out.validate();
    return out;
}

void MassParams::validate() const {
    if (alpha1 < 0.0 || alpha2 < 0.0) throw ConfigError("alpha1/alpha2 must be >= 0");
    if (k <= 0.0) throw ConfigError("k must be > 0");
    if (beta < 0.0 || gamma < 0.0) throw ConfigError("beta/gamma must be >= 0");
    if (sigma <= 0.0) throw ConfigError("sigma must be > 0 (or left at 0 for w/16)");
}

namespace {

// Weighted detail + motion features, interior only; the shared core of
// both mass variants.
ScalarField feature_field(const Frame& curr, const Frame* prev, const InhibitionField& inh,
                          const MassParams& p) {
    const Grid& g = curr.brightness.grid();
    if (!(inh.level.grid() == g))
        throw GridMismatchError("inhibition grid does not match frame grid");

    double inv_dt = 0.0;
    if (prev != nullptr) {
        if (!(prev->brightness.grid() == g))
            throw GridMismatchError("previous frame grid does not match current frame");
        const double dt = curr.timestamp - prev->timestamp;
        if (dt <= 0.0)
            throw NonMonotonicTimeError("frame timestamps must be strictly increasing");
        inv_dt = 1.0 / dt;
    }

    const int w = g.width;
    const int h = g.height;
    ScalarField feat(g, 0.0);
    const ScalarField& b = curr.brightness;
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            const double gx = 0.5 * (b.at(x + 1, y) - b.at(x - 1, y));
            const double gy = 0.5 * (b.at(x, y + 1) - b.at(x, y - 1));
            double source = p.alpha1 * std::hypot(gx, gy);
            if (prev != nullptr)
                source += p.alpha2 * std::abs(b.at(x, y) - prev->brightness.at(x, y)) * inv_dt;
            feat.at(x, y) = source;
        }
    }
    return feat;
}

ScalarField scale_and_suppress(ScalarField feat, const InhibitionField& inh, double k) {
    for (int y = 1; y < feat.height() - 1; ++y)
        for (int x = 1; x < feat.width() - 1; ++x) {
            const double suppression = 1.0 - std::clamp(inh.level.at(x, y), 0.0, 1.0);
            feat.at(x, y) *= k * suppression;
        }
    return feat;
}

} // namespace

ScalarField compute_mass(const Frame& curr, const Frame* prev, const InhibitionField& inh,
                         const MassParams& params) {
    const MassParams p = params.resolved_for(curr.brightness.grid());
    return scale_and_suppress(feature_field(curr, prev, inh, p), inh, p.k);
}

ScalarField compute_mass_normalized(const Frame& curr, const Frame* prev,
                                    const InhibitionField& inh, const MassParams& params) {
    const MassParams p = params.resolved_for(curr.brightness.grid());
    ScalarField mu = scale_and_suppress(feature_field(curr, prev, inh, p), inh, 1.0);
    const double total = mu.sum();
    if (total > 0.0) {
        const double k_eff = p.k / total;
        for (double& v : mu.values()) v *= k_eff;
    }
    return mu;
}

InhibitionField update_inhibition(InhibitionField inh, Vec2 foa, const MassParams& params,
                                  double tau) {
    const Grid& g = inh.level.grid();
    if (!g.contains(foa))
        throw OutOfDomainError("focus of attention outside the retina");
    if (tau <= 0.0) throw ConfigError("tau must be > 0");
    const MassParams p = params.resolved_for(g);

    const double inv_two_sigma2 = 1.0 / (2.0 * p.sigma * p.sigma);
    const int w = g.width;
    const int h = g.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double dx = x - foa.x;
            const double dy = y - foa.y;
            const double deposit = p.beta * tau * std::exp(-(dx * dx + dy * dy) * inv_two_sigma2);
            double& v = inh.level.at(x, y);
            v = std::clamp(v + deposit - p.gamma * tau * v, 0.0, 1.0);
        }
    }
    return inh;
}

} // namespace wavefoa
