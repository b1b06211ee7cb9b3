#include "wavefoa/foa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wavefoa {

namespace {

// Uniform double in [0,1) from the top 53 bits; avoids the
// implementation-defined std::uniform_real_distribution so that equal
// seeds give equal scanpaths on every platform.
class SeededUniform {
public:
    explicit SeededUniform(std::uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ull) {}
    double next() {
        std::uint64_t z = advance();
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t advance() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    std::uint64_t state_;
};

Vec2 clamp_to_margin(Vec2 p, const Grid& g, Vec2* vel) {
    const double x_lo = 1.0, x_hi = g.width - 2.0;
    const double y_lo = 1.0, y_hi = g.height - 2.0;
    if (p.x < x_lo) { p.x = x_lo; if (vel) vel->x = 0.0; }
    if (p.x > x_hi) { p.x = x_hi; if (vel) vel->x = 0.0; }
    if (p.y < y_lo) { p.y = y_lo; if (vel) vel->y = 0.0; }
    if (p.y > y_hi) { p.y = y_hi; if (vel) vel->y = 0.0; }
    return p;
}

} // namespace

DynamicsParams DynamicsParams::resolved_for(const Grid& g) const {
    DynamicsParams out = *this;
    if (out.jitter < 0.0) out.jitter = 0.05 * std::min(g.width, g.height);
    if (out.v_fix <= 0.0) throw ConfigError("v_fix must be > 0");
    if (out.t_fix <= 0.0) throw ConfigError("t_fix must be > 0");
    if (out.lambda < 0.0) throw ConfigError("lambda must be >= 0");
    return out;
}

FoaState step_foa(const FoaState& s, const ScalarField& potential, const DynamicsParams& dp,
                  double tau) {
    if (tau <= 0.0) throw ConfigError("tau must be > 0");
    const Vec2 g = gradient_at(potential, s.pos);
    FoaState next;
    next.vel.x = s.vel.x + tau * (g.x - dp.lambda * s.vel.x);
    next.vel.y = s.vel.y + tau * (g.y - dp.lambda * s.vel.y);
    next.pos.x = s.pos.x + tau * next.vel.x;
    next.pos.y = s.pos.y + tau * next.vel.y;
    next.pos = clamp_to_margin(next.pos, potential.grid(), &next.vel);
    return next;
}

Scanpath extract_fixations(const std::vector<TrajectorySample>& trajectory,
                           const DynamicsParams& dp, const std::string& stimulus_id) {
    if (trajectory.empty()) throw EmptyInputError("empty trajectory");
    Scanpath sp;
    sp.stimulus_id = stimulus_id;
    if (trajectory.size() < 2) return sp;

    const double tau = trajectory[1].t - trajectory[0].t;
    if (tau <= 0.0) throw NonMonotonicTimeError("trajectory samples must advance in time");
    for (size_t i = 2; i < trajectory.size(); ++i) {
        const double gap = trajectory[i].t - trajectory[i - 1].t;
        if (std::abs(gap - tau) > 1e-9 * tau)
            throw NonMonotonicTimeError("trajectory samples must be uniformly spaced");
    }

    const size_t n_intervals = trajectory.size() - 1;
    auto slow = [&](size_t i) {
        const Vec2 d = trajectory[i + 1].pos - trajectory[i].pos;
        return std::sqrt(d.norm2()) / tau < dp.v_fix;
    };

    size_t i = 0;
    while (i < n_intervals) {
        if (!slow(i)) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j + 1 < n_intervals && slow(j + 1)) ++j;
        const double duration = static_cast<double>(j - i + 1) * tau;
        if (duration + 1e-12 >= dp.t_fix) {
            Vec2 centroid{0.0, 0.0};
            for (size_t s = i; s <= j + 1; ++s) centroid = centroid + trajectory[s].pos;
            const double inv = 1.0 / static_cast<double>(j - i + 2);
            sp.fixations.push_back(
                {centroid.x * inv, centroid.y * inv, trajectory[i].t, duration});
        }
        i = j + 1;
    }
    return sp;
}

ScalarField accumulate_saliency(const std::vector<Scanpath>& paths, const Grid& grid,
                                double sigma_map) {
    if (paths.empty()) throw EmptyInputError("no scanpaths");
    if (sigma_map <= 0.0) throw ConfigError("sigma_map must be > 0");

    ScalarField hist(grid, 0.0);
    double total = 0.0;
    for (const Scanpath& sp : paths) {
        for (const Fixation& f : sp.fixations) {
            const int x = std::clamp(static_cast<int>(std::lround(f.x)), 0, grid.width - 1);
            const int y = std::clamp(static_cast<int>(std::lround(f.y)), 0, grid.height - 1);
            hist.at(x, y) += f.duration;
            total += f.duration;
        }
    }
    if (total <= 0.0) throw EmptyInputError("scanpaths contain no fixations");

    // Separable Gaussian blur, truncated at 4 sigma.
    const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma_map)));
    std::vector<double> kernel(static_cast<size_t>(2 * radius + 1));
    double ksum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[static_cast<size_t>(i + radius)] =
            std::exp(-0.5 * (i * i) / (sigma_map * sigma_map));
        ksum += kernel[static_cast<size_t>(i + radius)];
    }
    for (double& kv : kernel) kv /= ksum;

    ScalarField tmp(grid, 0.0);
    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int xx = x + i;
                if (xx < 0 || xx >= grid.width) continue;
                acc += kernel[static_cast<size_t>(i + radius)] * hist.at(xx, y);
            }
            tmp.at(x, y) = acc;
        }
    ScalarField out(grid, 0.0);
    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int yy = y + i;
                if (yy < 0 || yy >= grid.height) continue;
                acc += kernel[static_cast<size_t>(i + radius)] * tmp.at(x, yy);
            }
            out.at(x, y) = acc;
        }

    const double s = out.sum();
    if (s <= 0.0) throw EmptyInputError("saliency mass vanished");
    for (double& v : out.values()) v /= s;
    return out;
}

SimulationResult simulate(const std::vector<Frame>& frames, const SimulationParams& params,
                          const std::string& stimulus_id, const StepObserver& observer) {
    if (frames.empty()) throw EmptyInputError("simulation needs at least one frame");
    const Grid& grid = frames[0].brightness.grid();
    if (grid.width < 3 || grid.height < 3)
        throw OutOfDomainError("simulation needs a grid of at least 3x3");
    for (size_t i = 1; i < frames.size(); ++i) {
        if (!(frames[i].brightness.grid() == grid))
            throw GridMismatchError("all frames must share one grid");
        if (!(frames[i].timestamp > frames[i - 1].timestamp))
            throw NonMonotonicTimeError("frame timestamps must be strictly increasing");
    }

    PdeParams pde = params.pde;
    // The step is synced to the stream: one step per frame. Static
    // images keep the configured tau.
    if (frames.size() > 1) pde.tau = frames[1].timestamp - frames[0].timestamp;
    pde.validate();
    const double tau = pde.tau;
    const MassParams mass_params = params.mass.resolved_for(grid);
    const DynamicsParams dyn = params.dyn.resolved_for(grid);
    if (params.duration <= 0.0) throw ConfigError("duration must be > 0");
    const long n_steps = std::max<long>(1, std::llround(params.duration / tau));

    // Initial FOA: retina centre plus a seeded uniform-disk jitter.
    SeededUniform rng(dyn.seed);
    const double angle = 2.0 * std::numbers::pi * rng.next();
    const double radius = dyn.jitter * std::sqrt(rng.next());
    FoaState foa;
    foa.pos = {0.5 * (grid.width - 1) + radius * std::cos(angle),
               0.5 * (grid.height - 1) + radius * std::sin(angle)};
    foa.pos = clamp_to_margin(foa.pos, grid, nullptr);
    foa.vel = {0.0, 0.0};

    PotentialState state(grid, pde);
    InhibitionField inh(grid);
    StepOptions sopt;
    sopt.scheme = params.scheme;
    sopt.threads = params.threads;

    std::vector<TrajectorySample> trajectory;
    trajectory.reserve(static_cast<size_t>(n_steps) + 1);
    trajectory.push_back({0.0, foa.pos});

    ScalarField mu(grid, 0.0);
    const long last_frame = static_cast<long>(frames.size()) - 1;
    for (long n = 0; n < n_steps; ++n) {
        const Frame& curr = frames[static_cast<size_t>(std::min(n, last_frame))];
        const Frame* prev = (n >= 1 && n <= last_frame)
                                ? &frames[static_cast<size_t>(n - 1)]
                                : nullptr;
        mu = compute_mass_normalized(curr, prev, inh, mass_params);
        state = step(state, mu, sopt);
        foa = step_foa(foa, state.current(), dyn, tau);
        inh = update_inhibition(std::move(inh), foa.pos, mass_params, tau);
        trajectory.push_back({static_cast<double>(n + 1) * tau, foa.pos});
        if (observer) observer(n, state.current(), inh, foa);
    }

    SimulationResult result{extract_fixations(trajectory, dyn, stimulus_id),
                            std::move(trajectory),
                            state.current(),
                            std::move(inh),
                            std::move(mu),
                            n_steps};
    return result;
}

} // namespace wavefoa
