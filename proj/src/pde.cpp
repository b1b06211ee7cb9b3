#include "wavefoa/pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wavefoa {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Fixed-order pairwise reduction; run-to-run identical regardless of
// how the surrounding matrix-vector products are partitioned.
double dot_pairwise(const double* a, const double* b, size_t n) {
    if (n <= 64) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += a[i] * b[i];
        return s;
    }
    const size_t half = n / 2;
    return dot_pairwise(a, b, half) + dot_pairwise(a + half, b + half, n - half);
}

double dot(const ScalarField& a, const ScalarField& b) {
    return dot_pairwise(a.values().data(), b.values().data(), a.values().size());
}

// CG vector ops carry ~3 flops per cell; the pool pays off only on
// very large grids.
int cg_threads(const Grid& g, int threads) {
    return static_cast<long>(g.width) * g.height < (1 << 20) ? 1 : threads;
}

void require_stencil_grid(const Grid& g) {
    if (g.width < 3 || g.height < 3)
        throw OutOfDomainError("stencil operations need a grid of at least 3x3");
}

// out = shift*x - lap(x) on the interior; boundary ring stays 0.
void apply_shifted_operator(const ScalarField& x, double shift, ScalarField& out,
                            int threads) {
    const int w = x.width();
    const int h = x.height();
    threads = cg_threads(x.grid(), threads);
    const double* src = x.values().data();
    double* dst = out.values().data();
    parallel_rows(1, h - 1, threads, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            const double* row = src + static_cast<size_t>(y) * w;
            double* orow = dst + static_cast<size_t>(y) * w;
            for (int x_ = 1; x_ < w - 1; ++x_) {
                orow[x_] = (shift + 4.0) * row[x_] - row[x_ + 1] - row[x_ - 1] -
                           row[x_ + w] - row[x_ - w];
            }
        }
    });
}

void axpy_interior(double alpha, const ScalarField& x, ScalarField& y, int threads) {
    const int w = x.width();
    const int h = x.height();
    threads = cg_threads(x.grid(), threads);
    const double* xs = x.values().data();
    double* ys = y.values().data();
    parallel_rows(1, h - 1, threads, [&](int y0, int y1) {
        for (int r = y0; r < y1; ++r)
            for (int c = 1; c < w - 1; ++c) {
                const size_t i = static_cast<size_t>(r) * w + c;
                ys[i] += alpha * xs[i];
            }
    });
}

// Conjugate gradients on (shift*I - lap) x = b with zero Dirichlet ring.
// The recurrence residual is cross-checked against the true residual
// before accepting convergence.
ScalarField cg_solve(const ScalarField& b, double shift, const ScalarField& warm_start,
                     double rel_tol, int max_iter, int threads, const char* context) {
    const Grid& g = b.grid();
    ScalarField x = warm_start;
    zero_boundary(x);

    const double b_norm = std::sqrt(dot(b, b));
    if (b_norm == 0.0) return ScalarField(g, 0.0);
    const double target = rel_tol * b_norm;

    ScalarField r(g, 0.0), p(g, 0.0), ap(g, 0.0);
    apply_shifted_operator(x, shift, ap, threads);
    for (int y = 1; y < g.height - 1; ++y)
        for (int c = 1; c < g.width - 1; ++c)
            r.at(c, y) = b.at(c, y) - ap.at(c, y);
    p = r;
    double rs = dot(r, r);

    for (int it = 0; it < max_iter; ++it) {
        if (std::sqrt(rs) <= target) {
            // Recompute the true residual; restart if rounding drifted.
            apply_shifted_operator(x, shift, ap, threads);
            double true_rs = 0.0;
            for (int y = 1; y < g.height - 1; ++y)
                for (int c = 1; c < g.width - 1; ++c) {
                    const double ri = b.at(c, y) - ap.at(c, y);
                    r.at(c, y) = ri;
                    true_rs += ri * ri;
                }
            if (std::sqrt(true_rs) <= target) return x;
            p = r;
            rs = true_rs;
        }
        apply_shifted_operator(p, shift, ap, threads);
        const double p_ap = dot(p, ap);
        if (!(p_ap > 0.0))
            throw SolverDivergedError(std::string(context) + ": curvature lost in CG");
        const double alpha = rs / p_ap;
        axpy_interior(alpha, p, x, threads);
        axpy_interior(-alpha, ap, r, threads);
        const double rs_new = dot(r, r);
        const double beta = rs_new / rs;
        for (int y = 1; y < g.height - 1; ++y)
            for (int c = 1; c < g.width - 1; ++c)
                p.at(c, y) = r.at(c, y) + beta * p.at(c, y);
        rs = rs_new;
    }
    // Cap reached; accept only a verified true residual.
    apply_shifted_operator(x, shift, ap, threads);
    double true_rs = 0.0;
    for (int y = 1; y < g.height - 1; ++y)
        for (int c = 1; c < g.width - 1; ++c) {
            const double ri = b.at(c, y) - ap.at(c, y);
            true_rs += ri * ri;
        }
    if (std::sqrt(true_rs) <= target) return x;
    throw SolverDivergedError(std::string(context) + ": CG exceeded " +
                              std::to_string(max_iter) + " iterations");
}

} // namespace

void PdeParams::validate() const {
    if (m < 0.0 || d < 0.0) throw DegenerateParamsError("m and d must be >= 0");
    if (m == 0.0 && d == 0.0) throw DegenerateParamsError("m = d = 0 is degenerate");
    if (c <= 0.0) throw DegenerateParamsError("c must be > 0");
    if (tau <= 0.0) throw DegenerateParamsError("tau must be > 0");
}

PdeParams PdeParams::heat_preset(double tau) { return {0.0, 1.0 / 2500.0, 1.0, tau}; }
PdeParams PdeParams::damped_wave_preset(double tau) {
    return {1.0 / 25000.0, 1.0 / 100.0, 1.0, tau};
}

PotentialState::PotentialState(ScalarField curr, ScalarField prev, long step_index,
                               PdeParams params)
    : curr_(std::move(curr)), prev_(std::move(prev)), step_index_(step_index),
      params_(params) {
    params_.validate();
    if (!(curr_.grid() == prev_.grid()))
        throw GridMismatchError("potential history fields use different grids");
    zero_boundary(curr_);
    zero_boundary(prev_);
}

double stability_bound(const PdeParams& p) {
    p.validate();
    const double me = p.effective_m();
    const double de = p.effective_d();
    if (me == 0.0) return de / 4.0;
    return std::sqrt(me / 2.0);
}

PotentialState step(const PotentialState& state, const ScalarField& mass,
                    const StepOptions& opt) {
    const Grid& g = state.grid();
    require_stencil_grid(g);
    if (!(mass.grid() == g)) throw GridMismatchError("mass grid does not match potential");

    const PdeParams& p = state.params();
    const double tau = p.tau;
    const double me = p.effective_m();
    const double de = p.effective_d();
    const double a_coef = me / (tau * tau) + de / tau;   // multiplies phi^{n+1}
    const double b_coef = 2.0 * me / (tau * tau) + de / tau; // multiplies phi^n
    const double c_coef = me / (tau * tau);              // multiplies phi^{n-1}

    const ScalarField& curr = state.current();
    const ScalarField& prev = state.previous();

    if (opt.scheme == Scheme::Explicit) {
        const double bound = stability_bound(p);
        if (tau > bound * (1.0 + 1e-12))
            throw UnstableSchemeError("explicit step with tau=" + std::to_string(tau) +
                                      " above stability bound " + std::to_string(bound));
        ScalarField next(g, 0.0);
        const int run_threads = effective_threads(g, opt.threads);
        const int w = g.width;
        const double* cu = curr.values().data();
        const double* pr = prev.values().data();
        const double* mu = mass.values().data();
        double* nx = next.values().data();
        parallel_rows(1, g.height - 1, run_threads, [&](int y0, int y1) {
            for (int y = y0; y < y1; ++y) {
                const size_t off = static_cast<size_t>(y) * w;
                for (int x = 1; x < w - 1; ++x) {
                    const size_t i = off + x;
                    const double lap =
                        cu[i + 1] + cu[i - 1] + cu[i + w] + cu[i - w] - 4.0 * cu[i];
                    nx[i] = (lap + mu[i] + b_coef * cu[i] - c_coef * pr[i]) / a_coef;
                }
            }
        });
        return PotentialState(std::move(next), curr, state.step_index() + 1, p);
    }

    // Implicit: (a_coef*I - lap) phi^{n+1} = mu + b_coef phi^n - c_coef phi^{n-1}
    ScalarField rhs(g, 0.0);
    for (int y = 1; y < g.height - 1; ++y)
        for (int x = 1; x < g.width - 1; ++x)
            rhs.at(x, y) = mass.at(x, y) + b_coef * curr.at(x, y) - c_coef * prev.at(x, y);
    const int cap = opt.cg_max_iter > 0 ? opt.cg_max_iter : 10 * (g.width + g.height);
    ScalarField next =
        cg_solve(rhs, a_coef, curr, opt.cg_rel_tol, cap, opt.threads, "implicit step");
    return PotentialState(std::move(next), curr, state.step_index() + 1, p);
}

ScalarField solve_poisson(const ScalarField& mass, double rel_tol, int threads) {
    const Grid& g = mass.grid();
    require_stencil_grid(g);
    ScalarField rhs = apply_dirichlet(mass);
    const double mass_inf = rhs.max_abs();
    if (mass_inf == 0.0) return ScalarField(g, 0.0);

    // Drive the 2-norm of the residual below the requested inf-norm
    // budget; |r|_inf <= |r|_2 makes this sufficient.
    const double rel_2 =
        rel_tol * mass_inf / std::sqrt(dot_pairwise(rhs.values().data(),
                                                    rhs.values().data(),
                                                    rhs.values().size()));
    const int cap = 50 * (g.width + g.height);
    return cg_solve(rhs, 0.0, ScalarField(g, 0.0), rel_2, cap, threads, "poisson solve");
}

ScalarField dense_solve_shifted_laplacian(const ScalarField& rhs, double shift) {
    const Grid& g = rhs.grid();
    require_stencil_grid(g);
    const int wi = g.width - 2;
    const int hi = g.height - 2;
    const int n = wi * hi;
    if (n > 1600)
        throw ConfigError("dense oracle limited to grids up to 40x40");

    std::vector<double> a(static_cast<size_t>(n) * n, 0.0);
    std::vector<double> b(static_cast<size_t>(n), 0.0);
    auto idx = [wi](int x, int y) { return y * wi + x; }; // interior coordinates
    for (int y = 0; y < hi; ++y) {
        for (int x = 0; x < wi; ++x) {
            const int row = idx(x, y);
            a[static_cast<size_t>(row) * n + row] = shift + 4.0;
            if (x > 0) a[static_cast<size_t>(row) * n + idx(x - 1, y)] = -1.0;
            if (x < wi - 1) a[static_cast<size_t>(row) * n + idx(x + 1, y)] = -1.0;
            if (y > 0) a[static_cast<size_t>(row) * n + idx(x, y - 1)] = -1.0;
            if (y < hi - 1) a[static_cast<size_t>(row) * n + idx(x, y + 1)] = -1.0;
            b[static_cast<size_t>(row)] = rhs.at(x + 1, y + 1);
        }
    }

    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::abs(a[static_cast<size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            const double v = std::abs(a[static_cast<size_t>(r) * n + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0) throw SolverDivergedError("dense oracle: singular matrix");
        if (pivot != col) {
            for (int c = col; c < n; ++c)
                std::swap(a[static_cast<size_t>(pivot) * n + c],
                          a[static_cast<size_t>(col) * n + c]);
            std::swap(b[static_cast<size_t>(pivot)], b[static_cast<size_t>(col)]);
        }
        const double diag = a[static_cast<size_t>(col) * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double f = a[static_cast<size_t>(r) * n + col] / diag;
            if (f == 0.0) continue;
            a[static_cast<size_t>(r) * n + col] = 0.0;
            for (int c = col + 1; c < n; ++c)
                a[static_cast<size_t>(r) * n + c] -= f * a[static_cast<size_t>(col) * n + c];
            b[static_cast<size_t>(r)] -= f * b[static_cast<size_t>(col)];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[static_cast<size_t>(r)];
        for (int c = r + 1; c < n; ++c)
            s -= a[static_cast<size_t>(r) * n + c] * b[static_cast<size_t>(c)];
        b[static_cast<size_t>(r)] = s / a[static_cast<size_t>(r) * n + r];
    }

    ScalarField out(g, 0.0);
    for (int y = 0; y < hi; ++y)
        for (int x = 0; x < wi; ++x) out.at(x + 1, y + 1) = b[static_cast<size_t>(idx(x, y))];
    return out;
}

double analytic_point_mass_wave(double r, double t, double c) {
    if (r <= 0.0) throw SingularEvaluationError("point-mass potential is singular at r = 0");
    const double ct = c * t;
    if (r > ct) throw OutsideLightConeError("r > ct: outside the light cone");
    const double root = std::sqrt(std::max(0.0, ct * ct - r * r));
    return (std::log(ct + root) - std::log(r)) / kTwoPi;
}

double analytic_heat_kernel(double r, double t, double c) {
    if (t <= 0.0) throw NonpositiveTimeError("heat kernel needs t > 0");
    if (c <= 0.0) throw ConfigError("heat kernel needs c > 0");
    const double ct4 = 4.0 * c * t;
    return std::exp(-(r * r) / ct4) / (std::numbers::pi * ct4);
}

Vec2 gravitational_gradient_bruteforce(const ScalarField& mass, Vec2 p) {
    const Grid& g = mass.grid();
    Vec2 acc{0.0, 0.0};
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            const double mu = mass.at(x, y);
            if (mu == 0.0) continue;
            const double dx = p.x - x;
            const double dy = p.y - y;
            const double r2 = dx * dx + dy * dy;
            if (r2 == 0.0)
                throw SingularEvaluationError("probe coincides with a nonzero-mass node");
            const double f = mu / (kTwoPi * r2);
            acc.x -= f * dx;
            acc.y -= f * dy;
        }
    }
    return acc;
}

double discrete_energy(const PotentialState& s) {
    const Grid& g = s.grid();
    const double me = s.params().effective_m();
    const double inv_tau = 1.0 / s.params().tau;
    const ScalarField& f = s.current();
    const ScalarField& fp = s.previous();
    double kinetic = 0.0;
    for (size_t i = 0; i < f.values().size(); ++i) {
        const double v = (f.values()[i] - fp.values()[i]) * inv_tau;
        kinetic += v * v;
    }
    double elastic = 0.0;
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x + 1 < g.width; ++x) {
            const double d = f.at(x + 1, y) - f.at(x, y);
            elastic += d * d;
        }
    for (int y = 0; y + 1 < g.height; ++y)
        for (int x = 0; x < g.width; ++x) {
            const double d = f.at(x, y + 1) - f.at(x, y);
            elastic += d * d;
        }
    return me * kinetic + elastic;
}

ConvergenceReport verify_limit(const ScalarField& mass, std::vector<double> c_list,
                               double settle_time, const VerifyLimitOptions& opt) {
    if (c_list.size() < 3) throw ConfigError("verify_limit needs at least 3 speeds");
    for (size_t i = 1; i < c_list.size(); ++i)
        if (!(c_list[i] > c_list[i - 1]))
            throw ConfigError("verify_limit speeds must be ascending");
    if (settle_time <= 0.0) throw ConfigError("settle_time must be > 0");

    const Grid& g = mass.grid();
    require_stencil_grid(g);
    ScalarField phi_ref = solve_poisson(mass, 1e-10, opt.threads);
    ScalarField ref_gx, ref_gy;
    gradient_fields(phi_ref, ref_gx, ref_gy);

    // Probe nodes at least 2 px from the boundary; their central
    // differences never touch the Dirichlet ring.
    const int x_lo = 2, x_hi = g.width - 3, y_lo = 2, y_hi = g.height - 3;
    double ref_max = 0.0;
    for (int y = y_lo; y <= y_hi; ++y)
        for (int x = x_lo; x <= x_hi; ++x)
            ref_max = std::max(ref_max, std::hypot(ref_gx.at(x, y), ref_gy.at(x, y)));

    ConvergenceReport report;
    report.c_values = c_list;
    report.poisson_grad_max = ref_max;

    const long steps = std::max<long>(1, std::llround(settle_time / opt.tau));
    auto settle_error = [&](PdeParams params) {
        PotentialState state(g, params);
        StepOptions sopt;
        sopt.scheme = Scheme::Implicit;
        sopt.threads = opt.threads;
        for (long i = 0; i < steps; ++i) state = step(state, mass, sopt);
        ScalarField gx, gy;
        gradient_fields(state.current(), gx, gy);
        double err = 0.0;
        for (int y = y_lo; y <= y_hi; ++y)
            for (int x = x_lo; x <= x_hi; ++x)
                err = std::max(err, std::hypot(gx.at(x, y) - ref_gx.at(x, y),
                                               gy.at(x, y) - ref_gy.at(x, y)));
        return err;
    };

    for (double c : c_list) {
        PdeParams wave{1.0 / (c * c), opt.stabilizing_drag, 1.0, opt.tau};
        PdeParams heat{0.0, 1.0 / c, 1.0, opt.tau};
        const double ew = settle_error(wave);
        const double eh = settle_error(heat);
        report.wave_error.push_back(ew);
        report.heat_error.push_back(eh);
        report.wave_error_rel.push_back(ref_max > 0.0 ? ew / ref_max : 0.0);
        report.heat_error_rel.push_back(ref_max > 0.0 ? eh / ref_max : 0.0);
    }

    auto strictly_decreasing = [](const std::vector<double>& e) {
        for (size_t i = 1; i < e.size(); ++i)
            if (!(e[i] < e[i - 1])) return false;
        return true;
    };
    report.wave_strictly_decreasing = strictly_decreasing(report.wave_error);
    report.heat_strictly_decreasing = strictly_decreasing(report.heat_error);
    return report;
}

} // namespace wavefoa
