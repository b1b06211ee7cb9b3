#pragma once

#include <vector>

#include "wavefoa/grid.hpp"

namespace wavefoa {

enum class Scheme { Explicit, Implicit };

/// Constants of the evolution equation
///   (m/c^2) phi_tt + (d/c) phi_t = lap(phi) + mu
/// with Dirichlet boundary. c rescales the coefficients exactly as the
/// continuous model does; the shipped presets set c = 1.
struct PdeParams {
    double m = 0.0;   // inertial coefficient
    double d = 0.0;   // drag coefficient
    double c = 1.0;   // propagation speed
    double tau = 0.04; // time step, seconds

    double effective_m() const { return m / (c * c); }
    double effective_d() const { return d / c; }
    void validate() const;

    /// Pure diffusion row of the model table: m=0, d=1/2500, c=1.
    static PdeParams heat_preset(double tau = 0.04);
    /// Damped wave row of the model table: m=1/25000, d=1/100, c=1.
    static PdeParams damped_wave_preset(double tau = 0.04);
};

/// Potential history needed by the second-order time stepper.
/// Initial state is phi = phi_prev = 0 (zero field, zero velocity).
class PotentialState {
public:
    PotentialState(Grid g, PdeParams params)
        : curr_(g, 0.0), prev_(g, 0.0), params_(params) {
        params_.validate();
    }
    PotentialState(ScalarField curr, ScalarField prev, long step_index, PdeParams params);

    const ScalarField& current() const { return curr_; }
    const ScalarField& previous() const { return prev_; }
    long step_index() const { return step_index_; }
    const PdeParams& params() const { return params_; }
    const Grid& grid() const { return curr_.grid(); }

private:
    ScalarField curr_;
    ScalarField prev_;
    long step_index_ = 0;
    PdeParams params_;
};

struct StepOptions {
    Scheme scheme = Scheme::Implicit;
    int threads = 1;
    double cg_rel_tol = 1e-8;  // relative residual target of the implicit solve
    int cg_max_iter = 0;       // 0 = 10*(w+h)
};

/// Advance the potential one step of length params.tau.
/// Explicit: spatial terms at t_n, pointwise solvable; requires
/// tau <= stability_bound. Implicit: Laplacian at t_{n+1}; the shifted
/// SPD system is solved by conjugate gradients, warm-started from phi_n.
PotentialState step(const PotentialState& state, const ScalarField& mass,
                    const StepOptions& opt = {});

/// Largest explicit-scheme-safe time step: d_eff/4 for m=0 (diffusion
/// number) and sqrt(m_eff/2) for m>0 (CFL at unit spacing).
double stability_bound(const PdeParams& p);

/// Solve lap(phi) = -mu with a zero boundary; interior residual
/// |lap(phi) + mu|_inf <= rel_tol * |mu|_inf.
ScalarField solve_poisson(const ScalarField& mass, double rel_tol = 1e-8,
                          int threads = 1);

/// Direct dense solve of (shift*I - lap) phi = rhs on the interior,
/// Gaussian elimination with partial pivoting. Independent oracle for
/// the iterative paths; grids up to 40x40.
ScalarField dense_solve_shifted_laplacian(const ScalarField& rhs, double shift);

/// Closed-form potential of a unit point mass at the origin under the
/// pure wave equation with speed c, inside the light cone 0 < r <= ct:
///   phi = (1/2pi) [ log(ct + sqrt((ct)^2 - r^2)) + log(1/r) ].
double analytic_point_mass_wave(double r, double t, double c);

/// Heat kernel of u_t = c lap(u) from a unit point source:
///   (1 / 4 pi c t) exp(-r^2 / 4 c t), t > 0.
double analytic_heat_kernel(double r, double t, double c);

/// Free-space gravitational field by direct summation over grid cells:
///   grad(phi0)(p) = -(1/2pi) sum_y (p - y)/|p - y|^2 mu(y).
Vec2 gravitational_gradient_bruteforce(const ScalarField& mass, Vec2 p);

/// Discrete energy m_eff * sum((phi_n - phi_prev)/tau)^2 + sum|grad_h phi_n|^2,
/// the quantity the damped stepper dissipates without a source.
double discrete_energy(const PotentialState& s);

struct ConvergenceReport {
    std::vector<double> c_values;
    std::vector<double> wave_error;     // max |grad phi_W(c) - grad phi_poisson| over probes
    std::vector<double> heat_error;     // same for the diffusion family
    std::vector<double> wave_error_rel; // normalised by |grad phi_poisson|_inf
    std::vector<double> heat_error_rel;
    double poisson_grad_max = 0.0;
    bool wave_strictly_decreasing = false;
    bool heat_strictly_decreasing = false;
};

struct VerifyLimitOptions {
    double tau = 0.04;
    double stabilizing_drag = 1e-3; // added to pure-wave runs to suppress reflections
    int threads = 1;
};

/// Executable convergence experiment: evolve the wave family (m = 1/c^2,
/// small drag) and the diffusion family (d = 1/c) for settle_time with a
/// static source, and compare node gradients against the Dirichlet
/// Poisson solution on the same domain.
ConvergenceReport verify_limit(const ScalarField& mass, std::vector<double> c_list,
                               double settle_time, const VerifyLimitOptions& opt = {});

} // namespace wavefoa
