#ifndef OSCPHASE_LOCK_HPP
#define OSCPHASE_LOCK_HPP

#include "oscphase/network.hpp"

namespace oscphase {

// Externally-unperturbed synchronized solution of a coupled phase system:
// phi*(t) = f*.t + dphi*(t/T*), with dphi* a 1-periodic waveform in scaled
// time s = t/T* and the time-shift degeneracy removed by anchoring
// dphi*_1(0) = 0.
struct LockedSolution {
    double f_star = 0.0;
    double T_star = 0.0;
    PeriodicWaveform delta_phi;       // dim N, 1-periodic in s
    PeriodicWaveform delta_phi_deriv; // d(dphi*)/ds, cached for phi_star_rate
    double anchor_shift = 0.0;        // time shift recorded by shift_lock
    double residual_norm = 0.0;       // final shooting residual, inf-norm
    int newton_iterations = 0;
    bool used_fallback = false; // transient settle preceded the converged solve
    bool stable_hint = true;    // quick monodromy probe; verdict belongs to floquet

    Eigen::VectorXd phi_star(double t) const;
    // d(phi*)/dt = f* (1 + dphi*'(s)).
    Eigen::VectorXd phi_star_rate(double t) const;
};

struct LockOptions {
    double newton_tol = 1e-9;   // residual inf-norm target
    int max_iters = 25;
    double fd_step = 1e-7;      // relative finite-difference step
    int num_samples = 128;      // sampling of the stored dphi* waveform
    double settle_horizon = 200.0; // transient fallback horizon (time units)
    bool allow_fallback = true;
    bool stability_probe = true; // cheap monodromy check to set stable_hint
    OdeOptions ode;             // integrator settings for shooting residuals

    // Tight integrator defaults: the stored dphi* samples feed a spectral
    // derivative, which amplifies dense-output noise by the harmonic index.
    LockOptions() {
        ode.rel_tol = 1e-12;
        ode.abs_tol = 1e-14;
    }
};

// Solve for (f*, dphi_2(0), ..., dphi_N(0)) with dphi_1(0) = 0 anchored, by
// Newton iteration on the period-return residual phi(T*) - phi(0) - 1.
// Requires every external input of `cps` to be identically zero. The
// converged solution is re-integrated densely over one period to populate
// the dphi* waveform. Throws SolveError on non-convergence.
LockedSolution find_lock(const CoupledPhaseSystem& cps, double f_guess,
                         const Eigen::VectorXd& dphi_guess, const LockOptions& opts = {});

// The time-shifted solution phi*(t - tau) re-expressed in the same storage.
// Whole cycles of the shift are dropped (phases are physically defined
// modulo 1), so tau = T* reproduces the original samples.
LockedSolution shift_lock(const LockedSolution& sol, double tau);

struct LockVerification {
    double period_return_error = 0.0;  // max |phi(T*) - phi(0) - 1|
    double max_ode_defect = 0.0;       // interpolant vs vector field, inf-norm
    double freq_drift = 0.0;           // max |phi(20 T*) - phi(0) - 20| over components
    double min_gain_per_period = 0.0;  // per-period phase gain across 20 periods
    double max_gain_per_period = 0.0;
};

// Report-only consistency check of a stored lock against the system.
LockVerification verify_lock(const CoupledPhaseSystem& cps, const LockedSolution& sol,
                             const OdeOptions& ode = LockOptions().ode);

} // namespace oscphase

#endif
