#ifndef OSCPHASE_FLOQUET_HPP
#define OSCPHASE_FLOQUET_HPP

#include <complex>

#include "oscphase/lock.hpp"

namespace oscphase {

// Mode-1 Floquet quantities of the CPS linearized about its locked
// solution. u1 and v1 are 1-periodic in scaled time s = t/T*; u1(s) is the
// orbit tangent d(phi*)/dt at t = sT*, and v1 is the adjoint row vector
// normalized once so v1(0)' u1(0) = 1. Columns for modes i >= 2 are not
// materialized.
struct FloquetData {
    Eigen::MatrixXd monodromy;
    Eigen::VectorXcd multipliers; // rho_1 first, then descending magnitude
    Eigen::VectorXcd exponents;   // mu_i = log(rho_i) / T*
    PeriodicWaveform u1;
    PeriodicWaveform v1;
    bool unity_multiplier_ok = false;
    bool contraction_ok = false;
    bool near_marginal_warn = false; // 1 - |rho_2| < 1e-3: slow validation expected
    double unity_gap = 0.0;          // |rho_1 - 1|
    double u1_alignment = 0.0;       // |cos angle(u1(0), monodromy eigenvector)|
};

struct FloquetOptions {
    double tol_unity = 1e-6;
    double contraction_margin = 1e-9;
    double unstable_tol = 1e-6; // any |rho_i| > 1 + this is fatal
    OdeOptions ode = LockOptions().ode;
};

// Jacobian of the autonomous vector field along the locked orbit,
// J_ii = f_i p_i'(phi*_i)' sum_j b_ij(phi*_j),
// J_ij = f_i p_i(phi*_i)' b_ij'(phi*_j), zero where there is no coupling.
Eigen::MatrixXd jacobian_at(const CoupledPhaseSystem& cps, const LockedSolution& sol, double t);

// State-transition matrix over one period: dM/dt = J(t) M, M(0) = I.
Eigen::MatrixXd monodromy(const CoupledPhaseSystem& cps, const LockedSolution& sol,
                          const OdeOptions& ode = LockOptions().ode);

FloquetData floquet_decompose(const CoupledPhaseSystem& cps, const LockedSolution& sol,
                              const Eigen::MatrixXd& M, const FloquetOptions& opts = {});

// Convenience: monodromy + decomposition.
FloquetData floquet_analyze(const CoupledPhaseSystem& cps, const LockedSolution& sol,
                            const FloquetOptions& opts = {});

struct BlowupResult {
    std::vector<double> t;
    Eigen::VectorXd c1;          // running integral of v1' b_ext
    Eigen::VectorXd dphi_norm;   // |delta_phi(t)|_inf of the linearized response
    double fitted_slope = 0.0;   // least-squares slope of c1 over t
};

// Integrate the linearized CPS d(dphi)/dt = J(t) dphi + b_ext(t) along with
// c1(t) = integral of v1(tau)' b_ext(tau).
//
// With b_ext = eps u1 the projection grows as c1(t) = eps (t - t0); with a
// forcing orthogonalized pointwise against u1 (through v1) it stays bounded.
BlowupResult lptv_blowup_demo(const CoupledPhaseSystem& cps, const LockedSolution& sol,
                              const FloquetData& fd, double eps, double horizon,
                              bool orthogonalize = false,
                              const OdeOptions& ode = LockOptions().ode);

} // namespace oscphase

#endif
