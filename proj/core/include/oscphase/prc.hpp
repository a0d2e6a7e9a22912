#ifndef OSCPHASE_PRC_HPP
#define OSCPHASE_PRC_HPP

#include <functional>
#include <map>

#include "oscphase/oscillator.hpp"

namespace oscphase {

// Autonomous state-space oscillator dx/dt = g(x), with inputs entering
// additively through input_matrix: dx/dt = g(x) + B u(t). The Jacobian is
// optional; a central-difference fallback is used when absent.
struct StateSpaceOscillator {
    int dim = 0;
    std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& dxdt)> rhs;
    std::function<void(const Eigen::VectorXd& x, Eigen::MatrixXd& J)> jacobian;
    Eigen::MatrixXd input_matrix; // dim x m
    std::string name;

    void eval_jacobian(const Eigen::VectorXd& x, Eigen::MatrixXd& J) const;
};

struct LimitCycle {
    double T = 0.0;
    PeriodicWaveform x_p; // 1-periodic resampled orbit
    double residual_norm = 0.0;
    int newton_iterations = 0;
};

struct CycleOptions {
    double tol = 1e-10;    // period-return residual, inf-norm
    int max_iters = 30;
    double fd_step = 1e-7;
    int num_samples = 256;
    int anchor_component = 0; // phase pinned by x0[anchor] = x_guess[anchor]
    OdeOptions ode;
    CycleOptions() {
        ode.rel_tol = 1e-11;
        ode.abs_tol = 1e-13;
    }
};

// Shooting/Newton for an isolated periodic orbit near the guess: unknowns
// (x0, T) with the phase pinned on a Poincare section through the guess.
// Throws DegenerateOrbitError when the orbit is not isolated (e.g. a linear
// center) and SolveError on non-convergence.
LimitCycle find_limit_cycle(const StateSpaceOscillator& osc, const Eigen::VectorXd& x_guess,
                            double T_guess, const CycleOptions& opts = {});

struct ExtractOptions {
    double unity_tol = 1e-6; // |rho - 1| acceptance after one eigenpair polish
    int num_samples = 256;
    OdeOptions ode;
    ExtractOptions() {
        ode.rel_tol = 1e-11;
        ode.abs_tol = 1e-13;
    }
};

// Adjoint extraction of the phase sensitivity: backward integration of
// dw/dt = -G(x_s(t))' w from the unity left eigenvector of the state
// monodromy, normalized once so w(0)' g(x_s(0)) = 1. The per-channel
// sensitivity is p(theta) = B' w(theta T), packaged with f = 1/T as a phase
// macromodel.
OscillatorPhaseModel extract_ppv(const StateSpaceOscillator& osc, double T,
                                 const PeriodicWaveform& x_p, const ExtractOptions& opts = {});

// State monodromy of the variational system along the cycle.
Eigen::MatrixXd state_monodromy(const StateSpaceOscillator& osc, double T,
                                const PeriodicWaveform& x_p,
                                const OdeOptions& ode = ExtractOptions().ode);

// Built-in example oscillators, selectable by name in the CLI.
struct BuiltinOscillator {
    StateSpaceOscillator sys;
    Eigen::VectorXd x_guess;
    double T_guess = 0.0;
};

// hopf:      radial relaxation dr/dt = r(1-r^2) with angular rate omega
//            (default 2*pi); inputs drive both state components.
// vanderpol: mu (default 1); input drives the velocity equation.
// fhn:       FitzHugh-Nagumo, a=0.7 b=0.8 eps=0.08 i=1.0; input drives the
//            voltage equation.
// ring3:     three-stage inverting tanh ring, gain (default 3) and tau
//            (default 1); input drives stage 0.
BuiltinOscillator make_builtin(const std::string& name,
                               const std::map<std::string, double>& params = {});

} // namespace oscphase

#endif
