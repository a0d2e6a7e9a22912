#ifndef OSCPHASE_HIERPPV_HPP
#define OSCPHASE_HIERPPV_HPP

#include "oscphase/floquet.hpp"

namespace oscphase {

// Effective scalar phase macromodel of a synchronized oscillator group.
//
// The group time shift alpha_h obeys
//   d(alpha_h)/dt = v1(t + alpha_h)' b_phi(phi*(t + alpha_h), t),
// and with group phase Phi_g = f* (t + alpha_h) the same equation reads
//   d(alpha_h)/dt = sum_i q_i(Phi_g)' a_i(t),
// where q_i(theta) = v1_i(theta) f_i p_i(phi*_i(theta T*)) is the baked
// per-oscillator channel sensitivity. The two routes agree identically;
// `group_rhs` evaluates the channel route.
struct GroupPPVModel {
    double f_star = 0.0;
    LockedSolution lock;
    PeriodicWaveform v1;
    std::vector<PeriodicWaveform> channels; // q_i, one per oscillator
    std::vector<std::string> labels;
    double coupling_scale = 0.0; // reference scale for the amplitude guard
};

GroupPPVModel build_group_model(const CoupledPhaseSystem& cps, const LockedSolution& sol,
                                const FloquetData& fd, int channel_samples = 256);

// Channel-route right-hand side sum_i q_i(f* (t + alpha))' a_i(t).
double group_rhs(const GroupPPVModel& gm, const std::map<int, InputSignal>& inputs, double t,
                 double alpha);

struct GroupTrajectory {
    std::vector<double> t;
    Eigen::VectorXd alpha;  // time shift alpha_h(t)
    Eigen::VectorXd Phi_g;  // group phase f* (t + alpha_h)
    long rhs_evals = 0;     // scalar RHS evaluations
    double max_alpha_rate = 0.0;
    bool alpha_rate_ok = true;        // |d alpha/dt| stayed below 1
    std::vector<std::string> warnings;
};

struct GroupSimOptions {
    OdeOptions ode;
    double amplitude_guard = 0.1; // warn when inputs exceed this fraction of
                                  // the lock coupling scale
    // The state alpha_h is a time shift near zero; an absolute error floor
    // of 1e-9 periods keeps its error control on the same footing as the
    // full system's unit-rate phases instead of vastly tighter.
    GroupSimOptions() {
        ode.rel_tol = 1e-10;
        ode.abs_tol = 1e-9;
    }
};

GroupTrajectory simulate_group(const GroupPPVModel& gm, const std::map<int, InputSignal>& inputs,
                               double t0, double t1, const GroupSimOptions& opts = {},
                               std::span<const double> out_times = {}, int samples = 256);

// phi(t) ~= phi*(t + alpha(t)) per component.
Eigen::MatrixXd reconstruct_phases(const GroupPPVModel& gm, std::span<const double> t,
                                   const Eigen::VectorXd& alpha);

struct ValidationReport {
    double sup_dphi_cycles = 0.0;           // sup_t |phi_full - phi*(t+alpha_hat)|_inf
    double sup_alpha_mismatch_cycles = 0.0; // sup_t |alpha_h - alpha_hat| f*
    long rhs_evals_full = 0;                // vector-RHS component evaluations
    long rhs_evals_reduced = 0;             // scalar RHS evaluations
    double horizon_periods = 0.0;
    bool lock_slip = false;
    double max_alpha_rate = 0.0;
    double max_ddphi_ratio = 0.0; // measured sup |d(dphi)/dt| / |dphi|
    std::vector<std::string> warnings;

    std::vector<double> t;
    Eigen::MatrixXd phi_full;
    Eigen::VectorXd alpha_h;
    Eigen::VectorXd alpha_hat;
};

struct ValidateOptions {
    OdeOptions ode;           // full-system integration
    double group_abs_tol = 1e-9; // reduced-model absolute floor (periods)
    int samples_per_period = 16;
    double alpha_tol = 1e-13; // projection solve tolerance (time units)
    ValidateOptions() {
        ode.rel_tol = 1e-10;
        ode.abs_tol = 1e-12;
    }
};

// Run the full CPS and the reduced model under the same inputs from the
// locked state, project the full trajectory onto the locked orbit (best-fit
// time shift alpha_hat, continuity-seeded), and report deviation metrics
// plus evaluation-count accounting.
ValidationReport validate_reduction(const CoupledPhaseSystem& cps, const GroupPPVModel& gm,
                                    const std::map<int, InputSignal>& inputs, double t0,
                                    double t1, const ValidateOptions& opts = {});

// Repackage selected channels as a single oscillator usable inside a
// higher-level CoupledPhaseSystem.
struct PortSelection {
    int oscillator = 0;
    std::vector<int> channels; // empty = all channels of that oscillator
};
OscillatorPhaseModel nest_as_oscillator(const GroupPPVModel& gm,
                                        const std::vector<PortSelection>& ports,
                                        std::string label = {});

} // namespace oscphase

#endif
