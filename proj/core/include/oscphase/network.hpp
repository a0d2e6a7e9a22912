#ifndef OSCPHASE_NETWORK_HPP
#define OSCPHASE_NETWORK_HPP

#include <map>
#include <vector>

#include "oscphase/oscillator.hpp"

namespace oscphase {

// Directed influence of oscillator `src` on oscillator `dst`; the waveform
// is 1-periodic in the source phase and lands on the destination's input
// channels.
struct Coupling {
    int src = 0;
    int dst = 0;
    PeriodicWaveform wave;
};

struct CpsTrajectory {
    std::vector<double> t;
    Eigen::MatrixXd phi; // one row per output time, one column per oscillator
    long rhs_evals = 0;  // number of full vector-RHS evaluations
};

// N phase macromodels plus sparse couplings and optional external inputs:
//
//   dphi_i/dt = f_i + f_i p_i(phi_i)' [ a_i(t) + sum_j b_ij(phi_j) ]
//
// Immutable after construction; simulations of the same system may run
// concurrently.
class CoupledPhaseSystem {
public:
    CoupledPhaseSystem(std::vector<OscillatorPhaseModel> oscillators,
                       std::vector<Coupling> couplings,
                       std::map<int, InputSignal> external_inputs = {});

    int size() const { return static_cast<int>(osc_.size()); }
    const OscillatorPhaseModel& oscillator(int i) const { return osc_.at(i); }
    const std::vector<Coupling>& couplings() const { return couplings_; }
    const std::map<int, InputSignal>& external_inputs() const { return inputs_; }
    bool has_external_inputs() const;
    const InputSignal* input_for(int i) const;

    // Largest coupling-waveform magnitude; reference scale for the group
    // macromodel's input-amplitude guard.
    double coupling_scale() const { return coupling_scale_; }

    // b_i(t) = a_i(t) + sum_{j != i} b_ij(phi_j)
    Eigen::VectorXd assemble_input(int i, const Eigen::VectorXd& phi, double t) const;

    // Autonomous part g_phi and input part b_phi of the vector field.
    Eigen::VectorXd g_phi(const Eigen::VectorXd& phi) const;
    Eigen::VectorXd b_phi(const Eigen::VectorXd& phi, double t) const;

    // Full vector field g_phi + b_phi, composed from the same primitive
    // evaluations as the two parts.
    void rhs(double t, const Eigen::VectorXd& phi, Eigen::VectorXd& out) const;

    CpsTrajectory simulate(const Eigen::VectorXd& phi0, double t0, double t1,
                           const OdeOptions& opts = {}, std::span<const double> out_times = {},
                           int samples = 256) const;

    // Copy of this system with the external inputs replaced.
    CoupledPhaseSystem with_inputs(std::map<int, InputSignal> inputs) const;

private:
    std::vector<OscillatorPhaseModel> osc_;
    std::vector<Coupling> couplings_;
    std::map<int, InputSignal> inputs_;
    std::vector<std::vector<int>> incoming_; // coupling indices per destination
    double coupling_scale_ = 0.0;
};

} // namespace oscphase

#endif
