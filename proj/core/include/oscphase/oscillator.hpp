#ifndef OSCPHASE_OSCILLATOR_HPP
#define OSCPHASE_OSCILLATOR_HPP

#include <optional>
#include <string>

#include "oscphase/input_signal.hpp"
#include "oscphase/integrate.hpp"
#include "oscphase/waveform.hpp"

namespace oscphase {

// Scalar phase macromodel of a self-sustaining oscillator: free-running
// frequency f (cycles per unit time), a 1-periodic sensitivity waveform
// p(.) of the oscillator's input dimension, and optionally the 1-periodic
// steady-state orbit x_p(.) for waveform reconstruction.
//
// The phase obeys  dphi/dt = f + f * p(phi)' b(t)  with phi in cycles,
// stored unwrapped so long-horizon frequency measurements accumulate.
class OscillatorPhaseModel {
public:
    OscillatorPhaseModel(double f, PeriodicWaveform p,
                         std::optional<PeriodicWaveform> x_p = std::nullopt,
                         std::string label = {});

    double freq() const { return f_; }
    const PeriodicWaveform& ppv() const { return p_; }
    const std::optional<PeriodicWaveform>& steady_state() const { return x_p_; }
    const std::string& label() const { return label_; }
    int input_dim() const { return p_.dim(); }

    double ppv_rhs(double phi, const Eigen::VectorXd& b) const;

private:
    double f_;
    PeriodicWaveform p_;
    std::optional<PeriodicWaveform> x_p_;
    std::string label_;
};

struct PhaseTrajectory {
    std::vector<double> t;
    Eigen::VectorXd phi;
    long rhs_evals = 0;
};

// Integrate the phase equation under input u over [t0, t1], reporting phi
// at the requested times (uniform grid of `samples` points when out_times
// is empty).
PhaseTrajectory simulate_phase(const OscillatorPhaseModel& m, const InputSignal& u, double phi0,
                               double t0, double t1, const OdeOptions& opts = {},
                               std::span<const double> out_times = {}, int samples = 256);

// x(t) = x_p(phi(t)) pointwise. Requires the model to carry x_p.
Eigen::MatrixXd reconstruct_waveform(const OscillatorPhaseModel& m, const PhaseTrajectory& traj);

} // namespace oscphase

#endif
