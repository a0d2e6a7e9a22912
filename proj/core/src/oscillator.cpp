#include "oscphase/oscillator.hpp"

#include <cmath>
#include <stdexcept>

namespace oscphase {

OscillatorPhaseModel::OscillatorPhaseModel(double f, PeriodicWaveform p,
                                           std::optional<PeriodicWaveform> x_p,
                                           std::string label)
    : f_(f), p_(std::move(p)), x_p_(std::move(x_p)), label_(std::move(label)) {
    if (!(f > 0.0) || !std::isfinite(f))
        throw std::invalid_argument("OscillatorPhaseModel: frequency must be positive and finite");
    if (x_p_ && x_p_->dim() < 1)
        throw std::invalid_argument("OscillatorPhaseModel: empty steady-state waveform");
}

double OscillatorPhaseModel::ppv_rhs(double phi, const Eigen::VectorXd& b) const {
    if (b.size() != p_.dim())
        throw std::invalid_argument("ppv_rhs: input dimension mismatch (expected " +
                                    std::to_string(p_.dim()) + ", got " +
                                    std::to_string(b.size()) + ")");
    Eigen::VectorXd pv(p_.dim());
    p_.eval_into(phi, pv);
    return f_ + f_ * pv.dot(b);
}

PhaseTrajectory simulate_phase(const OscillatorPhaseModel& m, const InputSignal& u, double phi0,
                               double t0, double t1, const OdeOptions& opts,
                               std::span<const double> out_times, int samples) {
    if (u.dim() != m.input_dim())
        throw std::invalid_argument("simulate_phase: input dimension mismatch");

    Eigen::VectorXd pv(m.input_dim()), bv(m.input_dim());
    const OdeRhs rhs = [&](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) {
        m.ppv().eval_into(y[0], pv);
        u.eval_into(t, bv);
        dydt[0] = m.freq() + m.freq() * pv.dot(bv);
    };

    std::vector<double> grid;
    if (out_times.empty()) {
        grid = uniform_grid(t0, t1, samples);
        out_times = grid;
    }

    Eigen::VectorXd y0(1);
    y0[0] = phi0;
    OdeSolution s = integrate_ode(rhs, y0, t0, t1, out_times, opts);

    PhaseTrajectory traj;
    traj.t = std::move(s.t);
    traj.phi = s.y.col(0);
    traj.rhs_evals = s.rhs_evals;
    return traj;
}

Eigen::MatrixXd reconstruct_waveform(const OscillatorPhaseModel& m, const PhaseTrajectory& traj) {
    if (!m.steady_state())
        throw std::invalid_argument("reconstruct_waveform: model has no steady-state waveform");
    const PeriodicWaveform& xp = *m.steady_state();
    Eigen::MatrixXd out(static_cast<int>(traj.t.size()), xp.dim());
    Eigen::VectorXd v(xp.dim());
    for (int i = 0; i < out.rows(); ++i) {
        xp.eval_into(traj.phi[i], v);
        out.row(i) = v.transpose();
    }
    return out;
}

} // namespace oscphase
