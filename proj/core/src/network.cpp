#include "oscphase/network.hpp"

#include <set>
#include <stdexcept>

namespace oscphase {

CoupledPhaseSystem::CoupledPhaseSystem(std::vector<OscillatorPhaseModel> oscillators,
                                       std::vector<Coupling> couplings,
                                       std::map<int, InputSignal> external_inputs)
    : osc_(std::move(oscillators)), couplings_(std::move(couplings)),
      inputs_(std::move(external_inputs)) {
    const int n = size();
    if (n < 1)
        throw std::invalid_argument("CoupledPhaseSystem: need at least one oscillator");

    std::set<std::pair<int, int>> seen;
    incoming_.resize(n);
    for (int c = 0; c < static_cast<int>(couplings_.size()); ++c) {
        const Coupling& k = couplings_[c];
        if (k.src < 0 || k.src >= n || k.dst < 0 || k.dst >= n)
            throw std::invalid_argument("CoupledPhaseSystem: coupling index out of range");
        if (k.src == k.dst)
            throw std::invalid_argument("CoupledPhaseSystem: self-coupling is not allowed");
        if (k.wave.dim() != osc_[k.dst].input_dim())
            throw std::invalid_argument(
                "CoupledPhaseSystem: coupling waveform dimension does not match the "
                "destination input dimension");
        // Duplicates must be pre-summed by the caller; silent summation here
        // would hide configuration mistakes.
        if (!seen.insert({k.src, k.dst}).second)
            throw std::invalid_argument("CoupledPhaseSystem: duplicate coupling (src,dst) pair");
        incoming_[k.dst].push_back(c);
        coupling_scale_ =
            std::max(coupling_scale_, k.wave.samples().cwiseAbs().maxCoeff());
    }
    for (const auto& [i, sig] : inputs_) {
        if (i < 0 || i >= n)
            throw std::invalid_argument("CoupledPhaseSystem: input index out of range");
        if (sig.dim() != osc_[i].input_dim())
            throw std::invalid_argument("CoupledPhaseSystem: input dimension mismatch");
    }
}

bool CoupledPhaseSystem::has_external_inputs() const {
    for (const auto& [i, sig] : inputs_)
        if (!sig.is_zero())
            return true;
    return false;
}

const InputSignal* CoupledPhaseSystem::input_for(int i) const {
    auto it = inputs_.find(i);
    return it == inputs_.end() ? nullptr : &it->second;
}

Eigen::VectorXd CoupledPhaseSystem::assemble_input(int i, const Eigen::VectorXd& phi,
                                                   double t) const {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(osc_[i].input_dim());
    if (const InputSignal* sig = input_for(i)) {
        Eigen::VectorXd a(sig->dim());
        sig->eval_into(t, a);
        b += a;
    }
    Eigen::VectorXd w(osc_[i].input_dim());
    for (int c : incoming_[i]) {
        couplings_[c].wave.eval_into(phi[couplings_[c].src], w);
        b += w;
    }
    return b;
}

Eigen::VectorXd CoupledPhaseSystem::g_phi(const Eigen::VectorXd& phi) const {
    const int n = size();
    Eigen::VectorXd g(n);
    Eigen::VectorXd pv, csum, w;
    for (int i = 0; i < n; ++i) {
        const double f = osc_[i].freq();
        if (incoming_[i].empty()) {
            g[i] = f;
            continue;
        }
        const int m = osc_[i].input_dim();
        csum.setZero(m);
        w.resize(m);
        for (int c : incoming_[i]) {
            couplings_[c].wave.eval_into(phi[couplings_[c].src], w);
            csum += w;
        }
        pv.resize(m);
        osc_[i].ppv().eval_into(phi[i], pv);
        g[i] = f + f * pv.dot(csum);
    }
    return g;
}

Eigen::VectorXd CoupledPhaseSystem::b_phi(const Eigen::VectorXd& phi, double t) const {
    const int n = size();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd pv, a;
    for (int i = 0; i < n; ++i) {
        const InputSignal* sig = input_for(i);
        if (!sig || sig->is_zero())
            continue;
        const int m = osc_[i].input_dim();
        pv.resize(m);
        a.resize(m);
        osc_[i].ppv().eval_into(phi[i], pv);
        sig->eval_into(t, a);
        b[i] = osc_[i].freq() * pv.dot(a);
    }
    return b;
}

void CoupledPhaseSystem::rhs(double t, const Eigen::VectorXd& phi, Eigen::VectorXd& out) const {
    const int n = size();
    out.resize(n);
    Eigen::VectorXd pv, csum, w, a;
    for (int i = 0; i < n; ++i) {
        const double f = osc_[i].freq();
        const int m = osc_[i].input_dim();
        const InputSignal* sig = input_for(i);
        const bool coupled = !incoming_[i].empty();
        const bool driven = sig && !sig->is_zero();

        double gi = f;
        double bi = 0.0;
        if (coupled || driven) {
            pv.resize(m);
            osc_[i].ppv().eval_into(phi[i], pv);
        }
        if (coupled) {
            csum.setZero(m);
            w.resize(m);
            for (int c : incoming_[i]) {
                couplings_[c].wave.eval_into(phi[couplings_[c].src], w);
                csum += w;
            }
            gi = f + f * pv.dot(csum);
        }
        if (driven) {
            a.resize(m);
            sig->eval_into(t, a);
            bi = f * pv.dot(a);
        }
        out[i] = gi + bi;
    }
}

CpsTrajectory CoupledPhaseSystem::simulate(const Eigen::VectorXd& phi0, double t0, double t1,
                                           const OdeOptions& opts,
                                           std::span<const double> out_times,
                                           int samples) const {
    if (phi0.size() != size())
        throw std::invalid_argument("simulate: initial phase dimension mismatch");

    const OdeRhs f = [this](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) {
        rhs(t, y, dydt);
    };

    std::vector<double> grid;
    if (out_times.empty()) {
        grid = uniform_grid(t0, t1, samples);
        out_times = grid;
    }

    OdeSolution s = integrate_ode(f, phi0, t0, t1, out_times, opts);
    CpsTrajectory traj;
    traj.t = std::move(s.t);
    traj.phi = std::move(s.y);
    traj.rhs_evals = s.rhs_evals;
    return traj;
}

CoupledPhaseSystem CoupledPhaseSystem::with_inputs(std::map<int, InputSignal> inputs) const {
    return CoupledPhaseSystem(osc_, couplings_, std::move(inputs));
}

} // namespace oscphase
