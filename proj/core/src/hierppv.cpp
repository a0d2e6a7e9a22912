#include "oscphase/hierppv.hpp"

#include <cmath>
#include <stdexcept>

#include "oscphase/errors.hpp"

namespace oscphase {

GroupPPVModel build_group_model(const CoupledPhaseSystem& cps, const LockedSolution& sol,
                                const FloquetData& fd, int channel_samples) {
    if (!fd.unity_multiplier_ok || !fd.contraction_ok)
        throw StabilityError(
            "build_group_model: Floquet stability flags not satisfied (unity multiplier " +
            std::string(fd.unity_multiplier_ok ? "ok" : "missing") + ", contraction " +
            std::string(fd.contraction_ok ? "ok" : "violated") + ")");

    const int n = cps.size();
    GroupPPVModel gm;
    gm.f_star = sol.f_star;
    gm.lock = sol;
    gm.v1 = fd.v1;
    gm.coupling_scale = cps.coupling_scale();
    gm.labels.reserve(n);
    for (int i = 0; i < n; ++i)
        gm.labels.push_back(cps.oscillator(i).label());

    // Degenerate group: a single uncoupled oscillator reduces to its own
    // phase equation, so the channel is the original sensitivity verbatim.
    if (n == 1 && cps.couplings().empty()) {
        gm.channels.push_back(cps.oscillator(0).ppv());
        return gm;
    }

    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) {
        const OscillatorPhaseModel& osc = cps.oscillator(i);
        const int m = osc.input_dim();
        Eigen::MatrixXd q(channel_samples, m);
        Eigen::VectorXd pv(m);
        for (int k = 0; k < channel_samples; ++k) {
            const double theta = static_cast<double>(k) / channel_samples;
            fd.v1.eval_into(theta, v);
            const Eigen::VectorXd phi = sol.phi_star(theta * sol.T_star);
            osc.ppv().eval_into(phi[i], pv);
            q.row(k) = (v[i] * osc.freq()) * pv.transpose();
        }
        gm.channels.push_back(PeriodicWaveform::from_samples(q));
    }
    return gm;
}

double group_rhs(const GroupPPVModel& gm, const std::map<int, InputSignal>& inputs, double t,
                 double alpha) {
    const double theta = gm.f_star * (t + alpha);
    double acc = 0.0;
    Eigen::VectorXd qv, a;
    for (const auto& [i, sig] : inputs) {
        if (sig.is_zero())
            continue;
        const PeriodicWaveform& q = gm.channels.at(i);
        qv.resize(q.dim());
        a.resize(q.dim());
        q.eval_into(theta, qv);
        sig.eval_into(t, a);
        acc += qv.dot(a);
    }
    return acc;
}

GroupTrajectory simulate_group(const GroupPPVModel& gm, const std::map<int, InputSignal>& inputs,
                               double t0, double t1, const GroupSimOptions& opts,
                               std::span<const double> out_times, int samples) {
    GroupTrajectory traj;
    for (const auto& [i, sig] : inputs) {
        if (i < 0 || i >= static_cast<int>(gm.channels.size()))
            throw std::invalid_argument("simulate_group: input index out of range");
        if (sig.dim() != gm.channels[i].dim())
            throw std::invalid_argument("simulate_group: input dimension mismatch");
        if (gm.coupling_scale > 0.0 &&
            sig.amplitude_bound() > opts.amplitude_guard * gm.coupling_scale)
            traj.warnings.push_back("input " + std::to_string(i) + " amplitude " +
                                    std::to_string(sig.amplitude_bound()) + " exceeds " +
                                    std::to_string(opts.amplitude_guard) +
                                    " of the lock coupling scale; macromodel accuracy degrades");
    }

    const OdeRhs rhs = [&](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) {
        dydt[0] = group_rhs(gm, inputs, t, y[0]);
    };

    std::vector<double> grid;
    if (out_times.empty()) {
        grid = uniform_grid(t0, t1, samples);
        out_times = grid;
    }

    OdeSolution s = integrate_ode(rhs, Eigen::VectorXd::Zero(1), t0, t1, out_times, opts.ode);
    traj.t = std::move(s.t);
    traj.alpha = s.y.col(0);
    traj.rhs_evals = s.rhs_evals;
    traj.Phi_g.resize(traj.alpha.size());
    for (int k = 0; k < traj.alpha.size(); ++k) {
        traj.Phi_g[k] = gm.f_star * (traj.t[k] + traj.alpha[k]);
        const double rate = group_rhs(gm, inputs, traj.t[k], traj.alpha[k]);
        traj.max_alpha_rate = std::max(traj.max_alpha_rate, std::abs(rate));
    }
    // |alpha'| >= 1 would make shifted time non-monotonic and the macromodel
    // meaningless.
    traj.alpha_rate_ok = traj.max_alpha_rate < 1.0;
    if (!traj.alpha_rate_ok)
        traj.warnings.push_back("d(alpha_h)/dt reached " + std::to_string(traj.max_alpha_rate) +
                                "; shifted time is no longer monotone");
    return traj;
}

Eigen::MatrixXd reconstruct_phases(const GroupPPVModel& gm, std::span<const double> t,
                                   const Eigen::VectorXd& alpha) {
    if (static_cast<int>(t.size()) != alpha.size())
        throw std::invalid_argument("reconstruct_phases: time/alpha length mismatch");
    const int n = gm.lock.delta_phi.dim();
    Eigen::MatrixXd phi(alpha.size(), n);
    for (int k = 0; k < alpha.size(); ++k)
        phi.row(k) = gm.lock.phi_star(t[k] + alpha[k]).transpose();
    return phi;
}

namespace {

// Best-fit time shift: minimize |phi_obs - phi*(t + alpha)|_2 over alpha by
// Gauss-Newton, seeded from the previous sample for continuity.
double project_alpha(const LockedSolution& lock, const Eigen::VectorXd& phi_obs, double t,
                     double seed, double tol) {
    double alpha = seed;
    for (int it = 0; it < 60; ++it) {
        const Eigen::VectorXd r = phi_obs - lock.phi_star(t + alpha);
        const Eigen::VectorXd d = lock.phi_star_rate(t + alpha);
        const double denom = d.squaredNorm();
        if (denom <= 0.0)
            break;
        double step = r.dot(d) / denom;
        const double cap = 0.25 * lock.T_star;
        if (std::abs(step) > cap)
            step = std::copysign(cap, step);
        alpha += step;
        if (std::abs(step) < tol)
            break;
    }
    return alpha;
}

} // namespace

ValidationReport validate_reduction(const CoupledPhaseSystem& cps, const GroupPPVModel& gm,
                                    const std::map<int, InputSignal>& inputs, double t0,
                                    double t1, const ValidateOptions& opts) {
    const int n = cps.size();
    ValidationReport rep;
    rep.horizon_periods = (t1 - t0) / gm.lock.T_star;

    const int nout =
        std::max(8, static_cast<int>(std::lround(rep.horizon_periods * opts.samples_per_period)));
    std::vector<double> grid = uniform_grid(t0, t1, nout);

    // Full system from the locked state, with inputs switched in.
    CoupledPhaseSystem driven = cps.with_inputs(inputs);
    CpsTrajectory full =
        driven.simulate(gm.lock.phi_star(t0), t0, t1, opts.ode, grid);
    rep.rhs_evals_full = full.rhs_evals * n;

    GroupSimOptions gopts;
    gopts.ode = opts.ode;
    gopts.ode.abs_tol = std::max(opts.ode.abs_tol, opts.group_abs_tol);
    GroupTrajectory red = simulate_group(gm, inputs, t0, t1, gopts, grid);
    rep.rhs_evals_reduced = red.rhs_evals;
    rep.max_alpha_rate = red.max_alpha_rate;
    rep.warnings = red.warnings;

    rep.t = grid;
    rep.phi_full = full.phi;
    rep.alpha_h = red.alpha;
    rep.alpha_hat.resize(static_cast<int>(grid.size()));

    double seed = 0.0;
    Eigen::MatrixXd dphi(static_cast<int>(grid.size()), n);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Eigen::VectorXd phi_obs = full.phi.row(k).transpose();
        const double a = project_alpha(gm.lock, phi_obs, grid[k], seed, opts.alpha_tol);
        rep.alpha_hat[static_cast<int>(k)] = a;
        if (k > 0 && std::abs(a - seed) * gm.f_star > 0.5)
            rep.lock_slip = true;
        seed = a;

        const Eigen::VectorXd d = phi_obs - gm.lock.phi_star(grid[k] + a);
        dphi.row(static_cast<int>(k)) = d.transpose();
        rep.sup_dphi_cycles = std::max(rep.sup_dphi_cycles, d.lpNorm<Eigen::Infinity>());
        rep.sup_alpha_mismatch_cycles =
            std::max(rep.sup_alpha_mismatch_cycles,
                     std::abs(red.alpha[static_cast<int>(k)] - a) * gm.f_star);
    }

    // Measured |d(dphi)/dt| / |dphi| (central differences on the grid).
    for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
        const double dt = grid[k + 1] - grid[k - 1];
        const double dnorm = dphi.row(static_cast<int>(k)).lpNorm<Eigen::Infinity>();
        if (dnorm < 1e-14 || dt <= 0.0)
            continue;
        const double rate = ((dphi.row(static_cast<int>(k + 1)) -
                              dphi.row(static_cast<int>(k - 1))) /
                             dt)
                                .lpNorm<Eigen::Infinity>();
        rep.max_ddphi_ratio = std::max(rep.max_ddphi_ratio, rate / dnorm);
    }
    return rep;
}

OscillatorPhaseModel nest_as_oscillator(const GroupPPVModel& gm,
                                        const std::vector<PortSelection>& ports,
                                        std::string label) {
    if (ports.empty())
        throw std::invalid_argument("nest_as_oscillator: empty port selection");

    int total = 0;
    for (const PortSelection& p : ports) {
        if (p.oscillator < 0 || p.oscillator >= static_cast<int>(gm.channels.size()))
            throw std::invalid_argument("nest_as_oscillator: oscillator index out of range");
        const int m = gm.channels[p.oscillator].dim();
        if (p.channels.empty()) {
            total += m;
        } else {
            for (int c : p.channels)
                if (c < 0 || c >= m)
                    throw std::invalid_argument("nest_as_oscillator: channel index out of range");
            total += static_cast<int>(p.channels.size());
        }
    }

    // Single full-oscillator selection: reuse the channel waveform verbatim.
    if (ports.size() == 1 && ports[0].channels.empty()) {
        return OscillatorPhaseModel(gm.f_star, gm.channels[ports[0].oscillator], std::nullopt,
                                    std::move(label));
    }

    int ns = 0;
    for (const PortSelection& p : ports)
        ns = std::max(ns, gm.channels[p.oscillator].num_samples());
    Eigen::MatrixXd samples(ns, total);
    int col = 0;
    Eigen::VectorXd v;
    for (const PortSelection& p : ports) {
        const PeriodicWaveform& q = gm.channels[p.oscillator];
        std::vector<int> chans = p.channels;
        if (chans.empty())
            for (int c = 0; c < q.dim(); ++c)
                chans.push_back(c);
        if (q.num_samples() == ns) {
            for (int c : chans)
                samples.col(col++) = q.samples().col(c);
        } else {
            v.resize(q.dim());
            for (int k = 0; k < ns; ++k) {
                q.eval_into(static_cast<double>(k) / ns, v);
                int cc = col;
                for (int c : chans)
                    samples(k, cc++) = v[c];
            }
            col += static_cast<int>(chans.size());
        }
    }
    return OscillatorPhaseModel(gm.f_star, PeriodicWaveform::from_samples(samples), std::nullopt,
                                std::move(label));
}

} // namespace oscphase
