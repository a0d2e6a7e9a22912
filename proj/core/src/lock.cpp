#include "oscphase/lock.hpp"

#include <cmath>
#include <stdexcept>

#include "oscphase/errors.hpp"
#include "oscphase/floquet.hpp"

namespace oscphase {

Eigen::VectorXd LockedSolution::phi_star(double t) const {
    Eigen::VectorXd v(delta_phi.dim());
    delta_phi.eval_into(t / T_star, v);
    v.array() += f_star * t;
    return v;
}

Eigen::VectorXd LockedSolution::phi_star_rate(double t) const {
    Eigen::VectorXd v(delta_phi.dim());
    delta_phi_deriv.eval_into(t / T_star, v);
    return f_star * (Eigen::VectorXd::Ones(v.size()) + v);
}

namespace {

// Integrate the autonomous CPS over one period of the candidate frequency
// and return the period-return residual phi(T*) - phi(0) - 1.
Eigen::VectorXd shooting_residual(const CoupledPhaseSystem& cps, double f_star,
                                  const Eigen::VectorXd& phi0, const OdeOptions& ode) {
    const double T = 1.0 / f_star;
    const double ts[1] = {T};
    const OdeRhs rhs = [&cps](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) {
        cps.rhs(t, y, dydt);
    };
    OdeSolution s = integrate_ode(rhs, phi0, 0.0, T, ts, ode);
    return s.y.row(0).transpose() - phi0 - Eigen::VectorXd::Ones(cps.size());
}

Eigen::VectorXd unknowns_to_phi0(const Eigen::VectorXd& z, int n) {
    Eigen::VectorXd phi0 = Eigen::VectorXd::Zero(n);
    for (int j = 1; j < n; ++j)
        phi0[j] = z[j];
    return phi0;
}

struct NewtonOutcome {
    bool converged = false;
    Eigen::VectorXd z;
    Eigen::VectorXd residual;
    int iterations = 0;
};

NewtonOutcome newton_solve(const CoupledPhaseSystem& cps, Eigen::VectorXd z,
                           const LockOptions& opts) {
    const int n = cps.size();
    NewtonOutcome out;
    out.z = z;

    Eigen::VectorXd r = shooting_residual(cps, z[0], unknowns_to_phi0(z, n), opts.ode);
    for (int it = 0; it < opts.max_iters; ++it) {
        out.iterations = it;
        out.residual = r;
        if (r.lpNorm<Eigen::Infinity>() < opts.newton_tol) {
            out.converged = true;
            out.z = z;
            return out;
        }

        Eigen::MatrixXd J(n, n);
        for (int k = 0; k < n; ++k) {
            Eigen::VectorXd zp = z;
            const double h = opts.fd_step * std::max(std::abs(z[k]), 1.0);
            zp[k] += h;
            const Eigen::VectorXd rp =
                shooting_residual(cps, zp[0], unknowns_to_phi0(zp, n), opts.ode);
            J.col(k) = (rp - r) / (zp[k] - z[k]);
        }

        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        if (!lu.isInvertible())
            return out; // singular shooting Jacobian: let the caller decide
        Eigen::VectorXd step = lu.solve(-r);

        // Keep the iterate physical: cap frequency and offset moves.
        if (std::abs(step[0]) > 0.2 * z[0])
            step *= 0.2 * z[0] / std::abs(step[0]);
        for (int j = 1; j < n; ++j)
            if (std::abs(step[j]) > 0.25)
                step *= 0.25 / std::abs(step[j]);

        z += step;
        if (z[0] <= 0.0)
            return out; // frequency drifted non-positive
        r = shooting_residual(cps, z[0], unknowns_to_phi0(z, n), opts.ode);
    }
    out.residual = r;
    out.iterations = opts.max_iters;
    out.converged = r.lpNorm<Eigen::Infinity>() < opts.newton_tol;
    return out;
}

// Transient settle: integrate from the guess, read off the mean frequency
// and the settled offsets, and hand back a refreshed unknown vector.
Eigen::VectorXd settle_guess(const CoupledPhaseSystem& cps, const Eigen::VectorXd& z0,
                             const LockOptions& opts) {
    const int n = cps.size();
    const double horizon = opts.settle_horizon;
    const double window = 0.25 * horizon;
    const double ts[2] = {horizon - window, horizon};
    const OdeRhs rhs = [&cps](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) {
        cps.rhs(t, y, dydt);
    };
    OdeSolution s =
        integrate_ode(rhs, unknowns_to_phi0(z0, n), 0.0, horizon, ts, opts.ode);

    Eigen::VectorXd z(n);
    z[0] = (s.y(1, 0) - s.y(0, 0)) / window;
    for (int j = 1; j < n; ++j) {
        const double d = s.y(1, j) - s.y(1, 0);
        z[j] = d - std::round(d);
    }
    if (!(z[0] > 0.0))
        z[0] = z0[0];
    return z;
}

LockedSolution densify(const CoupledPhaseSystem& cps, double f_star,
                       const Eigen::VectorXd& phi0, const Eigen::VectorXd& residual,
                       const LockOptions& opts) {
    const int n = cps.size();
    const double T = 1.0 / f_star;
    const int ns = opts.num_samples;

    std::vector<double> ts(ns + 1);
    for (int k = 0; k <= ns; ++k)
        ts[k] = T * static_cast<double>(k) / ns;
    ts[ns] = T;

    const OdeRhs rhs = [&cps](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) {
        cps.rhs(t, y, dydt);
    };
    OdeSolution s = integrate_ode(rhs, phi0, 0.0, T, ts, opts.ode);

    // dphi*(s_k) = phi(t_k) - f* t_k, with the residual gap closed linearly
    // so the stored samples are exactly 1-periodic.
    Eigen::VectorXd gap = s.y.row(ns).transpose() - phi0 - Eigen::VectorXd::Ones(n);
    Eigen::MatrixXd samples(ns, n);
    for (int k = 0; k < ns; ++k) {
        const double sk = static_cast<double>(k) / ns;
        samples.row(k) = s.y.row(k) - (f_star * ts[k]) * Eigen::RowVectorXd::Ones(n) -
                         sk * gap.transpose();
    }
    samples.row(0) = phi0.transpose(); // t = 0: exact anchor, dphi_1(0) = 0

    LockedSolution sol;
    sol.f_star = f_star;
    sol.T_star = T;
    sol.delta_phi = PeriodicWaveform::from_samples(samples);
    sol.delta_phi_deriv = sol.delta_phi.derivative();
    sol.residual_norm = residual.lpNorm<Eigen::Infinity>();
    return sol;
}

} // namespace

LockedSolution find_lock(const CoupledPhaseSystem& cps, double f_guess,
                         const Eigen::VectorXd& dphi_guess, const LockOptions& opts) {
    const int n = cps.size();
    if (cps.has_external_inputs())
        throw std::invalid_argument(
            "find_lock: the system must have no external inputs (a_i == 0)");
    if (!(f_guess > 0.0) || !std::isfinite(f_guess))
        throw std::invalid_argument("find_lock: frequency guess must be positive");
    if (dphi_guess.size() != n)
        throw std::invalid_argument("find_lock: guess dimension mismatch");

    // A single uncoupled oscillator is its own lock: phi*(t) = f t exactly.
    if (n == 1 && cps.couplings().empty()) {
        const double f = cps.oscillator(0).freq();
        LockedSolution sol;
        sol.f_star = f;
        sol.T_star = 1.0 / f;
        sol.delta_phi = PeriodicWaveform::from_samples(Eigen::MatrixXd::Zero(opts.num_samples, 1));
        sol.delta_phi_deriv = sol.delta_phi.derivative();
        sol.residual_norm =
            shooting_residual(cps, f, Eigen::VectorXd::Zero(1), opts.ode)
                .lpNorm<Eigen::Infinity>();
        return sol;
    }

    Eigen::VectorXd z(n);
    z[0] = f_guess;
    for (int j = 1; j < n; ++j)
        z[j] = dphi_guess[j] - dphi_guess[0];

    NewtonOutcome nw = newton_solve(cps, z, opts);
    bool fell_back = false;
    if (!nw.converged && opts.allow_fallback) {
        fell_back = true;
        Eigen::VectorXd z2 = settle_guess(cps, z, opts);
        nw = newton_solve(cps, z2, opts);
    }
    if (!nw.converged)
        throw SolveError("find_lock: Newton did not converge (residual " +
                         std::to_string(nw.residual.lpNorm<Eigen::Infinity>()) + " after " +
                         std::to_string(nw.iterations) + " iterations" +
                         (fell_back ? ", with transient fallback)" : ")"));

    // Whole-cycle offsets are physically meaningless; normalize them away so
    // re-anchored solutions from shifted guesses coincide.
    Eigen::VectorXd phi0 = unknowns_to_phi0(nw.z, n);
    for (int j = 1; j < n; ++j)
        phi0[j] -= std::round(phi0[j]);

    LockedSolution sol = densify(cps, nw.z[0], phi0, nw.residual, opts);
    sol.newton_iterations = nw.iterations;
    sol.used_fallback = fell_back;

    if (opts.stability_probe) {
        const Eigen::MatrixXd M = monodromy(cps, sol, opts.ode);
        const Eigen::VectorXcd rho = Eigen::EigenSolver<Eigen::MatrixXd>(M, false).eigenvalues();
        int unity = 0;
        bool contracting = true;
        for (int i = 0; i < rho.size(); ++i) {
            if (std::abs(rho[i] - std::complex<double>(1.0, 0.0)) < 1e-5)
                ++unity;
            else if (std::abs(rho[i]) > 1.0 + 1e-7)
                contracting = false;
        }
        sol.stable_hint = (unity == 1) && contracting;
    }
    return sol;
}

LockedSolution shift_lock(const LockedSolution& sol, double tau) {
    if (tau == 0.0)
        return sol;

    const int n = sol.delta_phi.dim();
    const int ns = sol.delta_phi.num_samples();
    const double s_shift = tau / sol.T_star;
    const double ramp = sol.f_star * tau;
    const double c = ramp - std::round(ramp); // fractional part of the ramp shift

    Eigen::MatrixXd samples(ns, n);
    Eigen::VectorXd v(n);
    for (int k = 0; k < ns; ++k) {
        sol.delta_phi.eval_into(static_cast<double>(k) / ns - s_shift, v);
        samples.row(k) = (v.array() - c).transpose();
    }

    LockedSolution out = sol;
    out.delta_phi = PeriodicWaveform::from_samples(samples);
    out.delta_phi_deriv = out.delta_phi.derivative();
    out.anchor_shift = sol.anchor_shift + tau;
    return out;
}

LockVerification verify_lock(const CoupledPhaseSystem& cps, const LockedSolution& sol,
                             const OdeOptions& ode) {
    const int n = cps.size();
    const double T = sol.T_star;
    LockVerification rep;

    const OdeRhs rhs = [&cps](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) {
        cps.rhs(t, y, dydt);
    };

    // One period from phi*(0).
    {
        const double ts[1] = {T};
        OdeSolution s = integrate_ode(rhs, sol.phi_star(0.0), 0.0, T, ts, ode);
        rep.period_return_error = (s.y.row(0).transpose() - sol.phi_star(0.0) -
                                   Eigen::VectorXd::Ones(n))
                                      .lpNorm<Eigen::Infinity>();
    }

    // Pointwise defect of the stored interpolant against the vector field.
    {
        Eigen::VectorXd g(n);
        const int m = 256;
        for (int k = 0; k < m; ++k) {
            const double t = T * static_cast<double>(k) / m;
            cps.rhs(t, sol.phi_star(t), g);
            rep.max_ode_defect = std::max(
                rep.max_ode_defect, (sol.phi_star_rate(t) - g).lpNorm<Eigen::Infinity>());
        }
    }

    // Long-horizon drift and per-period gain over 20 periods.
    {
        std::vector<double> ts(21);
        for (int k = 0; k <= 20; ++k)
            ts[k] = T * k;
        OdeSolution s = integrate_ode(rhs, sol.phi_star(0.0), 0.0, 20.0 * T, ts, ode);
        rep.freq_drift = (s.y.row(20).transpose() - sol.phi_star(0.0) -
                          20.0 * Eigen::VectorXd::Ones(n))
                             .lpNorm<Eigen::Infinity>();
        rep.min_gain_per_period = 2.0;
        rep.max_gain_per_period = 0.0;
        for (int k = 1; k <= 20; ++k) {
            for (int j = 0; j < n; ++j) {
                const double gain = s.y(k, j) - s.y(k - 1, j);
                rep.min_gain_per_period = std::min(rep.min_gain_per_period, gain);
                rep.max_gain_per_period = std::max(rep.max_gain_per_period, gain);
            }
        }
    }
    return rep;
}

} // namespace oscphase
