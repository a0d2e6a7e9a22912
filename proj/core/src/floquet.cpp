#include "oscphase/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "oscphase/errors.hpp"

namespace oscphase {

namespace {

// Cached per-oscillator derivative waveforms for repeated Jacobian
// evaluation.
struct JacobianWorkspace {
    std::vector<PeriodicWaveform> p_deriv;
    std::vector<PeriodicWaveform> b_deriv; // parallel to cps.couplings()

    explicit JacobianWorkspace(const CoupledPhaseSystem& cps) {
        p_deriv.reserve(cps.size());
        for (int i = 0; i < cps.size(); ++i)
            p_deriv.push_back(cps.oscillator(i).ppv().derivative());
        b_deriv.reserve(cps.couplings().size());
        for (const Coupling& c : cps.couplings())
            b_deriv.push_back(c.wave.derivative());
    }

    void eval(const CoupledPhaseSystem& cps, const Eigen::VectorXd& phi,
              Eigen::MatrixXd& J) const {
        const int n = cps.size();
        J.setZero(n, n);
        Eigen::VectorXd pv, pdv, w;
        std::vector<Eigen::VectorXd> csum(n);
        for (int c = 0; c < static_cast<int>(cps.couplings().size()); ++c) {
            const Coupling& k = cps.couplings()[c];
            const int i = k.dst, j = k.src;
            const int m = cps.oscillator(i).input_dim();
            pv.resize(m);
            cps.oscillator(i).ppv().eval_into(phi[i], pv);
            w.resize(m);
            b_deriv[c].eval_into(phi[j], w);
            J(i, j) += cps.oscillator(i).freq() * pv.dot(w);
            if (csum[i].size() == 0)
                csum[i] = Eigen::VectorXd::Zero(m);
            k.wave.eval_into(phi[j], w);
            csum[i] += w;
        }
        for (int i = 0; i < n; ++i) {
            if (csum[i].size() == 0)
                continue;
            pdv.resize(csum[i].size());
            p_deriv[i].eval_into(phi[i], pdv);
            J(i, i) = cps.oscillator(i).freq() * pdv.dot(csum[i]);
        }
    }
};

} // namespace

Eigen::MatrixXd jacobian_at(const CoupledPhaseSystem& cps, const LockedSolution& sol, double t) {
    JacobianWorkspace ws(cps);
    Eigen::MatrixXd J;
    ws.eval(cps, sol.phi_star(t), J);
    return J;
}

Eigen::MatrixXd monodromy(const CoupledPhaseSystem& cps, const LockedSolution& sol,
                          const OdeOptions& ode) {
    const int n = cps.size();
    const JacobianWorkspace ws(cps);
    Eigen::MatrixXd Jt(n, n);

    // Column-stacked matrix ODE dM/dt = J(t) M.
    const OdeRhs rhs = [&](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) {
        ws.eval(cps, sol.phi_star(t), Jt);
        const Eigen::Map<const Eigen::MatrixXd> M(y.data(), n, n);
        Eigen::Map<Eigen::MatrixXd> dM(dydt.data(), n, n);
        dM.noalias() = Jt * M;
    };

    Eigen::VectorXd y0(n * n);
    Eigen::Map<Eigen::MatrixXd>(y0.data(), n, n).setIdentity();
    const double ts[1] = {sol.T_star};
    OdeSolution s = integrate_ode(rhs, y0, 0.0, sol.T_star, ts, ode);
    const Eigen::VectorXd yend = s.y.row(0);
    return Eigen::Map<const Eigen::MatrixXd>(yend.data(), n, n);
}

FloquetData floquet_decompose(const CoupledPhaseSystem& cps, const LockedSolution& sol,
                              const Eigen::MatrixXd& M, const FloquetOptions& opts) {
    const int n = cps.size();
    FloquetData fd;
    fd.monodromy = M;

    Eigen::EigenSolver<Eigen::MatrixXd> es(M, true);
    Eigen::VectorXcd rho = es.eigenvalues();

    // Order: the multiplier closest to 1 first, the rest by descending
    // magnitude.
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    int i1 = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(rho[i] - 1.0) < std::abs(rho[i1] - 1.0))
            i1 = i;
    std::swap(idx[0], idx[i1]);
    std::sort(idx.begin() + 1, idx.end(),
              [&](int a, int b) { return std::abs(rho[a]) > std::abs(rho[b]); });

    fd.multipliers.resize(n);
    fd.exponents.resize(n);
    for (int i = 0; i < n; ++i) {
        fd.multipliers[i] = rho[idx[i]];
        fd.exponents[i] = std::log(rho[idx[i]]) / sol.T_star;
    }

    fd.unity_gap = std::abs(fd.multipliers[0] - 1.0);
    if (fd.unity_gap >= opts.tol_unity)
        throw StabilityError("floquet_decompose: no Floquet multiplier within " +
                             std::to_string(opts.tol_unity) + " of 1 (closest gap " +
                             std::to_string(fd.unity_gap) + "); not a locked solution");
    for (int i = 1; i < n; ++i) {
        if (std::abs(fd.multipliers[i] - 1.0) < opts.tol_unity)
            throw StabilityError(
                "floquet_decompose: repeated unity Floquet multipliers; the locked orbit "
                "is not isolated");
        if (std::abs(fd.multipliers[i]) > 1.0 + opts.unstable_tol)
            throw StabilityError("floquet_decompose: multiplier of magnitude " +
                                 std::to_string(std::abs(fd.multipliers[i])) +
                                 " outside the unit circle; lock is unstable");
    }
    fd.unity_multiplier_ok = true;
    fd.contraction_ok = true;
    for (int i = 1; i < n; ++i)
        if (std::abs(fd.multipliers[i]) > 1.0 - opts.contraction_margin)
            fd.contraction_ok = false;
    if (n > 1 && 1.0 - std::abs(fd.multipliers[1]) < 1e-3)
        fd.near_marginal_warn = true;

    // u1 directly from the orbit tangent; the monodromy eigenvector only
    // cross-checks the direction.
    const int ns = sol.delta_phi.num_samples();
    {
        Eigen::MatrixXd u(ns, n);
        for (int k = 0; k < ns; ++k)
            u.row(k) = sol.phi_star_rate(sol.T_star * k / ns).transpose();
        fd.u1 = PeriodicWaveform::from_samples(u);
    }
    {
        const Eigen::VectorXcd ev = es.eigenvectors().col(idx[0]);
        const Eigen::VectorXd evr = ev.real();
        const Eigen::VectorXd u0 = fd.u1.eval(0.0);
        const double denom = evr.norm() * u0.norm();
        fd.u1_alignment = denom > 0.0 ? std::abs(evr.dot(u0)) / denom : 0.0;
    }

    // v1: left eigenvector of M for rho_1, propagated backward through the
    // adjoint system dw/dt = -J(t)' w (backward keeps the contaminating
    // modes decaying), then normalized once at t = 0.
    Eigen::VectorXd w_end;
    {
        Eigen::EigenSolver<Eigen::MatrixXd> esT(M.transpose(), true);
        const Eigen::VectorXcd rhoT = esT.eigenvalues();
        int j1 = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(rhoT[i] - 1.0) < std::abs(rhoT[j1] - 1.0))
                j1 = i;
        w_end = esT.eigenvectors().col(j1).real();
        if (w_end.norm() == 0.0)
            throw StabilityError("floquet_decompose: degenerate left eigenvector");
        w_end.normalize();
    }

    const JacobianWorkspace ws(cps);
    Eigen::MatrixXd Jt(n, n);
    // Backward time: sigma = T* - t.
    const OdeRhs adj = [&](double sigma, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) {
        ws.eval(cps, sol.phi_star(sol.T_star - sigma), Jt);
        dydt.noalias() = Jt.transpose() * y;
    };
    std::vector<double> sigmas(ns + 1);
    for (int k = 0; k <= ns; ++k)
        sigmas[k] = sol.T_star * k / ns;
    OdeSolution ws_sol = integrate_ode(adj, w_end, 0.0, sol.T_star, sigmas, opts.ode);

    Eigen::MatrixXd v(ns, n);
    for (int k = 0; k < ns; ++k) {
        // sigma = T*(1 - k/ns) corresponds to t = T* k/ns; row ns is t = 0.
        v.row(k) = ws_sol.y.row(ns - k);
    }
    const double scale = v.row(0).dot(fd.u1.samples().row(0));
    if (std::abs(scale) < 1e-12)
        throw StabilityError("floquet_decompose: v1(0)' u1(0) vanishes; cannot normalize");
    v /= scale;
    fd.v1 = PeriodicWaveform::from_samples(v);

    return fd;
}

FloquetData floquet_analyze(const CoupledPhaseSystem& cps, const LockedSolution& sol,
                            const FloquetOptions& opts) {
    return floquet_decompose(cps, sol, monodromy(cps, sol, opts.ode), opts);
}

BlowupResult lptv_blowup_demo(const CoupledPhaseSystem& cps, const LockedSolution& sol,
                              const FloquetData& fd, double eps, double horizon,
                              bool orthogonalize, const OdeOptions& ode) {
    const int n = cps.size();
    if (!(horizon > 0.0))
        throw std::invalid_argument("lptv_blowup_demo: horizon must be positive");

    const JacobianWorkspace ws(cps);
    Eigen::MatrixXd Jt(n, n);
    Eigen::VectorXd u(n), v(n), b(n);

    // Forcing: eps u1(t), or a fixed probe with its v1-projection removed
    // pointwise so the marginal mode receives nothing.
    const auto forcing = [&](double t, Eigen::VectorXd& out) {
        const double s = t / sol.T_star;
        fd.u1.eval_into(s, u);
        if (!orthogonalize) {
            out = eps * u;
            return;
        }
        out.resize(n);
        for (int i = 0; i < n; ++i)
            out[i] = eps * std::cos(2.0 * std::numbers::pi *
                                    (s + static_cast<double>(i) / (2.0 * n)));
        fd.v1.eval_into(s, v);
        out -= (v.dot(out)) * u;
    };

    // State: [delta_phi; c1].
    const OdeRhs rhs = [&](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) {
        ws.eval(cps, sol.phi_star(t), Jt);
        forcing(t, b);
        dydt.head(n).noalias() = Jt * y.head(n);
        dydt.head(n) += b;
        fd.v1.eval_into(t / sol.T_star, v);
        dydt[n] = v.dot(b);
    };

    const int nout = std::max(64, static_cast<int>(horizon / sol.T_star) * 16);
    std::vector<double> ts = uniform_grid(0.0, horizon, nout);
    OdeSolution s = integrate_ode(rhs, Eigen::VectorXd::Zero(n + 1), 0.0, horizon, ts, ode);

    BlowupResult out;
    out.t = std::move(s.t);
    out.c1 = s.y.col(n);
    out.dphi_norm.resize(s.y.rows());
    for (int k = 0; k < s.y.rows(); ++k)
        out.dphi_norm[k] = s.y.row(k).head(n).lpNorm<Eigen::Infinity>();

    // Least-squares slope of c1 against t through the origin offset.
    const int m = static_cast<int>(out.t.size());
    double tbar = 0.0, cbar = 0.0;
    for (int k = 0; k < m; ++k) {
        tbar += out.t[k];
        cbar += out.c1[k];
    }
    tbar /= m;
    cbar /= m;
    double num = 0.0, den = 0.0;
    for (int k = 0; k < m; ++k) {
        num += (out.t[k] - tbar) * (out.c1[k] - cbar);
        den += (out.t[k] - tbar) * (out.t[k] - tbar);
    }
    out.fitted_slope = den > 0.0 ? num / den : 0.0;
    return out;
}

} // namespace oscphase
