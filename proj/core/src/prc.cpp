#include "oscphase/prc.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "oscphase/errors.hpp"

namespace oscphase {

void StateSpaceOscillator::eval_jacobian(const Eigen::VectorXd& x, Eigen::MatrixXd& J) const {
    if (jacobian) {
        jacobian(x, J);
        return;
    }
    // Central differences, component scale aware.
    const int n = dim;
    J.resize(n, n);
    Eigen::VectorXd xp = x, xm = x, fp(n), fm(n);
    const double base = std::cbrt(std::numeric_limits<double>::epsilon());
    for (int j = 0; j < n; ++j) {
        const double h = base * std::max(std::abs(x[j]), 1.0);
        xp[j] = x[j] + h;
        xm[j] = x[j] - h;
        rhs(xp, fp);
        rhs(xm, fm);
        J.col(j) = (fp - fm) / (xp[j] - xm[j]);
        xp[j] = x[j];
        xm[j] = x[j];
    }
}

namespace {

Eigen::VectorXd integrate_state(const StateSpaceOscillator& osc, const Eigen::VectorXd& x0,
                                double T, const OdeOptions& ode) {
    const OdeRhs f = [&osc](double, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) {
        osc.rhs(y, dydt);
    };
    const double ts[1] = {T};
    return integrate_ode(f, x0, 0.0, T, ts, ode).y.row(0).transpose();
}

} // namespace

LimitCycle find_limit_cycle(const StateSpaceOscillator& osc, const Eigen::VectorXd& x_guess,
                            double T_guess, const CycleOptions& opts) {
    const int n = osc.dim;
    if (x_guess.size() != n)
        throw std::invalid_argument("find_limit_cycle: guess dimension mismatch");
    if (!(T_guess > 0.0))
        throw std::invalid_argument("find_limit_cycle: period guess must be positive");

    const int a = opts.anchor_component;
    const double anchor_value = x_guess[a];

    // Unknowns z = (x0, T); residual = [x(T) - x0 ; x0[a] - anchor].
    Eigen::VectorXd z(n + 1);
    z.head(n) = x_guess;
    z[n] = T_guess;

    const auto residual = [&](const Eigen::VectorXd& zz) {
        Eigen::VectorXd r(n + 1);
        r.head(n) = integrate_state(osc, zz.head(n), zz[n], opts.ode) - zz.head(n);
        r[n] = zz[a] - anchor_value;
        return r;
    };

    Eigen::VectorXd r = residual(z);
    int iters = 0;
    for (; iters < opts.max_iters; ++iters) {
        if (r.head(n).lpNorm<Eigen::Infinity>() < opts.tol && std::abs(r[n]) < opts.tol)
            break;

        Eigen::MatrixXd J(n + 1, n + 1);
        for (int k = 0; k <= n; ++k) {
            Eigen::VectorXd zp = z;
            const double h = opts.fd_step * std::max(std::abs(z[k]), 1.0);
            zp[k] += h;
            J.col(k) = (residual(zp) - r) / h;
        }

        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        if (!lu.isInvertible())
            throw DegenerateOrbitError(
                "find_limit_cycle: singular shooting Jacobian; the orbit is not isolated");
        Eigen::VectorXd step = lu.solve(-r);
        if (std::abs(step[n]) > 0.5 * z[n])
            step *= 0.5 * z[n] / std::abs(step[n]);
        z += step;
        if (!(z[n] > 0.0))
            throw SolveError("find_limit_cycle: period iterate became non-positive");
        r = residual(z);
    }
    if (!(r.head(n).lpNorm<Eigen::Infinity>() < opts.tol && std::abs(r[n]) < opts.tol))
        throw SolveError("find_limit_cycle: Newton did not converge (residual " +
                         std::to_string(r.head(n).lpNorm<Eigen::Infinity>()) + ")");

    const double T = z[n];

    // Densify one period and close the return gap so the samples are
    // exactly periodic.
    const int ns = opts.num_samples;
    std::vector<double> ts(ns + 1);
    for (int k = 0; k <= ns; ++k)
        ts[k] = T * static_cast<double>(k) / ns;
    const OdeRhs f = [&osc](double, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) {
        osc.rhs(y, dydt);
    };
    OdeSolution s = integrate_ode(f, z.head(n), 0.0, T, ts, opts.ode);
    const Eigen::VectorXd gap = s.y.row(ns).transpose() - z.head(n);
    Eigen::MatrixXd samples(ns, n);
    for (int k = 0; k < ns; ++k)
        samples.row(k) = s.y.row(k) - (static_cast<double>(k) / ns) * gap.transpose();

    LimitCycle cyc;
    cyc.T = T;
    cyc.x_p = PeriodicWaveform::from_samples(samples);
    cyc.residual_norm = r.head(n).lpNorm<Eigen::Infinity>();
    cyc.newton_iterations = iters;

    // Isolation check: exactly one unity multiplier. A center (continuum of
    // orbits) converges trivially but fails here.
    const Eigen::MatrixXd M = state_monodromy(osc, T, cyc.x_p, opts.ode);
    const Eigen::VectorXcd rho = Eigen::EigenSolver<Eigen::MatrixXd>(M, false).eigenvalues();
    int unity = 0;
    for (int i = 0; i < n; ++i)
        if (std::abs(rho[i] - 1.0) < 1e-4)
            ++unity;
    if (unity != 1)
        throw DegenerateOrbitError("find_limit_cycle: " + std::to_string(unity) +
                                   " monodromy multipliers near 1; the orbit is not isolated");
    return cyc;
}

Eigen::MatrixXd state_monodromy(const StateSpaceOscillator& osc, double T,
                                const PeriodicWaveform& x_p, const OdeOptions& ode) {
    const int n = osc.dim;
    Eigen::MatrixXd G(n, n);
    Eigen::VectorXd xs(n);
    const OdeRhs rhs = [&](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) {
        x_p.eval_into(t / T, xs);
        osc.eval_jacobian(xs, G);
        const Eigen::Map<const Eigen::MatrixXd> M(y.data(), n, n);
        Eigen::Map<Eigen::MatrixXd> dM(dydt.data(), n, n);
        dM.noalias() = G * M;
    };
    Eigen::VectorXd y0(n * n);
    Eigen::Map<Eigen::MatrixXd>(y0.data(), n, n).setIdentity();
    const double ts[1] = {T};
    OdeSolution s = integrate_ode(rhs, y0, 0.0, T, ts, ode);
    const Eigen::VectorXd yend = s.y.row(0);
    return Eigen::Map<const Eigen::MatrixXd>(yend.data(), n, n);
}

namespace {

// One Newton step on the eigenpair (w, rho) of A, normalized w' w = 1.
void polish_eigenpair(const Eigen::MatrixXd& A, Eigen::VectorXd& w, double& rho) {
    const int n = static_cast<int>(A.rows());
    Eigen::MatrixXd K(n + 1, n + 1);
    K.topLeftCorner(n, n) = A - rho * Eigen::MatrixXd::Identity(n, n);
    K.topRightCorner(n, 1) = -w;
    K.bottomLeftCorner(1, n) = w.transpose();
    K(n, n) = 0.0;
    Eigen::VectorXd rhs(n + 1);
    rhs.head(n) = -(A * w - rho * w);
    rhs[n] = 0.5 * (1.0 - w.squaredNorm());
    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (!lu.isInvertible())
        return; // keep the unpolished pair
    const Eigen::VectorXd d = lu.solve(rhs);
    w += d.head(n);
    rho += d[n];
    w.normalize();
}

} // namespace

OscillatorPhaseModel extract_ppv(const StateSpaceOscillator& osc, double T,
                                 const PeriodicWaveform& x_p, const ExtractOptions& opts) {
    const int n = osc.dim;
    if (x_p.dim() != n)
        throw std::invalid_argument("extract_ppv: cycle dimension mismatch");
    if (osc.input_matrix.rows() != n || osc.input_matrix.cols() < 1)
        throw std::invalid_argument("extract_ppv: input matrix must be dim x m");
    if (!osc.input_matrix.allFinite())
        throw std::invalid_argument("extract_ppv: non-finite input matrix");

    const Eigen::MatrixXd M = state_monodromy(osc, T, x_p, opts.ode);

    // Left eigenpair for the unity multiplier, with one Newton polish.
    Eigen::EigenSolver<Eigen::MatrixXd> es(M.transpose(), true);
    const Eigen::VectorXcd rho = es.eigenvalues();
    int best = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(rho[i] - 1.0) < std::abs(rho[best] - 1.0))
            best = i;
    Eigen::VectorXd w = es.eigenvectors().col(best).real();
    if (w.norm() == 0.0)
        throw StabilityError("extract_ppv: degenerate unity eigenvector");
    w.normalize();
    double rho1 = rho[best].real();
    polish_eigenpair(M.transpose(), w, rho1);

    if (std::abs(rho1 - 1.0) >= opts.unity_tol)
        throw StabilityError("extract_ppv: no monodromy eigenvalue within " +
                             std::to_string(opts.unity_tol) + " of 1 (closest " +
                             std::to_string(rho1) + ")");
    for (int i = 0; i < n; ++i)
        if (i != best && std::abs(rho[i] - 1.0) < opts.unity_tol)
            throw StabilityError(
                "extract_ppv: more than one monodromy eigenvalue near 1; orbit not isolated");

    // Backward adjoint sweep over one period (backward keeps the
    // non-unity modes contracting).
    const int ns = opts.num_samples;
    Eigen::MatrixXd G(n, n);
    Eigen::VectorXd xs(n);
    const OdeRhs adj = [&](double sigma, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) {
        x_p.eval_into((T - sigma) / T, xs);
        osc.eval_jacobian(xs, G);
        dydt.noalias() = G.transpose() * y;
    };
    std::vector<double> sigmas(ns + 1);
    for (int k = 0; k <= ns; ++k)
        sigmas[k] = T * static_cast<double>(k) / ns;
    OdeSolution sadj = integrate_ode(adj, w, 0.0, T, sigmas, opts.ode);

    // Normalize once at t = 0 so w(0)' g(x_s(0)) = 1; constancy of
    // w(t)' g(x_s(t)) along the period is a measured property, not enforced.
    Eigen::VectorXd xdot0(n), x0(n);
    x_p.eval_into(0.0, x0);
    osc.rhs(x0, xdot0);
    const Eigen::VectorXd w0 = sadj.y.row(ns).transpose(); // sigma = T <-> t = 0
    const double scale = w0.dot(xdot0);
    if (std::abs(scale) < 1e-14)
        throw StabilityError("extract_ppv: adjoint is orthogonal to the orbit tangent");

    Eigen::MatrixXd p_samples(ns, static_cast<int>(osc.input_matrix.cols()));
    for (int k = 0; k < ns; ++k) {
        const Eigen::VectorXd wk = sadj.y.row(ns - k).transpose() / scale; // t = kT/ns
        p_samples.row(k) = (osc.input_matrix.transpose() * wk).transpose();
    }

    return OscillatorPhaseModel(1.0 / T, PeriodicWaveform::from_samples(p_samples), x_p,
                                osc.name);
}

namespace {

BuiltinOscillator make_hopf(double omega) {
    BuiltinOscillator b;
    b.sys.dim = 2;
    b.sys.name = "hopf";
    const double w = omega;
    b.sys.rhs = [w](const Eigen::VectorXd& x, Eigen::VectorXd& d) {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        d.resize(2);
        d[0] = x[0] * (1.0 - r2) - w * x[1];
        d[1] = x[1] * (1.0 - r2) + w * x[0];
    };
    b.sys.jacobian = [w](const Eigen::VectorXd& x, Eigen::MatrixXd& J) {
        const double x2 = x[0] * x[0], y2 = x[1] * x[1];
        J.resize(2, 2);
        J(0, 0) = 1.0 - 3.0 * x2 - y2;
        J(0, 1) = -w - 2.0 * x[0] * x[1];
        J(1, 0) = w - 2.0 * x[0] * x[1];
        J(1, 1) = 1.0 - x2 - 3.0 * y2;
    };
    b.sys.input_matrix = Eigen::MatrixXd::Identity(2, 2);
    b.x_guess = Eigen::Vector2d(1.0, 0.0);
    b.T_guess = 2.0 * std::numbers::pi / w;
    return b;
}

BuiltinOscillator make_vanderpol(double mu) {
    BuiltinOscillator b;
    b.sys.dim = 2;
    b.sys.name = "vanderpol";
    b.sys.rhs = [mu](const Eigen::VectorXd& x, Eigen::VectorXd& d) {
        d.resize(2);
        d[0] = x[1];
        d[1] = mu * (1.0 - x[0] * x[0]) * x[1] - x[0];
    };
    b.sys.jacobian = [mu](const Eigen::VectorXd& x, Eigen::MatrixXd& J) {
        J.resize(2, 2);
        J(0, 0) = 0.0;
        J(0, 1) = 1.0;
        J(1, 0) = -2.0 * mu * x[0] * x[1] - 1.0;
        J(1, 1) = mu * (1.0 - x[0] * x[0]);
    };
    b.sys.input_matrix = Eigen::MatrixXd::Zero(2, 1);
    b.sys.input_matrix(1, 0) = 1.0;
    b.x_guess = Eigen::Vector2d(2.0, 0.0);
    b.T_guess = 6.66;
    return b;
}

BuiltinOscillator make_fhn(double a, double bb, double eps, double i0) {
    BuiltinOscillator b;
    b.sys.dim = 2;
    b.sys.name = "fhn";
    b.sys.rhs = [=](const Eigen::VectorXd& x, Eigen::VectorXd& d) {
        d.resize(2);
        d[0] = x[0] - x[0] * x[0] * x[0] / 3.0 - x[1] + i0;
        d[1] = eps * (x[0] + a - bb * x[1]);
    };
    b.sys.jacobian = [=](const Eigen::VectorXd& x, Eigen::MatrixXd& J) {
        J.resize(2, 2);
        J(0, 0) = 1.0 - x[0] * x[0];
        J(0, 1) = -1.0;
        J(1, 0) = eps;
        J(1, 1) = -eps * bb;
    };
    b.sys.input_matrix = Eigen::MatrixXd::Zero(2, 1);
    b.sys.input_matrix(0, 0) = 1.0;
    b.x_guess = Eigen::Vector2d(1.0, 1.0);
    b.T_guess = 36.5;
    return b;
}

BuiltinOscillator make_ring3(double gain, double tau) {
    BuiltinOscillator b;
    b.sys.dim = 3;
    b.sys.name = "ring3";
    b.sys.rhs = [gain, tau](const Eigen::VectorXd& x, Eigen::VectorXd& d) {
        d.resize(3);
        for (int i = 0; i < 3; ++i)
            d[i] = (-x[i] - gain * std::tanh(x[(i + 2) % 3])) / tau;
    };
    b.sys.jacobian = [gain, tau](const Eigen::VectorXd& x, Eigen::MatrixXd& J) {
        J.setZero(3, 3);
        for (int i = 0; i < 3; ++i) {
            const double th = std::tanh(x[(i + 2) % 3]);
            J(i, i) = -1.0 / tau;
            J(i, (i + 2) % 3) = -gain * (1.0 - th * th) / tau;
        }
    };
    b.sys.input_matrix = Eigen::MatrixXd::Zero(3, 1);
    b.sys.input_matrix(0, 0) = 1.0;
    b.x_guess = Eigen::Vector3d(1.0, -1.0, 0.2);
    b.T_guess = 4.0;
    return b;
}

double param_or(const std::map<std::string, double>& p, const std::string& key, double dflt) {
    auto it = p.find(key);
    return it == p.end() ? dflt : it->second;
}

} // namespace

BuiltinOscillator make_builtin(const std::string& name,
                               const std::map<std::string, double>& params) {
    if (name == "hopf")
        return make_hopf(param_or(params, "omega", 2.0 * std::numbers::pi));
    if (name == "vanderpol")
        return make_vanderpol(param_or(params, "mu", 1.0));
    if (name == "fhn")
        return make_fhn(param_or(params, "a", 0.7), param_or(params, "b", 0.8),
                        param_or(params, "eps", 0.08), param_or(params, "i", 1.0));
    if (name == "ring3")
        return make_ring3(param_or(params, "gain", 3.0), param_or(params, "tau", 1.0));
    throw std::invalid_argument("make_builtin: unknown oscillator '" + name +
                                "' (expected hopf, vanderpol, fhn or ring3)");
}

} // namespace oscphase
