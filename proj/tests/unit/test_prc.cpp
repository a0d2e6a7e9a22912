#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oscphase/errors.hpp"
#include "oscphase/prc.hpp"
#include "support/oracles.hpp"

using namespace oscphase;
using std::numbers::pi;

namespace {

oracles::Rhs state_rhs(const StateSpaceOscillator& o) {
    return [&o](double, const Eigen::VectorXd& y, Eigen::VectorXd& d) { o.rhs(y, d); };
}

// Nearest point on the cycle (Gauss-Newton in the cycle parameter).
double project_on_cycle(const PeriodicWaveform& x_p, const PeriodicWaveform& x_p_deriv,
                        const Eigen::VectorXd& x, double seed) {
    double s = seed;
    for (int it = 0; it < 50; ++it) {
        const Eigen::VectorXd r = x - x_p.eval(s);
        const Eigen::VectorXd d = x_p_deriv.eval(s);
        const double step = r.dot(d) / d.squaredNorm();
        s += step;
        if (std::abs(step) < 1e-13)
            break;
    }
    return s;
}

} // namespace

TEST_CASE("hopf normal form: unit cycle with period 1") {
    BuiltinOscillator b = make_builtin("hopf");
    LimitCycle cyc = find_limit_cycle(b.sys, b.x_guess, b.T_guess);
    CHECK(std::abs(cyc.T - 1.0) < 1e-8);
    for (int k = 0; k < cyc.x_p.num_samples(); ++k)
        CHECK(std::abs(cyc.x_p.samples().row(k).norm() - 1.0) < 1e-8);

    // Radial contraction multiplier e^{-2T}; exactly one unity multiplier.
    Eigen::MatrixXd M = state_monodromy(b.sys, cyc.T, cyc.x_p);
    Eigen::VectorXcd rho = Eigen::EigenSolver<Eigen::MatrixXd>(M, false).eigenvalues();
    std::vector<double> mags = {std::abs(rho[0]), std::abs(rho[1])};
    std::sort(mags.begin(), mags.end());
    CHECK(std::abs(mags[1] - 1.0) < 1e-6);
    CHECK(std::abs(mags[0] - std::exp(-2.0)) < 1e-6);
}

TEST_CASE("van der Pol period matches a zero-crossing oracle") {
    BuiltinOscillator b = make_builtin("vanderpol");
    LimitCycle cyc = find_limit_cycle(b.sys, b.x_guess, b.T_guess);

    // Brute force: settle 20 units, then average 10 crossing intervals.
    Eigen::VectorXd y0 = oracles::rk4(state_rhs(b.sys), Eigen::Vector2d(2.0, 0.0), 0.0, 20.0,
                                      1e-4);
    const double T_oracle =
        oracles::crossing_period(state_rhs(b.sys), y0, 0.0, 100.0, 1e-4, 0, 0.0, 10);
    REQUIRE(T_oracle > 0.0);
    CHECK(std::abs(cyc.T - T_oracle) < 1e-6);
}

TEST_CASE("a linear center is rejected as non-isolated") {
    StateSpaceOscillator center;
    center.dim = 2;
    center.name = "center";
    center.rhs = [](const Eigen::VectorXd& x, Eigen::VectorXd& d) {
        d.resize(2);
        d[0] = -2.0 * pi * x[1];
        d[1] = 2.0 * pi * x[0];
    };
    center.input_matrix = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(find_limit_cycle(center, Eigen::Vector2d(1.0, 0.0), 1.0),
                    DegenerateOrbitError);
}

TEST_CASE("hopf sensitivity: constant tangential response, zero radial") {
    BuiltinOscillator b = make_builtin("hopf");
    LimitCycle cyc = find_limit_cycle(b.sys, b.x_guess, b.T_guess);
    OscillatorPhaseModel m = extract_ppv(b.sys, cyc.T, cyc.x_p);
    CHECK(std::abs(m.freq() - 1.0) < 1e-8);

    // Isochrons of this form are radial: the response to a tangential kick
    // is 1/(2 pi) independent of phase, and the radial response vanishes.
    for (int k = 0; k < 64; ++k) {
        const double th = static_cast<double>(k) / 64;
        const Eigen::VectorXd p = m.ppv().eval(th);
        const Eigen::Vector2d tangent(-std::sin(2.0 * pi * th), std::cos(2.0 * pi * th));
        const Eigen::Vector2d radial(std::cos(2.0 * pi * th), std::sin(2.0 * pi * th));
        CHECK(std::abs(p.dot(tangent) - 1.0 / (2.0 * pi)) < 1e-6);
        CHECK(std::abs(p.dot(radial)) < 1e-6);
    }
}

TEST_CASE("adjoint product with the orbit tangent is constant") {
    for (const char* name : {"vanderpol", "fhn", "ring3"}) {
        CAPTURE(name);
        BuiltinOscillator b = make_builtin(name);
        LimitCycle cyc = find_limit_cycle(b.sys, b.x_guess, b.T_guess);
        Eigen::MatrixXd B = Eigen::MatrixXd::Identity(b.sys.dim, b.sys.dim);
        StateSpaceOscillator full = b.sys;
        full.input_matrix = B; // read the raw adjoint on every state
        OscillatorPhaseModel m = extract_ppv(full, cyc.T, cyc.x_p);

        // v1' xdot in cycle-phase units is f everywhere; measure relative
        // spread.
        Eigen::VectorXd xdot(b.sys.dim);
        double lo = 1e300, hi = -1e300;
        for (int k = 0; k < 128; ++k) {
            const double th = static_cast<double>(k) / 128;
            b.sys.rhs(cyc.x_p.eval(th), xdot);
            const double ip = m.ppv().eval(th).dot(xdot);
            lo = std::min(lo, ip);
            hi = std::max(hi, ip);
        }
        const double mean = 0.5 * (lo + hi);
        CHECK((hi - lo) / std::abs(mean) < 1e-6);

        // Exactly one unity multiplier, remainder inside the unit circle.
        Eigen::MatrixXd M = state_monodromy(b.sys, cyc.T, cyc.x_p);
        Eigen::VectorXcd rho = Eigen::EigenSolver<Eigen::MatrixXd>(M, false).eigenvalues();
        int unity = 0;
        for (int i = 0; i < rho.size(); ++i) {
            if (std::abs(rho[i] - 1.0) < 1e-6)
                ++unity;
            else
                CHECK(std::abs(rho[i]) < 1.0);
        }
        CHECK(unity == 1);
    }
}

TEST_CASE("zero input column produces an identically zero channel") {
    BuiltinOscillator b = make_builtin("vanderpol");
    LimitCycle cyc = find_limit_cycle(b.sys, b.x_guess, b.T_guess);
    StateSpaceOscillator padded = b.sys;
    padded.input_matrix = Eigen::MatrixXd::Zero(2, 2);
    padded.input_matrix(1, 0) = 1.0;
    OscillatorPhaseModel m = extract_ppv(padded, cyc.T, cyc.x_p);
    CHECK(m.ppv().samples().col(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.ppv().samples().col(0).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("extraction commutes with shifting the cycle anchor") {
    BuiltinOscillator b = make_builtin("vanderpol");
    LimitCycle cyc = find_limit_cycle(b.sys, b.x_guess, b.T_guess);
    OscillatorPhaseModel m = extract_ppv(b.sys, cyc.T, cyc.x_p);

    const double shift = 0.3;
    const int ns = cyc.x_p.num_samples();
    Eigen::MatrixXd shifted(ns, 2);
    for (int k = 0; k < ns; ++k)
        shifted.row(k) = cyc.x_p.eval(static_cast<double>(k) / ns + shift).transpose();
    OscillatorPhaseModel ms =
        extract_ppv(b.sys, cyc.T, PeriodicWaveform::from_samples(shifted));

    for (int k = 0; k < 64; ++k) {
        const double th = static_cast<double>(k) / 64;
        CHECK((ms.ppv().eval(th) - m.ppv().eval(th + shift)).lpNorm<Eigen::Infinity>() < 1e-8);
    }
}

TEST_CASE("van der Pol sensitivity matches impulse-response measurements") {
    BuiltinOscillator b = make_builtin("vanderpol");
    LimitCycle cyc = find_limit_cycle(b.sys, b.x_guess, b.T_guess);
    OscillatorPhaseModel m = extract_ppv(b.sys, cyc.T, cyc.x_p);
    const PeriodicWaveform xp_deriv = cyc.x_p.derivative();

    const double f = 1.0 / cyc.T;
    const double eps = 1e-4;
    const double horizon = 12.0 * cyc.T; // transverse modes are long gone
    const double p_scale = m.ppv().samples().col(0).cwiseAbs().maxCoeff();
    REQUIRE(p_scale > 0.0);

    for (int k = 0; k < 8; ++k) {
        const double th0 = static_cast<double>(k) / 8;
        const Eigen::VectorXd x0 = cyc.x_p.eval(th0);
        Eigen::VectorXd x1 = x0;
        x1[1] += eps; // impulse of area eps through the input column

        const Eigen::VectorXd e_base = oracles::rk4(state_rhs(b.sys), x0, 0.0, horizon, 2e-4);
        const Eigen::VectorXd e_disp = oracles::rk4(state_rhs(b.sys), x1, 0.0, horizon, 2e-4);

        const double s_base = project_on_cycle(cyc.x_p, xp_deriv, e_base, th0);
        const double s_disp = project_on_cycle(cyc.x_p, xp_deriv, e_disp, s_base);
        double dphi = s_disp - s_base;
        dphi -= std::round(dphi);

        // Phase model prediction: an impulse of area eps advances the phase
        // by f p(theta0) eps cycles.
        const double p_measured = dphi / (f * eps);
        CAPTURE(th0);
        CHECK(std::abs(p_measured - m.ppv().eval(th0)[0]) < 0.02 * p_scale);
    }
}

TEST_CASE("extraction rejects a degenerate (non-isolated) orbit") {
    // Unit circle of the linear center: monodromy is the identity.
    StateSpaceOscillator center;
    center.dim = 2;
    center.name = "center";
    center.rhs = [](const Eigen::VectorXd& x, Eigen::VectorXd& d) {
        d.resize(2);
        d[0] = -2.0 * pi * x[1];
        d[1] = 2.0 * pi * x[0];
    };
    center.input_matrix = Eigen::MatrixXd::Identity(2, 2);
    const int n = 64;
    Eigen::MatrixXd s(n, 2);
    for (int k = 0; k < n; ++k) {
        s(k, 0) = std::cos(2.0 * pi * k / n);
        s(k, 1) = std::sin(2.0 * pi * k / n);
    }
    CHECK_THROWS_AS(extract_ppv(center, 1.0, PeriodicWaveform::from_samples(s)),
                    StabilityError);
}
