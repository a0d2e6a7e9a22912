#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oscphase/errors.hpp"
#include "oscphase/integrate.hpp"

using namespace oscphase;

TEST_CASE("dense output reproduces a closed-form solution") {
    // y' = cos t, y(0) = 0 => y = sin t
    const OdeRhs rhs = [](double t, const Eigen::VectorXd&, Eigen::VectorXd& d) {
        d[0] = std::cos(t);
    };
    std::vector<double> ts = uniform_grid(0.0, 10.0, 257);
    OdeOptions opts;
    opts.rel_tol = 1e-10;
    opts.abs_tol = 1e-12;
    OdeSolution s = integrate_ode(rhs, Eigen::VectorXd::Zero(1), 0.0, 10.0, ts, opts);
    for (std::size_t i = 0; i < ts.size(); ++i)
        CHECK(std::abs(s.y(static_cast<int>(i), 0) - std::sin(ts[i])) < 1e-9);
    CHECK(s.rhs_evals > 0);
    CHECK(s.steps_accepted > 0);
}

TEST_CASE("requested output times are validated") {
    const OdeRhs rhs = [](double, const Eigen::VectorXd&, Eigen::VectorXd& d) { d[0] = 1.0; };
    const double bad[2] = {0.5, 0.2}; // not ascending
    CHECK_THROWS_AS(
        integrate_ode(rhs, Eigen::VectorXd::Zero(1), 0.0, 1.0, std::span(bad, 2), {}),
        std::invalid_argument);
    const double outside[1] = {2.0};
    CHECK_THROWS_AS(
        integrate_ode(rhs, Eigen::VectorXd::Zero(1), 0.0, 1.0, std::span(outside, 1), {}),
        std::invalid_argument);
    CHECK_THROWS_AS(integrate_ode(rhs, Eigen::VectorXd::Zero(1), 1.0, 0.5, {}, {}),
                    std::invalid_argument);
}

TEST_CASE("a singular right-hand side fails with a diagnostic time") {
    // Solution blows up at t = 0.5; the controller collapses the step there.
    const OdeRhs rhs = [](double, const Eigen::VectorXd& y, Eigen::VectorXd& d) {
        d[0] = y[0] * y[0];
    };
    Eigen::VectorXd y0(1);
    y0[0] = 2.0;
    const double ts[1] = {1.0};
    try {
        integrate_ode(rhs, y0, 0.0, 1.0, ts, {});
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        CHECK(std::abs(e.t_fail() - 0.5) < 0.05);
    }
}

TEST_CASE("exhausting the step budget is an integration failure") {
    const OdeRhs rhs = [](double t, const Eigen::VectorXd& y, Eigen::VectorXd& d) {
        d[0] = std::cos(20.0 * t) - y[0];
    };
    OdeOptions opts;
    opts.max_steps = 10;
    const double ts[1] = {100.0};
    CHECK_THROWS_AS(integrate_ode(rhs, Eigen::VectorXd::Zero(1), 0.0, 100.0,
                                  std::span(ts, 1), opts),
                    IntegrationError);
}

TEST_CASE("near-zero initial states still start cleanly at tight tolerances") {
    // Regression guard: the initial-step heuristic must not strangle the
    // first step when |y0| ~ 1e-15 and abs_tol is tiny.
    const OdeRhs rhs = [](double, const Eigen::VectorXd& y, Eigen::VectorXd& d) {
        const double c = 0.1 * std::sin(y[1] - y[0]);
        d[0] = 1.0 + c;
        d[1] = 1.0 - c;
    };
    Eigen::VectorXd y0(2);
    y0 << 0.0, 1.7e-15;
    OdeOptions opts;
    opts.rel_tol = 1e-12;
    opts.abs_tol = 1e-14;
    const double ts[1] = {1.0};
    OdeSolution s = integrate_ode(rhs, y0, 0.0, 1.0, ts, opts);
    CHECK(std::abs(s.y(0, 0) - 1.0) < 1e-11);
    CHECK(std::abs(s.y(0, 1) - s.y(0, 0)) < 1e-11);
}
