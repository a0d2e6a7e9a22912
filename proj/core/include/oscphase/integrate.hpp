#ifndef OSCPHASE_INTEGRATE_HPP
#define OSCPHASE_INTEGRATE_HPP

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

namespace oscphase {

using OdeRhs = std::function<void(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt)>;

struct OdeOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double initial_step = 0.0; // 0 => choose automatically
    double max_step = 0.0;     // 0 => no cap
    long max_steps = 20'000'000;
};

struct OdeSolution {
    std::vector<double> t;  // the requested output times
    Eigen::MatrixXd y;      // one row per output time
    long rhs_evals = 0;
    long steps_accepted = 0;
    long steps_rejected = 0;
};

// Adaptive 5(4) Dormand-Prince integration of dy/dt = rhs(t, y) from t0 to
// t1 (t1 > t0). Output is produced at the requested times (ascending, all
// within [t0, t1]) through the order-4 dense interpolant, so tightening the
// output grid does not change the step sequence. Deterministic for fixed
// inputs and tolerances. Throws IntegrationError on step underflow or when
// the step budget is exhausted.
OdeSolution integrate_ode(const OdeRhs& rhs, const Eigen::VectorXd& y0, double t0, double t1,
                          std::span<const double> out_times, const OdeOptions& opts = {});

// Uniform grid helper: n+1 points t0..t1 inclusive.
std::vector<double> uniform_grid(double t0, double t1, int n);

} // namespace oscphase

#endif
