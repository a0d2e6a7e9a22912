#include "oscphase/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "oscphase/errors.hpp"

namespace oscphase {

namespace {

// Dormand-Prince 5(4) tableau (Hairer, Norsett & Wanner, DOPRI5).
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// Embedded error coefficients (b - bhat).
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense-output coefficients.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

double initial_step_guess(const OdeRhs& rhs, double t0, const Eigen::VectorXd& y0,
                          const Eigen::VectorXd& f0, double rel_tol, double abs_tol,
                          double span, long& evals) {
    const int n = static_cast<int>(y0.size());
    double d0 = 0.0, dd1 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double sc = abs_tol + rel_tol * std::abs(y0[i]);
        d0 += (y0[i] / sc) * (y0[i] / sc);
        dd1 += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / n);
    dd1 = std::sqrt(dd1 / n);
    double h0 = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * d0 / dd1;
    h0 = std::min(h0, span);

    Eigen::VectorXd y1 = y0 + h0 * f0;
    Eigen::VectorXd f1(n);
    rhs(t0 + h0, y1, f1);
    ++evals;
    double d2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double sc = abs_tol + rel_tol * std::abs(y0[i]);
        const double df = (f1[i] - f0[i]) / sc;
        d2 += df * df;
    }
    d2 = std::sqrt(d2 / n) / h0;

    const double dmax = std::max(dd1, d2);
    double h1 = (dmax <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                : std::pow(0.01 / dmax, 1.0 / 5.0);
    // A state vector near zero collapses d0 and with it the 100 h0 cap;
    // keep the first step workable and let the controller adapt.
    return std::clamp(std::min(100.0 * h0, h1), 1e-8 * span, span);
}

} // namespace

std::vector<double> uniform_grid(double t0, double t1, int n) {
    std::vector<double> g(n + 1);
    for (int i = 0; i <= n; ++i)
        g[i] = t0 + (t1 - t0) * static_cast<double>(i) / n;
    g.back() = t1;
    return g;
}

OdeSolution integrate_ode(const OdeRhs& rhs, const Eigen::VectorXd& y0, double t0, double t1,
                          std::span<const double> out_times, const OdeOptions& opts) {
    if (!(t1 > t0))
        throw std::invalid_argument("integrate_ode: t1 must exceed t0");
    if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0))
        throw std::invalid_argument("integrate_ode: tolerances must be positive");
    for (std::size_t i = 0; i < out_times.size(); ++i) {
        if (out_times[i] < t0 || out_times[i] > t1 ||
            (i > 0 && out_times[i] < out_times[i - 1]))
            throw std::invalid_argument("integrate_ode: output times must ascend within [t0, t1]");
    }

    const int n = static_cast<int>(y0.size());
    OdeSolution sol;
    sol.t.assign(out_times.begin(), out_times.end());
    sol.y.resize(static_cast<int>(out_times.size()), n);

    Eigen::VectorXd y = y0, ynew(n);
    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), yerr(n);

    rhs(t0, y, k1);
    sol.rhs_evals = 1;

    std::size_t next_out = 0;
    while (next_out < out_times.size() && out_times[next_out] <= t0) {
        sol.y.row(static_cast<int>(next_out)) = y.transpose();
        ++next_out;
    }

    double t = t0;
    double h = opts.initial_step > 0.0
                   ? std::min(opts.initial_step, t1 - t0)
                   : initial_step_guess(rhs, t0, y, k1, opts.rel_tol, opts.abs_tol, t1 - t0,
                                        sol.rhs_evals);
    if (opts.max_step > 0.0)
        h = std::min(h, opts.max_step);

    bool just_rejected = false;
    long total_steps = 0;

    while (t < t1) {
        if (++total_steps > opts.max_steps)
            throw IntegrationError("integrate_ode: step budget exhausted", t);
        const double h_floor = 16.0 * std::numeric_limits<double>::epsilon() *
                               std::max(std::abs(t), 1.0);
        // Fatal only when error control is actively driving h down; a small
        // accepted step merely grows back through the controller.
        if (h < h_floor && just_rejected)
            throw IntegrationError("integrate_ode: step size underflow", t);
        if (h < h_floor)
            h = h_floor;
        if (t + h > t1)
            h = t1 - t;

        ytmp = y + h * (a21 * k1);
        rhs(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h, ytmp, k6);
        ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        rhs(t + h, ynew, k7);
        sol.rhs_evals += 6;

        yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double err = 0.0;
        for (int i = 0; i < n; ++i) {
            const double sc =
                opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (yerr[i] / sc) * (yerr[i] / sc);
        }
        err = std::sqrt(err / n);

        if (err <= 1.0) {
            // Fill requested outputs inside (t, t+h] via the dense interpolant.
            if (next_out < out_times.size() && out_times[next_out] <= t + h) {
                const Eigen::VectorXd ydiff = ynew - y;
                const Eigen::VectorXd r3 = h * k1 - ydiff;
                const Eigen::VectorXd r4 = ydiff - h * k7 - r3;
                const Eigen::VectorXd r5 =
                    h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                while (next_out < out_times.size() && out_times[next_out] <= t + h) {
                    const double th = (out_times[next_out] - t) / h;
                    const double th1 = 1.0 - th;
                    sol.y.row(static_cast<int>(next_out)) =
                        (y + th * (ydiff + th1 * (r3 + th * (r4 + th1 * r5)))).transpose();
                    ++next_out;
                }
            }
            t += h;
            y.swap(ynew);
            k1.swap(k7); // first-same-as-last
            ++sol.steps_accepted;
            const double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.2,
                                          just_rejected ? 1.0 : 5.0);
            h *= fac;
            if (opts.max_step > 0.0)
                h = std::min(h, opts.max_step);
            just_rejected = false;
        } else {
            ++sol.steps_rejected;
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 1.0);
            just_rejected = true;
        }
    }

    // Requested times exactly at t1 that were not covered by the final
    // step's half-open window.
    while (next_out < out_times.size()) {
        sol.y.row(static_cast<int>(next_out)) = y.transpose();
        ++next_out;
    }
    return sol;
}

} // namespace oscphase
