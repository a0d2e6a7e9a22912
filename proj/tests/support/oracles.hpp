#ifndef OSCPHASE_TESTS_ORACLES_HPP
#define OSCPHASE_TESTS_ORACLES_HPP

// Independent numerical oracles for the test suites. Nothing here may call
// into the adaptive integrator or solver paths under test.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

using Rhs = std::function<void(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt)>;

// Classic fixed-step RK4.
inline Eigen::VectorXd rk4(const Rhs& f, Eigen::VectorXd y, double t0, double t1, double h) {
    const int n = static_cast<int>(y.size());
    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), tmp(n);
    double t = t0;
    while (t < t1 - 1e-15) {
        const double hh = std::min(h, t1 - t);
        f(t, y, k1);
        tmp = y + 0.5 * hh * k1;
        f(t + 0.5 * hh, tmp, k2);
        tmp = y + 0.5 * hh * k2;
        f(t + 0.5 * hh, tmp, k3);
        tmp = y + hh * k3;
        f(t + hh, tmp, k4);
        y += (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += hh;
    }
    return y;
}

// RK4 with a per-step observer (t, y) after each step.
inline void rk4_observe(const Rhs& f, Eigen::VectorXd y, double t0, double t1, double h,
                        const std::function<void(double, const Eigen::VectorXd&)>& observe) {
    const int n = static_cast<int>(y.size());
    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), tmp(n);
    double t = t0;
    observe(t, y);
    while (t < t1 - 1e-15) {
        const double hh = std::min(h, t1 - t);
        f(t, y, k1);
        tmp = y + 0.5 * hh * k1;
        f(t + 0.5 * hh, tmp, k2);
        tmp = y + 0.5 * hh * k2;
        f(t + 0.5 * hh, tmp, k3);
        tmp = y + hh * k3;
        f(t + hh, tmp, k4);
        y += (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += hh;
        observe(t, y);
    }
}

// Composite Simpson quadrature on a uniform grid (n even panels).
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2)
        ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Brute-force period estimate from upward zero crossings of component
// `comp` relative to level `level`, averaged over the last `m` crossings.
// The trajectory must already be settled onto the cycle.
inline double crossing_period(const Rhs& f, Eigen::VectorXd y, double t0, double t1, double h,
                              int comp, double level, int m) {
    std::vector<double> crossings;
    double prev_t = t0;
    double prev_v = y[comp] - level;
    rk4_observe(f, y, t0, t1, h, [&](double t, const Eigen::VectorXd& yy) {
        const double v = yy[comp] - level;
        if (t > t0 && prev_v < 0.0 && v >= 0.0) {
            // linear interpolation of the crossing time
            crossings.push_back(prev_t + (t - prev_t) * (-prev_v) / (v - prev_v));
        }
        prev_t = t;
        prev_v = v;
    });
    if (static_cast<int>(crossings.size()) < m + 1)
        return -1.0;
    const std::size_t last = crossings.size() - 1;
    return (crossings[last] - crossings[last - m]) / m;
}

// Least-squares slope of y against x.
inline double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double xb = 0.0, yb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xb += x[i];
        yb += y[i];
    }
    xb /= n;
    yb /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (x[i] - xb) * (y[i] - yb);
        den += (x[i] - xb) * (x[i] - xb);
    }
    return num / den;
}

} // namespace oracles

#endif
