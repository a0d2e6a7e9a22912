#ifndef OSCPHASE_WAVEFORM_HPP
#define OSCPHASE_WAVEFORM_HPP

#include <Eigen/Dense>
#include <cmath>

namespace oscphase {

// Reduce a phase argument to [0,1). The subtraction x - floor(x) is exact
// for finite x; a result of 1.0 can only appear through rounding at an
// integer boundary and is mapped back to 0.
inline double wrap01(double x) {
    double w = x - std::floor(x);
    if (w >= 1.0)
        w = 0.0;
    return w;
}

// Vector-valued 1-periodic function stored as uniform samples on [0,1)
// together with the coefficients of its trigonometric interpolant.
//
// Evaluation anywhere reproduces the interpolant through the samples;
// periodicity is exact because arguments are wrapped before synthesis.
// Instances are immutable after construction and safe to share across
// threads.
class PeriodicWaveform {
public:
    // Empty placeholder (dim 0); aggregate members default to this before
    // being assigned a real waveform.
    PeriodicWaveform() = default;

    // samples: num_samples x dim, num_samples even and >= 8, all finite.
    static PeriodicWaveform from_samples(const Eigen::MatrixXd& samples);

    // Convenience: constant waveform (every sample equal to `value`).
    static PeriodicWaveform constant(const Eigen::VectorXd& value, int num_samples = 128);

    int dim() const { return static_cast<int>(cos_coef_.rows()); }
    int num_samples() const { return num_samples_; }
    const Eigen::MatrixXd& samples() const { return samples_; }

    void eval_into(double theta, Eigen::VectorXd& out) const;
    Eigen::VectorXd eval(double theta) const {
        Eigen::VectorXd out(dim());
        eval_into(theta, out);
        return out;
    }

    // Derivative of the interpolant w.r.t. theta, same sampling. The
    // Nyquist cosine mode has no representable derivative on this grid and
    // is dropped (its sine pair vanishes at every sample point).
    PeriodicWaveform derivative() const;

    // Mean over one period (the DC Fourier coefficient).
    Eigen::VectorXd mean() const { return cos_coef_.col(0); }

private:
    void synthesize_samples();

    int num_samples_ = 0;
    // Coefficients stored per component: column h holds the h-th harmonic,
    // columns run 0..num_samples/2 (DC .. Nyquist). sin_coef_ columns 0 and
    // Nyquist are zero.
    Eigen::MatrixXd cos_coef_; // dim x (n/2+1)
    Eigen::MatrixXd sin_coef_; // dim x (n/2+1)
    Eigen::MatrixXd samples_;  // n x dim
};

} // namespace oscphase

#endif
