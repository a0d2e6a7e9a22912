#include "oscphase/waveform.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oscphase {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

PeriodicWaveform PeriodicWaveform::from_samples(const Eigen::MatrixXd& samples) {
    const int n = static_cast<int>(samples.rows());
    const int d = static_cast<int>(samples.cols());
    if (n < 8 || n % 2 != 0)
        throw std::invalid_argument("PeriodicWaveform: need an even number of samples >= 8, got " +
                                    std::to_string(n));
    if (d < 1)
        throw std::invalid_argument("PeriodicWaveform: dimension must be >= 1");
    if (!samples.allFinite())
        throw std::invalid_argument("PeriodicWaveform: samples contain non-finite values");

    PeriodicWaveform w;
    w.num_samples_ = n;
    w.samples_ = samples;
    const int half = n / 2;
    w.cos_coef_.setZero(d, half + 1);
    w.sin_coef_.setZero(d, half + 1);

    // Plain real DFT. n is desk-scale (default 128), so the O(n^2) sums are
    // cheap and keep the construction free of transform dependencies.
    for (int h = 0; h <= half; ++h) {
        Eigen::VectorXd ac = Eigen::VectorXd::Zero(d);
        Eigen::VectorXd as = Eigen::VectorXd::Zero(d);
        for (int k = 0; k < n; ++k) {
            const double ang = kTwoPi * static_cast<double>(h) * static_cast<double>(k) /
                               static_cast<double>(n);
            ac += std::cos(ang) * samples.row(k).transpose();
            if (h != 0 && h != half)
                as += std::sin(ang) * samples.row(k).transpose();
        }
        const double scale = (h == 0 || h == half) ? 1.0 / n : 2.0 / n;
        w.cos_coef_.col(h) = scale * ac;
        if (h != 0 && h != half)
            w.sin_coef_.col(h) = (2.0 / n) * as;
    }
    return w;
}

PeriodicWaveform PeriodicWaveform::constant(const Eigen::VectorXd& value, int num_samples) {
    Eigen::MatrixXd s(num_samples, value.size());
    for (int k = 0; k < num_samples; ++k)
        s.row(k) = value.transpose();
    return from_samples(s);
}

void PeriodicWaveform::eval_into(double theta, Eigen::VectorXd& out) const {
    if (!std::isfinite(theta))
        throw std::invalid_argument("PeriodicWaveform::eval: non-finite phase");
    const double tw = wrap01(theta);
    const int half = num_samples_ / 2;

    out = cos_coef_.col(0);
    const double c1 = std::cos(kTwoPi * tw);
    const double s1 = std::sin(kTwoPi * tw);
    double ch = 1.0, sh = 0.0; // cos/sin of h*2*pi*tw, h starts at 0
    for (int h = 1; h < half; ++h) {
        const double cn = ch * c1 - sh * s1;
        const double sn = sh * c1 + ch * s1;
        ch = cn;
        sh = sn;
        out.noalias() += ch * cos_coef_.col(h);
        out.noalias() += sh * sin_coef_.col(h);
    }
    // Nyquist term: cos(pi*n*tw)
    const double cn = ch * c1 - sh * s1;
    out.noalias() += cn * cos_coef_.col(half);
}

void PeriodicWaveform::synthesize_samples() {
    const int n = num_samples_;
    samples_.resize(n, dim());
    Eigen::VectorXd v(dim());
    for (int k = 0; k < n; ++k) {
        eval_into(static_cast<double>(k) / n, v);
        samples_.row(k) = v.transpose();
    }
}

PeriodicWaveform PeriodicWaveform::derivative() const {
    PeriodicWaveform d;
    d.num_samples_ = num_samples_;
    const int half = num_samples_ / 2;
    d.cos_coef_.setZero(dim(), half + 1);
    d.sin_coef_.setZero(dim(), half + 1);
    for (int h = 1; h < half; ++h) {
        const double w = kTwoPi * h;
        d.cos_coef_.col(h) = w * sin_coef_.col(h);
        d.sin_coef_.col(h) = -w * cos_coef_.col(h);
    }
    d.synthesize_samples();
    return d;
}

} // namespace oscphase
