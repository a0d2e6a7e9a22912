#include "oscphase/input_signal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oscphase {

InputSignal& InputSignal::add_sin(double amplitude, double frequency, double phase,
                                  int component) {
    if (!std::isfinite(amplitude) || !std::isfinite(frequency) || !std::isfinite(phase))
        throw std::invalid_argument("InputSignal: non-finite sinusoid parameters");
    if (component < 0 || component >= dim())
        throw std::invalid_argument("InputSignal: component index out of range");
    terms_.push_back({amplitude, frequency, phase, component});
    return *this;
}

InputSignal& InputSignal::add_offset(const Eigen::VectorXd& offset) {
    if (offset.size() != offset_.size())
        throw std::invalid_argument("InputSignal: offset dimension mismatch");
    if (!offset.allFinite())
        throw std::invalid_argument("InputSignal: non-finite offset");
    offset_ += offset;
    return *this;
}

InputSignal& InputSignal::add_constant(double value, int component) {
    if (!std::isfinite(value))
        throw std::invalid_argument("InputSignal: non-finite constant");
    if (component < 0 || component >= dim())
        throw std::invalid_argument("InputSignal: component index out of range");
    offset_[component] += value;
    return *this;
}

void InputSignal::eval_into(double t, Eigen::VectorXd& out) const {
    out = offset_;
    for (const SinTerm& s : terms_)
        out[s.component] +=
            s.amplitude * std::sin(2.0 * std::numbers::pi * (s.frequency * t + s.phase));
}

double InputSignal::amplitude_bound() const {
    Eigen::VectorXd b = offset_.cwiseAbs();
    for (const SinTerm& s : terms_)
        b[s.component] += std::abs(s.amplitude);
    return b.size() ? b.maxCoeff() : 0.0;
}

} // namespace oscphase
