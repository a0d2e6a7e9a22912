#ifndef OSCPHASE_INPUT_SIGNAL_HPP
#define OSCPHASE_INPUT_SIGNAL_HPP

#include <Eigen/Dense>
#include <vector>

namespace oscphase {

// Finite sum of per-component sinusoids plus a constant offset. Covers the
// perturbation shapes used throughout (constant biases, single-tone and
// phasor-pair injections) while staying exactly serializable.
class InputSignal {
public:
    struct SinTerm {
        double amplitude = 0.0;
        double frequency = 0.0; // cycles per unit time
        double phase = 0.0;     // cycles
        int component = 0;
    };

    explicit InputSignal(int dim) : offset_(Eigen::VectorXd::Zero(dim)) {}

    static InputSignal zero(int dim) { return InputSignal(dim); }

    InputSignal& add_sin(double amplitude, double frequency, double phase, int component);
    InputSignal& add_offset(const Eigen::VectorXd& offset);
    InputSignal& add_constant(double value, int component);

    int dim() const { return static_cast<int>(offset_.size()); }
    bool is_zero() const { return terms_.empty() && offset_.isZero(0.0); }
    const std::vector<SinTerm>& terms() const { return terms_; }
    const Eigen::VectorXd& offset() const { return offset_; }

    void eval_into(double t, Eigen::VectorXd& out) const;
    Eigen::VectorXd eval(double t) const {
        Eigen::VectorXd out(dim());
        eval_into(t, out);
        return out;
    }

    // Worst-case infinity norm over time; used by the macromodel amplitude
    // guard.
    double amplitude_bound() const;

private:
    Eigen::VectorXd offset_;
    std::vector<SinTerm> terms_;
};

} // namespace oscphase

#endif
