#ifndef OSCPHASE_TOOLS_CONFIG_HPP
#define OSCPHASE_TOOLS_CONFIG_HPP

#include <filesystem>
#include <stdexcept>

#include "oscphase/network.hpp"

namespace oscphase::cli {

// Configuration problems map to exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolverSettings {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    long max_steps = 20'000'000;

    double f_guess = 1.0;
    Eigen::VectorXd dphi_guess; // sized at load
    double newton_tol = 1e-9;
    int newton_max_iters = 25;
    double settle_horizon = 200.0;
    int lock_samples = 128;
    double seed_shift = 0.0;

    int channel_samples = 256;
    double amplitude_guard = 0.1;

    double horizon_periods = 50.0;
    int samples_per_period = 16;

    double blowup_epsilon = 1e-3;
    bool blowup_orthogonal = false;

    OdeOptions ode() const {
        OdeOptions o;
        o.rel_tol = rel_tol;
        o.abs_tol = abs_tol;
        o.max_steps = max_steps;
        return o;
    }
};

struct LoadedNetwork {
    CoupledPhaseSystem cps; // autonomous part (no external inputs attached)
    std::map<int, InputSignal> inputs;
    SolverSettings solver;
};

// Parse and validate a JSON network description. Unknown keys anywhere are
// rejected. Builtin oscillator entries run the limit-cycle and sensitivity
// extraction pipeline at load time.
LoadedNetwork load_network(const std::filesystem::path& config_path);

} // namespace oscphase::cli

#endif
