#ifndef OSCPHASE_TESTS_FIXTURES_HPP
#define OSCPHASE_TESTS_FIXTURES_HPP

#include <cmath>
#include <numbers>

#include "oscphase/network.hpp"

namespace fixtures {

using namespace oscphase;

struct Harmonic {
    int component = 0;
    int harmonic = 0; // 0 = constant term
    double cos_amp = 0.0;
    double sin_amp = 0.0;
};

inline PeriodicWaveform wave_from_harmonics(int dim, int num_samples,
                                            const std::vector<Harmonic>& terms) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(num_samples, dim);
    for (int k = 0; k < num_samples; ++k) {
        const double th = static_cast<double>(k) / num_samples;
        for (const Harmonic& h : terms) {
            const double ang = 2.0 * std::numbers::pi * h.harmonic * th;
            s(k, h.component) += h.cos_amp * std::cos(ang) + h.sin_amp * std::sin(ang);
        }
    }
    return PeriodicWaveform::from_samples(s);
}

// p(theta) = [-sin 2pi theta, cos 2pi theta]
inline PeriodicWaveform pair_ppv(int num_samples = 64) {
    return wave_from_harmonics(2, num_samples,
                               {{0, 1, 0.0, -1.0}, {1, 1, 1.0, 0.0}});
}

// b(phi) = K [cos 2pi phi, sin 2pi phi]
inline PeriodicWaveform pair_coupling(double K, int num_samples = 64) {
    return wave_from_harmonics(2, num_samples, {{0, 1, K, 0.0}, {1, 1, 0.0, K}});
}

// Two identical oscillators, f = 1, Adler-form coupling K sin(2pi(phi_j - phi_i)).
inline CoupledPhaseSystem make_pair(double K = 0.1, double f = 1.0) {
    std::vector<OscillatorPhaseModel> osc;
    osc.emplace_back(f, pair_ppv(), std::nullopt, "osc1");
    osc.emplace_back(f, pair_ppv(), std::nullopt, "osc2");
    std::vector<Coupling> cpl;
    cpl.push_back({0, 1, pair_coupling(K)});
    cpl.push_back({1, 0, pair_coupling(K)});
    return CoupledPhaseSystem(std::move(osc), std::move(cpl));
}

// Detuned pair: f1 = 1 - delta, f2 = 1 + delta.
inline CoupledPhaseSystem make_detuned_pair(double delta = 0.02, double K = 0.1) {
    std::vector<OscillatorPhaseModel> osc;
    osc.emplace_back(1.0 - delta, pair_ppv(), std::nullopt, "osc1");
    osc.emplace_back(1.0 + delta, pair_ppv(), std::nullopt, "osc2");
    std::vector<Coupling> cpl;
    cpl.push_back({0, 1, pair_coupling(K)});
    cpl.push_back({1, 0, pair_coupling(K)});
    return CoupledPhaseSystem(std::move(osc), std::move(cpl));
}

// N identical sinusoidal oscillators on a bidirectional nearest-neighbour
// ring.
inline CoupledPhaseSystem make_ring(int N, double K = 0.1, double f = 1.0) {
    std::vector<OscillatorPhaseModel> osc;
    for (int i = 0; i < N; ++i)
        osc.emplace_back(f, pair_ppv(), std::nullopt, "ring" + std::to_string(i));
    std::vector<Coupling> cpl;
    for (int i = 0; i < N; ++i) {
        const int next = (i + 1) % N;
        cpl.push_back({i, next, pair_coupling(K)});
        cpl.push_back({next, i, pair_coupling(K)});
    }
    return CoupledPhaseSystem(std::move(osc), std::move(cpl));
}

// Pair with second-harmonic content in the sensitivity and the coupling so
// the locked-orbit Jacobian is genuinely time varying.
inline CoupledPhaseSystem make_harmonic_pair(double K = 0.08) {
    PeriodicWaveform p = wave_from_harmonics(
        2, 64, {{0, 1, 0.0, -1.0}, {0, 2, 0.3, 0.0}, {1, 1, 1.0, 0.0}, {1, 2, 0.0, 0.2}});
    PeriodicWaveform b = wave_from_harmonics(
        2, 64, {{0, 1, K, 0.0}, {0, 2, 0.25 * K, 0.0}, {1, 1, 0.0, K}, {1, 2, 0.0, 0.25 * K}});
    std::vector<OscillatorPhaseModel> osc;
    osc.emplace_back(1.0, p, std::nullopt, "h1");
    osc.emplace_back(1.03, p, std::nullopt, "h2");
    std::vector<Coupling> cpl;
    cpl.push_back({0, 1, b});
    cpl.push_back({1, 0, b});
    return CoupledPhaseSystem(std::move(osc), std::move(cpl));
}

} // namespace fixtures

#endif
