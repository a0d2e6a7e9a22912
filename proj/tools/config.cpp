#include "config.hpp"

#include <fstream>
#include <numbers>
#include <set>

#include <json.hpp>

#include "oscphase/csv.hpp"
#include "oscphase/prc.hpp"

namespace oscphase::cli {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object())
        throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw ConfigError(where + ": unknown key '" + key + "'");
}

double num(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key))
        throw ConfigError(where + ": missing '" + key + "'");
    if (!obj[key].is_number())
        throw ConfigError(where + ": '" + key + "' must be a number");
    return obj[key].get<double>();
}

double num_or(const json& obj, const std::string& key, double dflt) {
    return obj.contains(key) ? obj[key].get<double>() : dflt;
}

int int_at(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_number_integer())
        throw ConfigError(where + ": missing integer '" + key + "'");
    return obj[key].get<int>();
}

PeriodicWaveform wave_from_spec(const json& spec, const std::string& where,
                                const std::filesystem::path& base_dir) {
    require_keys(spec, where, {"harmonics", "samples", "csv", "constant", "num_samples"});
    const int modes = spec.contains("harmonics") + spec.contains("samples") +
                      spec.contains("csv") + spec.contains("constant");
    if (modes != 1)
        throw ConfigError(where +
                          ": exactly one of harmonics/samples/csv/constant is required");

    if (spec.contains("csv")) {
        const std::filesystem::path p = base_dir / spec["csv"].get<std::string>();
        std::ifstream f(p);
        if (!f)
            throw ConfigError(where + ": cannot open waveform file " + p.string());
        return read_waveform_csv(f);
    }
    if (spec.contains("samples")) {
        const json& rows = spec["samples"];
        if (!rows.is_array() || rows.empty() || !rows[0].is_array())
            throw ConfigError(where + ": 'samples' must be an array of rows");
        const int n = static_cast<int>(rows.size());
        const int d = static_cast<int>(rows[0].size());
        Eigen::MatrixXd s(n, d);
        for (int k = 0; k < n; ++k) {
            if (static_cast<int>(rows[k].size()) != d)
                throw ConfigError(where + ": ragged sample rows");
            for (int c = 0; c < d; ++c)
                s(k, c) = rows[k][c].get<double>();
        }
        return PeriodicWaveform::from_samples(s);
    }
    if (spec.contains("constant")) {
        const json& vals = spec["constant"];
        const int n = spec.contains("num_samples") ? spec["num_samples"].get<int>() : 64;
        Eigen::VectorXd v(vals.size());
        for (std::size_t i = 0; i < vals.size(); ++i)
            v[static_cast<int>(i)] = vals[i].get<double>();
        return PeriodicWaveform::constant(v, n);
    }

    const json& h = spec["harmonics"];
    require_keys(h, where + ".harmonics", {"dim", "num_samples", "terms"});
    const int dim = int_at(h, where, "dim");
    const int n = h.contains("num_samples") ? h["num_samples"].get<int>() : 64;
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, dim);
    for (const json& term : h["terms"]) {
        require_keys(term, where + ".terms[]", {"component", "harmonic", "cos", "sin"});
        const int comp = int_at(term, where, "component");
        const int harm = int_at(term, where, "harmonic");
        if (comp < 0 || comp >= dim)
            throw ConfigError(where + ": harmonic component out of range");
        const double ca = num_or(term, "cos", 0.0);
        const double sa = num_or(term, "sin", 0.0);
        for (int k = 0; k < n; ++k) {
            const double ang = 2.0 * std::numbers::pi * harm * k / n;
            s(k, comp) += ca * std::cos(ang) + sa * std::sin(ang);
        }
    }
    return PeriodicWaveform::from_samples(s);
}

OscillatorPhaseModel oscillator_from_spec(const json& spec, int index,
                                          const std::filesystem::path& base_dir) {
    const std::string where = "oscillators[" + std::to_string(index) + "]";
    require_keys(spec, where,
                 {"label", "f", "ppv", "xp", "builtin", "params", "num_samples"});
    const std::string label =
        spec.contains("label") ? spec["label"].get<std::string>() : "osc" + std::to_string(index);

    if (spec.contains("builtin")) {
        if (spec.contains("f") || spec.contains("ppv"))
            throw ConfigError(where + ": 'builtin' excludes explicit 'f'/'ppv'");
        std::map<std::string, double> params;
        if (spec.contains("params")) {
            if (!spec["params"].is_object())
                throw ConfigError(where + ": 'params' must be an object");
            for (const auto& [k, v] : spec["params"].items())
                params[k] = v.get<double>();
        }
        BuiltinOscillator b = make_builtin(spec["builtin"].get<std::string>(), params);
        CycleOptions copts;
        if (spec.contains("num_samples"))
            copts.num_samples = spec["num_samples"].get<int>();
        LimitCycle cyc = find_limit_cycle(b.sys, b.x_guess, b.T_guess, copts);
        ExtractOptions eopts;
        eopts.num_samples = copts.num_samples;
        OscillatorPhaseModel m = extract_ppv(b.sys, cyc.T, cyc.x_p, eopts);
        return OscillatorPhaseModel(m.freq(), m.ppv(), m.steady_state(), label);
    }

    if (!spec.contains("f") || !spec.contains("ppv"))
        throw ConfigError(where + ": need either 'builtin' or 'f' + 'ppv'");
    const double f = num(spec, where, "f");
    PeriodicWaveform p = wave_from_spec(spec["ppv"], where + ".ppv", base_dir);
    std::optional<PeriodicWaveform> xp;
    if (spec.contains("xp"))
        xp = wave_from_spec(spec["xp"], where + ".xp", base_dir);
    return OscillatorPhaseModel(f, std::move(p), std::move(xp), label);
}

} // namespace

LoadedNetwork load_network(const std::filesystem::path& config_path) {
    std::ifstream f(config_path);
    if (!f)
        throw ConfigError("cannot open config file " + config_path.string());
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::exception& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }
    const std::filesystem::path base_dir = config_path.parent_path();

    require_keys(doc, "config", {"oscillators", "couplings", "inputs", "solver"});
    if (!doc.contains("oscillators") || !doc["oscillators"].is_array() ||
        doc["oscillators"].empty())
        throw ConfigError("config: 'oscillators' must be a non-empty array");

    std::vector<OscillatorPhaseModel> osc;
    for (std::size_t i = 0; i < doc["oscillators"].size(); ++i)
        osc.push_back(
            oscillator_from_spec(doc["oscillators"][i], static_cast<int>(i), base_dir));
    const int n = static_cast<int>(osc.size());

    std::vector<Coupling> couplings;
    if (doc.contains("couplings")) {
        for (std::size_t i = 0; i < doc["couplings"].size(); ++i) {
            const json& c = doc["couplings"][i];
            const std::string where = "couplings[" + std::to_string(i) + "]";
            require_keys(c, where, {"src", "dst", "gain", "wave"});
            const int src = int_at(c, where, "src");
            const int dst = int_at(c, where, "dst");
            if (src < 0 || src >= n || dst < 0 || dst >= n)
                throw ConfigError(where + ": oscillator index out of range");
            if (!c.contains("wave"))
                throw ConfigError(where + ": missing 'wave'");
            PeriodicWaveform w = wave_from_spec(c["wave"], where + ".wave", base_dir);
            const double gain = num_or(c, "gain", 1.0);
            if (gain != 1.0)
                w = PeriodicWaveform::from_samples(gain * w.samples());
            couplings.push_back({src, dst, std::move(w)});
        }
    }

    std::map<int, InputSignal> inputs;
    if (doc.contains("inputs")) {
        for (std::size_t i = 0; i < doc["inputs"].size(); ++i) {
            const json& in = doc["inputs"][i];
            const std::string where = "inputs[" + std::to_string(i) + "]";
            require_keys(in, where,
                         {"dst", "channel", "constant", "amplitude", "frequency", "phase"});
            const int dst = int_at(in, where, "dst");
            if (dst < 0 || dst >= n)
                throw ConfigError(where + ": 'dst' out of range");
            const int dim = osc[dst].input_dim();
            auto [it, _] = inputs.try_emplace(dst, dim);
            const int channel = int_at(in, where, "channel");
            if (channel < 0 || channel >= dim)
                throw ConfigError(where + ": 'channel' out of range");
            if (in.contains("constant")) {
                it->second.add_constant(num(in, where, "constant"), channel);
            } else {
                it->second.add_sin(num(in, where, "amplitude"), num(in, where, "frequency"),
                                   num_or(in, "phase", 0.0), channel);
            }
        }
    }

    SolverSettings s;
    s.dphi_guess = Eigen::VectorXd::Zero(n);
    if (doc.contains("solver")) {
        const json& sv = doc["solver"];
        require_keys(sv, "solver",
                     {"rel_tol", "abs_tol", "max_steps", "f_guess", "dphi_guess", "newton_tol",
                      "newton_max_iters", "settle_horizon", "lock_samples", "seed_shift",
                      "channel_samples", "amplitude_guard", "horizon_periods",
                      "samples_per_period", "blowup_epsilon", "blowup_orthogonal"});
        s.rel_tol = num_or(sv, "rel_tol", s.rel_tol);
        s.abs_tol = num_or(sv, "abs_tol", s.abs_tol);
        s.max_steps = static_cast<long>(num_or(sv, "max_steps", static_cast<double>(s.max_steps)));
        s.f_guess = num_or(sv, "f_guess", s.f_guess);
        if (sv.contains("dphi_guess")) {
            const json& g = sv["dphi_guess"];
            if (!g.is_array() || static_cast<int>(g.size()) != n)
                throw ConfigError("solver.dphi_guess: need one entry per oscillator");
            for (int j = 0; j < n; ++j)
                s.dphi_guess[j] = g[j].get<double>();
        }
        s.newton_tol = num_or(sv, "newton_tol", s.newton_tol);
        s.newton_max_iters = static_cast<int>(num_or(sv, "newton_max_iters", s.newton_max_iters));
        s.settle_horizon = num_or(sv, "settle_horizon", s.settle_horizon);
        s.lock_samples = static_cast<int>(num_or(sv, "lock_samples", s.lock_samples));
        s.seed_shift = num_or(sv, "seed_shift", s.seed_shift);
        s.channel_samples = static_cast<int>(num_or(sv, "channel_samples", s.channel_samples));
        s.amplitude_guard = num_or(sv, "amplitude_guard", s.amplitude_guard);
        s.horizon_periods = num_or(sv, "horizon_periods", s.horizon_periods);
        s.samples_per_period =
            static_cast<int>(num_or(sv, "samples_per_period", s.samples_per_period));
        s.blowup_epsilon = num_or(sv, "blowup_epsilon", s.blowup_epsilon);
        if (sv.contains("blowup_orthogonal")) {
            if (!sv["blowup_orthogonal"].is_boolean())
                throw ConfigError("solver.blowup_orthogonal: must be a boolean");
            s.blowup_orthogonal = sv["blowup_orthogonal"].get<bool>();
        }
    } else {
        s.dphi_guess = Eigen::VectorXd::Zero(n);
    }

    try {
        return LoadedNetwork{CoupledPhaseSystem(std::move(osc), std::move(couplings)),
                             std::move(inputs), std::move(s)};
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

} // namespace oscphase::cli
