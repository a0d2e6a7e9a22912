// oscphase: abstract a synchronized group of coupled oscillators into a
// single effective phase macromodel, and validate the reduction.
//
// Exit codes: 0 success, 1 configuration/usage error, 2 lock solver
// failure, 3 Floquet stability failure, 4 integration failure.

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "oscphase/errors.hpp"

int main(int argc, char** argv) {
    using namespace oscphase;
    using namespace oscphase::cli;

    CLI::App app{"Effective group phase macromodels for coupled oscillator networks"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonFlags flags;
    std::string config_str, out_str = ".";
    app.add_option("--config", config_str, "Network description (JSON)")
        ->envname("OSCPHASE_CONFIG");
    app.add_option("--out", out_str, "Output directory")->envname("OSCPHASE_OUT");
    app.add_option("--tol", flags.tol, "Integrator relative tolerance override")
        ->envname("OSCPHASE_TOL");
    app.add_option("--horizon", flags.horizon, "Horizon in lock periods")
        ->envname("OSCPHASE_HORIZON");
    app.add_option("--seed-shift", flags.seed_shift,
                   "Shift the lock initial guess along the orbit by this time")
        ->envname("OSCPHASE_SEED_SHIFT");

    CLI::App* lock = app.add_subcommand("lock", "Solve the mutually injection-locked state");
    CLI::App* floquet =
        app.add_subcommand("floquet", "Floquet multipliers and mode-1 vectors of the lock");
    CLI::App* extract =
        app.add_subcommand("extract", "Build the effective group sensitivity channels");
    CLI::App* simulate = app.add_subcommand("simulate", "Run the full or reduced model");
    std::string which = "full";
    simulate->add_option("--which", which, "full|reduced")->capture_default_str();
    CLI::App* compare =
        app.add_subcommand("compare", "Validate the reduced model against the full system");
    CLI::App* demo =
        app.add_subcommand("demo-blowup", "Linearization-breakdown demonstration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (config_str.empty()) {
        std::cerr << "error: --config is required (or set OSCPHASE_CONFIG)\n";
        return 1;
    }
    flags.config = config_str;
    flags.out_dir = out_str;

    try {
        if (lock->parsed())
            cmd_lock(flags);
        else if (floquet->parsed())
            cmd_floquet(flags);
        else if (extract->parsed())
            cmd_extract(flags);
        else if (simulate->parsed())
            cmd_simulate(flags, which);
        else if (compare->parsed())
            cmd_compare(flags);
        else if (demo->parsed())
            cmd_demo_blowup(flags);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const SolveError& e) {
        std::cerr << "lock solver failure: " << e.what() << '\n';
        return 2;
    } catch (const StabilityError& e) {
        std::cerr << "stability failure: " << e.what() << '\n';
        return 3;
    } catch (const IntegrationError& e) {
        std::cerr << "integration failure: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
