#include "commands.hpp"

#include <fstream>
#include <iostream>

#include "oscphase/csv.hpp"
#include "oscphase/errors.hpp"
#include "oscphase/hierppv.hpp"

namespace oscphase::cli {

namespace {

struct Session {
    LoadedNetwork net;
    CommonFlags flags;

    double horizon_periods() const {
        return flags.horizon > 0.0 ? flags.horizon : net.solver.horizon_periods;
    }
    OdeOptions sim_ode() const {
        OdeOptions o = net.solver.ode();
        if (flags.tol > 0.0) {
            o.rel_tol = flags.tol;
            o.abs_tol = flags.tol * 1e-2;
        }
        return o;
    }
};

Session open_session(const CommonFlags& flags) {
    Session s{load_network(flags.config), flags};
    std::filesystem::create_directories(flags.out_dir);
    return s;
}

std::ofstream open_out(const Session& s, const std::string& name) {
    const std::filesystem::path p = s.flags.out_dir / name;
    std::ofstream f(p, std::ios::binary); // fixed newlines across platforms
    if (!f)
        throw std::runtime_error("cannot write " + p.string());
    return f;
}

LockOptions lock_options(const Session& s) {
    LockOptions o;
    o.newton_tol = s.net.solver.newton_tol;
    o.max_iters = s.net.solver.newton_max_iters;
    o.num_samples = s.net.solver.lock_samples;
    o.settle_horizon = s.net.solver.settle_horizon;
    return o;
}

LockedSolution solve_lock(const Session& s) {
    const CoupledPhaseSystem& cps = s.net.cps;
    double f_guess = s.net.solver.f_guess;
    Eigen::VectorXd dphi_guess = s.net.solver.dphi_guess;

    const double tau =
        s.flags.seed_shift != 0.0 ? s.flags.seed_shift : s.net.solver.seed_shift;
    if (tau != 0.0) {
        // Shift the guess along the orbit: short transient from the
        // configured state, re-anchored.
        Eigen::VectorXd phi0 = dphi_guess;
        phi0.array() -= dphi_guess[0];
        const double ts[1] = {tau};
        const OdeRhs rhs = [&cps](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) {
            cps.rhs(t, y, dydt);
        };
        OdeSolution sol = integrate_ode(rhs, phi0, 0.0, tau, ts, LockOptions().ode);
        dphi_guess = sol.y.row(0).transpose();
        dphi_guess.array() -= dphi_guess[0];
    }
    return find_lock(cps, f_guess, dphi_guess, lock_options(s));
}

void write_lock_files(const Session& s, const LockedSolution& sol) {
    {
        std::ofstream f = open_out(s, "lock.csv");
        write_waveform_csv(f, sol.delta_phi);
    }
    std::ofstream f = open_out(s, "lock.meta");
    f << "f_star=" << format_double(sol.f_star) << '\n'
      << "t_star=" << format_double(sol.T_star) << '\n'
      << "residual_norm=" << format_double(sol.residual_norm) << '\n'
      << "newton_iterations=" << sol.newton_iterations << '\n'
      << "used_fallback=" << (sol.used_fallback ? 1 : 0) << '\n'
      << "stable_hint=" << (sol.stable_hint ? 1 : 0) << '\n'
      << "anchor_shift=" << format_double(sol.anchor_shift) << '\n';
}

FloquetData solve_floquet(const Session& s, const LockedSolution& sol) {
    return floquet_analyze(s.net.cps, sol);
}

GroupPPVModel build_group(const Session& s, const LockedSolution& sol, const FloquetData& fd) {
    return build_group_model(s.net.cps, sol, fd, s.net.solver.channel_samples);
}

} // namespace

void cmd_lock(const CommonFlags& flags) {
    Session s = open_session(flags);
    LockedSolution sol = solve_lock(s);
    if (!sol.stable_hint)
        throw SolveError(
            "lock solve converged to an unstable solution (a non-unity Floquet multiplier "
            "lies outside the unit circle); rejecting it");
    write_lock_files(s, sol);
    std::cout << "lock: f* = " << format_double(sol.f_star)
              << ", residual = " << format_double(sol.residual_norm) << "\n";
}

void cmd_floquet(const CommonFlags& flags) {
    Session s = open_session(flags);
    LockedSolution sol = solve_lock(s);
    FloquetData fd = solve_floquet(s, sol);

    write_lock_files(s, sol);
    {
        std::ofstream f = open_out(s, "floquet.csv");
        f << "index,rho_re,rho_im,rho_abs,mu_re,mu_im\n";
        for (int i = 0; i < fd.multipliers.size(); ++i)
            f << i << ',' << format_double(fd.multipliers[i].real()) << ','
              << format_double(fd.multipliers[i].imag()) << ','
              << format_double(std::abs(fd.multipliers[i])) << ','
              << format_double(fd.exponents[i].real()) << ','
              << format_double(fd.exponents[i].imag()) << '\n';
    }
    {
        std::ofstream f = open_out(s, "u1.csv");
        write_waveform_csv(f, fd.u1);
    }
    {
        std::ofstream f = open_out(s, "v1.csv");
        write_waveform_csv(f, fd.v1);
    }
    std::cout << "floquet: |rho_1 - 1| = " << format_double(fd.unity_gap)
              << (fd.near_marginal_warn ? " (warning: near-marginal second multiplier)" : "")
              << "\n";
}

void cmd_extract(const CommonFlags& flags) {
    Session s = open_session(flags);
    LockedSolution sol = solve_lock(s);
    FloquetData fd = solve_floquet(s, sol);
    GroupPPVModel gm = build_group(s, sol, fd);

    write_lock_files(s, sol);
    int total = 0;
    for (const PeriodicWaveform& q : gm.channels)
        total += q.dim();
    const int ns = gm.channels[0].num_samples();
    Eigen::MatrixXd combined(ns, total);
    std::vector<std::string> names;
    int col = 0;
    for (std::size_t i = 0; i < gm.channels.size(); ++i) {
        const PeriodicWaveform& q = gm.channels[i];
        for (int c = 0; c < q.dim(); ++c) {
            names.push_back("q" + std::to_string(i) + "c" + std::to_string(c));
            if (q.num_samples() == ns) {
                combined.col(col++) = q.samples().col(c);
            } else {
                for (int k = 0; k < ns; ++k)
                    combined(k, col) = q.eval(static_cast<double>(k) / ns)[c];
                ++col;
            }
        }
    }
    std::ofstream f = open_out(s, "group_ppv.csv");
    write_waveform_csv(f, PeriodicWaveform::from_samples(combined), names);
    std::cout << "extract: group f* = " << format_double(gm.f_star) << ", " << total
              << " channels\n";
}

void cmd_simulate(const CommonFlags& flags, const std::string& which) {
    if (which != "full" && which != "reduced")
        throw ConfigError("simulate: --which must be 'full' or 'reduced'");
    Session s = open_session(flags);
    LockedSolution sol = solve_lock(s);

    const double t1 = s.horizon_periods() * sol.T_star;
    const int nout = std::max(8, static_cast<int>(std::lround(s.horizon_periods() *
                                                              s.net.solver.samples_per_period)));
    std::vector<double> grid = uniform_grid(0.0, t1, nout);

    if (which == "full") {
        CoupledPhaseSystem driven = s.net.cps.with_inputs(s.net.inputs);
        CpsTrajectory tr = driven.simulate(sol.phi_star(0.0), 0.0, t1, s.sim_ode(), grid);
        std::vector<std::string> header = {"t"};
        for (int i = 1; i <= s.net.cps.size(); ++i)
            header.push_back("phi_" + std::to_string(i));
        {
            std::ofstream f = open_out(s, "traj_full.csv");
            write_trajectory_csv(f, header, tr.t, tr.phi);
        }
        std::ofstream f = open_out(s, "traj_full.meta");
        f << "rhs_evals=" << tr.rhs_evals << '\n'
          << "rhs_component_evals=" << tr.rhs_evals * s.net.cps.size() << '\n'
          << "horizon_periods=" << format_double(s.horizon_periods()) << '\n';
        std::cout << "simulate full: " << tr.rhs_evals << " vector RHS evaluations\n";
    } else {
        FloquetData fd = solve_floquet(s, sol);
        GroupPPVModel gm = build_group(s, sol, fd);
        GroupSimOptions gopts;
        gopts.ode = s.sim_ode();
        gopts.ode.abs_tol = std::max(gopts.ode.abs_tol, GroupSimOptions().ode.abs_tol);
        gopts.amplitude_guard = s.net.solver.amplitude_guard;
        GroupTrajectory tr = simulate_group(gm, s.net.inputs, 0.0, t1, gopts, grid);
        for (const std::string& w : tr.warnings)
            std::cerr << "warning: " << w << '\n';
        Eigen::MatrixXd cols(static_cast<int>(tr.t.size()), 2);
        cols.col(0) = tr.alpha;
        cols.col(1) = tr.Phi_g;
        {
            std::ofstream f = open_out(s, "traj_reduced.csv");
            write_trajectory_csv(f, {"t", "alpha_h", "Phi_g"}, tr.t, cols);
        }
        std::ofstream f = open_out(s, "traj_reduced.meta");
        f << "rhs_evals=" << tr.rhs_evals << '\n'
          << "max_alpha_rate=" << format_double(tr.max_alpha_rate) << '\n'
          << "alpha_rate_ok=" << (tr.alpha_rate_ok ? 1 : 0) << '\n'
          << "horizon_periods=" << format_double(s.horizon_periods()) << '\n';
        std::cout << "simulate reduced: " << tr.rhs_evals << " scalar RHS evaluations\n";
    }
}

void cmd_compare(const CommonFlags& flags) {
    Session s = open_session(flags);
    LockedSolution sol = solve_lock(s);
    FloquetData fd = solve_floquet(s, sol);
    GroupPPVModel gm = build_group(s, sol, fd);

    ValidateOptions vopts;
    vopts.ode = s.sim_ode();
    vopts.samples_per_period = s.net.solver.samples_per_period;
    const double t1 = s.horizon_periods() * sol.T_star;
    ValidationReport rep = validate_reduction(s.net.cps, gm, s.net.inputs, 0.0, t1, vopts);
    for (const std::string& w : rep.warnings)
        std::cerr << "warning: " << w << '\n';

    std::ofstream f = open_out(s, "compare.csv");
    f << "sup_dphi_cycles,sup_alpha_mismatch_cycles,rhs_evals_full,rhs_evals_reduced,"
         "rhs_evals_full_per_period,rhs_evals_reduced_per_period,lock_slip,max_alpha_rate,"
         "max_ddphi_ratio,horizon_periods\n";
    f << format_double(rep.sup_dphi_cycles) << ','
      << format_double(rep.sup_alpha_mismatch_cycles) << ',' << rep.rhs_evals_full << ','
      << rep.rhs_evals_reduced << ','
      << format_double(rep.rhs_evals_full / rep.horizon_periods) << ','
      << format_double(rep.rhs_evals_reduced / rep.horizon_periods) << ','
      << (rep.lock_slip ? 1 : 0) << ',' << format_double(rep.max_alpha_rate) << ','
      << format_double(rep.max_ddphi_ratio) << ',' << format_double(rep.horizon_periods)
      << '\n';

    std::cout << "compare over " << format_double(rep.horizon_periods) << " periods:\n"
              << "  sup |dphi|      = " << format_double(rep.sup_dphi_cycles) << " cycles"
              << (rep.lock_slip ? "  [LOCK SLIP]" : "") << "\n"
              << "  sup |a_h - a^|  = " << format_double(rep.sup_alpha_mismatch_cycles)
              << " cycles\n"
              << "  RHS evals       = " << rep.rhs_evals_full << " (full, component) vs "
              << rep.rhs_evals_reduced << " (reduced, scalar)\n";
}

void cmd_demo_blowup(const CommonFlags& flags) {
    Session s = open_session(flags);
    LockedSolution sol = solve_lock(s);
    FloquetData fd = solve_floquet(s, sol);

    const double eps = s.net.solver.blowup_epsilon;
    const double horizon = s.horizon_periods() * sol.T_star;
    BlowupResult r = lptv_blowup_demo(s.net.cps, sol, fd, eps, horizon,
                                      s.net.solver.blowup_orthogonal, s.sim_ode());

    Eigen::MatrixXd cols(static_cast<int>(r.t.size()), 3);
    cols.col(0) = r.c1;
    cols.col(1) = r.dphi_norm;
    cols.col(2).setConstant(r.fitted_slope);
    std::ofstream f = open_out(s, "blowup.csv");
    write_trajectory_csv(f, {"t", "c1", "dphi_norm", "slope"}, r.t, cols);
    std::cout << "demo-blowup: fitted slope " << format_double(r.fitted_slope)
              << " (forcing " << (s.net.solver.blowup_orthogonal ? "orthogonalized" : "eps*u1")
              << ", eps = " << format_double(eps) << ")\n";
}

} // namespace oscphase::cli
