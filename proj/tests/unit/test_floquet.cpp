#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oscphase/errors.hpp"
#include "oscphase/floquet.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace oscphase;
using std::numbers::pi;

TEST_CASE("pair Jacobian is the constant Adler matrix") {
    CoupledPhaseSystem cps = fixtures::make_pair(0.1);
    LockedSolution sol = find_lock(cps, 1.0, Eigen::Vector2d(0.0, 0.01));

    const double a = 2.0 * pi * 0.1; // 2 pi f K
    for (double t : {0.0, 0.21, 0.73}) {
        Eigen::MatrixXd J = jacobian_at(cps, sol, t);
        CHECK(std::abs(J(0, 0) + a) < 1e-8);
        CHECK(std::abs(J(0, 1) - a) < 1e-8);
        CHECK(std::abs(J(1, 0) - a) < 1e-8);
        CHECK(std::abs(J(1, 1) + a) < 1e-8);
    }
}

TEST_CASE("uncoupled system has a zero Jacobian and identity monodromy") {
    std::vector<OscillatorPhaseModel> osc;
    osc.emplace_back(1.0, fixtures::pair_ppv(), std::nullopt, "a");
    osc.emplace_back(1.0, fixtures::pair_ppv(), std::nullopt, "b");
    CoupledPhaseSystem cps(osc, {});
    LockedSolution sol = find_lock(cps, 1.0, Eigen::Vector2d::Zero());
    CHECK(jacobian_at(cps, sol, 0.4).cwiseAbs().maxCoeff() == 0.0);
    CHECK((monodromy(cps, sol) - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("Jacobian along the lock is T*-periodic") {
    CoupledPhaseSystem cps = fixtures::make_harmonic_pair();
    LockedSolution sol = find_lock(cps, 1.0, Eigen::Vector2d::Zero());
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int i = 0; i < 10; ++i) {
        const double t = u(rng);
        CHECK((jacobian_at(cps, sol, t + sol.T_star) - jacobian_at(cps, sol, t))
                  .cwiseAbs()
                  .maxCoeff() < 1e-9);
    }
}

TEST_CASE("pair monodromy matches the matrix exponential") {
    CoupledPhaseSystem cps = fixtures::make_pair(0.1);
    LockedSolution sol = find_lock(cps, 1.0, Eigen::Vector2d(0.0, 0.01));
    Eigen::MatrixXd M = monodromy(cps, sol);

    Eigen::EigenSolver<Eigen::MatrixXd> es(M);
    std::vector<double> mags = {std::abs(es.eigenvalues()[0]), std::abs(es.eigenvalues()[1])};
    std::sort(mags.begin(), mags.end());
    CHECK(std::abs(mags[1] - 1.0) < 1e-7);
    CHECK(std::abs(mags[0] - std::exp(-0.4 * pi)) < 1e-6);
}

TEST_CASE("Liouville: det(M) = exp of the integrated trace") {
    CoupledPhaseSystem cps = fixtures::make_harmonic_pair();
    LockedSolution sol = find_lock(cps, 1.0, Eigen::Vector2d::Zero());
    Eigen::MatrixXd M = monodromy(cps, sol);

    const double tr_int = oracles::simpson(
        [&](double t) { return jacobian_at(cps, sol, t).trace(); }, 0.0, sol.T_star, 512);
    CHECK(std::abs(M.determinant() - std::exp(tr_int)) < 1e-6);
}

TEST_CASE("pair decomposition: unity multiplier, constant u1 and v1") {
    CoupledPhaseSystem cps = fixtures::make_pair(0.1);
    LockedSolution sol = find_lock(cps, 1.0, Eigen::Vector2d(0.0, 0.01));
    FloquetData fd = floquet_analyze(cps, sol);

    CHECK(fd.unity_multiplier_ok);
    CHECK(fd.contraction_ok);
    CHECK(std::abs(fd.multipliers[0] - 1.0) < 1e-7);
    CHECK(std::abs(fd.multipliers[1].real() - std::exp(-0.4 * pi)) < 1e-6);
    CHECK(std::abs(fd.multipliers[1].imag()) < 1e-8);

    for (int k = 0; k < fd.u1.num_samples(); ++k) {
        CHECK(std::abs(fd.u1.samples()(k, 0) - 1.0) < 1e-7);
        CHECK(std::abs(fd.u1.samples()(k, 1) - 1.0) < 1e-7);
        CHECK(std::abs(fd.v1.samples()(k, 0) - 0.5) < 1e-7);
        CHECK(std::abs(fd.v1.samples()(k, 1) - 0.5) < 1e-7);
    }
    CHECK(fd.u1_alignment > 1.0 - 1e-9);
}

TEST_CASE("detuned pair: v1 weights by the opposite frequency") {
    CoupledPhaseSystem cps = fixtures::make_detuned_pair(0.02, 0.1);
    LockedSolution sol = find_lock(cps, 1.0, Eigen::Vector2d(0.0, 0.02));
    FloquetData fd = floquet_analyze(cps, sol);
    // Constant Jacobian 2 pi K cos(2 pi Delta) [[-f1, f1], [f2, -f2]]: left
    // null vector (f2, f1), normalized against u1 = (f*, f*).
    CHECK(std::abs(fd.v1.samples()(0, 0) - 1.02 / (2.0 * sol.f_star)) < 1e-7);
    CHECK(std::abs(fd.v1.samples()(0, 1) - 0.98 / (2.0 * sol.f_star)) < 1e-7);
}

TEST_CASE("bi-orthogonality and periodic consistency on a time-varying Jacobian") {
    CoupledPhaseSystem cps = fixtures::make_harmonic_pair();
    LockedSolution sol = find_lock(cps, 1.0, Eigen::Vector2d::Zero());
    FloquetData fd = floquet_analyze(cps, sol);

    // The harmonic-rich pair really does have a non-constant adjoint.
    CHECK((fd.v1.samples().colwise().maxCoeff() - fd.v1.samples().colwise().minCoeff())
              .maxCoeff() > 1e-4);

    // v1' u1 = 1 everywhere (one-shot normalization, constancy measured).
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double s = u(rng);
        worst = std::max(worst, std::abs(fd.v1.eval(s).dot(fd.u1.eval(s)) - 1.0));
    }
    CHECK(worst < 1e-7);

    // u1(0) is the unity eigenvector of the monodromy.
    const Eigen::VectorXd u0 = fd.u1.eval(0.0);
    CHECK((fd.monodromy * u0 - u0).lpNorm<Eigen::Infinity>() < 1e-6);

    // Backward-integrated v1 closes the period.
    CHECK(fd.u1_alignment > 1.0 - 1e-6);
    const Eigen::VectorXd v_end = fd.v1.eval(1.0);
    const Eigen::VectorXd v_start = fd.v1.eval(0.0);
    CHECK((v_end - v_start).norm() / v_start.norm() < 1e-6);

    for (int i = 1; i < 2; ++i)
        CHECK(std::abs(fd.multipliers[i]) < 1.0);
}

TEST_CASE("decompose failure modes") {
    CoupledPhaseSystem cps = fixtures::make_pair(0.1);
    LockedSolution sol = find_lock(cps, 1.0, Eigen::Vector2d(0.0, 0.01));

    // No unity multiplier.
    Eigen::MatrixXd contracting(2, 2);
    contracting << 0.5, 0.0, 0.0, 0.3;
    CHECK_THROWS_AS(floquet_decompose(cps, sol, contracting, {}), StabilityError);

    // Repeated unity multipliers (uncoupled identity).
    CHECK_THROWS_AS(floquet_decompose(cps, sol, Eigen::MatrixXd::Identity(2, 2), {}),
                    StabilityError);

    // Expanding multiplier: the anti-lock of the sign-flipped pair.
    CoupledPhaseSystem anti = fixtures::make_pair(-0.1);
    LockOptions lopts;
    LockedSolution asol = find_lock(anti, 1.0, Eigen::Vector2d(0.0, 0.01), lopts);
    CHECK_FALSE(asol.stable_hint);
    CHECK_THROWS_AS(floquet_analyze(anti, asol), StabilityError);
}

TEST_CASE("blowup demo: tangent forcing integrates to a linear ramp") {
    CoupledPhaseSystem cps = fixtures::make_pair(0.1);
    LockedSolution sol = find_lock(cps, 1.0, Eigen::Vector2d(0.0, 0.01));
    FloquetData fd = floquet_analyze(cps, sol);

    const double eps = 1e-3;
    BlowupResult r = lptv_blowup_demo(cps, sol, fd, eps, 50.0 * sol.T_star);
    CHECK(std::abs(r.fitted_slope - eps) / eps < 0.01);
    // c1(t) = eps t exactly for b_ext = eps u1
    const double c_end = r.c1[r.c1.size() - 1];
    CHECK(std::abs(c_end - eps * r.t.back()) < 1e-8);
    // and the linearized response itself grows without bound
    CHECK(r.dphi_norm[r.dphi_norm.size() - 1] > 10.0 * eps);

    BlowupResult z = lptv_blowup_demo(cps, sol, fd, 0.0, 10.0 * sol.T_star);
    CHECK(z.c1.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("blowup demo: orthogonalized forcing keeps c1 and the response bounded") {
    CoupledPhaseSystem cps = fixtures::make_harmonic_pair();
    LockedSolution sol = find_lock(cps, 1.0, Eigen::Vector2d::Zero());
    FloquetData fd = floquet_analyze(cps, sol);

    const double eps = 1e-3;
    BlowupResult r = lptv_blowup_demo(cps, sol, fd, eps, 50.0 * sol.T_star, true);
    CHECK(r.c1.cwiseAbs().maxCoeff() < 10.0 * eps * sol.T_star);
    CHECK(r.dphi_norm.maxCoeff() < 10.0 * eps);
    CHECK(std::abs(r.fitted_slope) < 0.01 * eps);
}
