#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>

#include "longrun/horizon.hpp"
#include "longrun/simulate.hpp"
#include "test_util.hpp"

using namespace longrun;
using longrun_test::calibration_model;
using longrun_test::sample_cir_model;

TEST_CASE("estimates are independent of the degree of parallelism") {
    const auto prefs = make_preferences(-1.0);
    const auto model = calibration_model();
    SimConfig cfg;
    cfg.n_paths = 5000;
    cfg.seed = 99;

    setenv("LONGRUN_THREADS", "1", 1);
    const auto serial = sample_state_terminal(model, prefs, Measure::MyopicPhat, 0.2, 24.0, cfg);
    setenv("LONGRUN_THREADS", "4", 1);
    const auto parallel = sample_state_terminal(model, prefs, Measure::MyopicPhat, 0.2, 24.0, cfg);
    unsetenv("LONGRUN_THREADS");
    REQUIRE(serial.size() == parallel.size());
    for (size_t i = 0; i < serial.size(); ++i) CHECK(serial[i] == parallel[i]);

    const auto e1 = mc_estimate(serial);
    const auto e2 = mc_estimate(parallel);
    CHECK(e1.mean == e2.mean);  // bit-identical reduction
    CHECK(e1.std_error == e2.std_error);
}

TEST_CASE("OU terminal sampling matches the exact law") {
    const auto prefs = make_preferences(-1.0);
    const auto model = calibration_model();
    const auto sol = solve_ou_1d(model, prefs);
    SimConfig cfg;
    cfg.n_paths = 100000;
    cfg.seed = 7;
    {
        SimConfig zero = cfg;
        zero.n_paths = 100;
        const auto draws = sample_state_terminal(model, prefs, Measure::PhysicalP, 0.37, 0.0, zero);
        for (double d : draws) CHECK(d == doctest::Approx(0.37).epsilon(1e-15));
    }
    const double T = 18.0;
    const auto law = ou_hatp_law(sol, model, 0.2, T);
    const auto draws = sample_state_terminal(model, prefs, Measure::MyopicPhat, 0.2, T, cfg);
    const auto mean = mc_estimate(draws);
    CHECK(std::abs(mean.mean - law.mean) <= 4.0 * mean.std_error);
    const auto second = mc_estimate(draws, [&](double y) { return (y - law.mean) * (y - law.mean); });
    CHECK(std::abs(second.mean - law.variance) <= 4.0 * second.std_error);
}

TEST_CASE("OU exact and Euler transitions agree in distribution") {
    const auto prefs = make_preferences(-1.0);
    const auto model = calibration_model();
    SimConfig exact_cfg;
    exact_cfg.n_paths = 10000;
    exact_cfg.seed = 4;
    SimConfig euler_cfg = exact_cfg;
    euler_cfg.seed = 5;
    euler_cfg.scheme = SimScheme::FullTruncationEuler;
    euler_cfg.dt = 1e-3;

    const double T = 2.0;
    auto a = sample_state_terminal(model, prefs, Measure::PhysicalP, 0.1, T, exact_cfg);
    auto b = sample_state_terminal(model, prefs, Measure::PhysicalP, 0.1, T, euler_cfg);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    // two-sample Kolmogorov-Smirnov statistic
    double ks = 0.0;
    size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] <= b[ib])
            ++ia;
        else
            ++ib;
        ks = std::max(ks, std::abs(double(ia) / a.size() - double(ib) / b.size()));
    }
    const double critical_1pct = 1.63 * std::sqrt(2.0 / 10000.0);
    CHECK(ks < critical_1pct);
}

TEST_CASE("CIR terminal sampling: exact transition moments") {
    const auto prefs = make_preferences(-2.0);
    const auto model = sample_cir_model();
    SimConfig cfg;
    cfg.n_paths = 100000;
    cfg.seed = 21;
    const double y0 = 0.25, T = 3.0;
    const auto draws = sample_state_terminal(model, prefs, Measure::PhysicalP, y0, T, cfg);
    const auto est = mc_estimate(draws);
    const double decay = std::exp(-model.b * T);
    const double mean_exact = model.theta + (y0 - model.theta) * decay;
    const double a2 = model.a * model.a;
    const double var_exact = y0 * (a2 / model.b) * (decay - decay * decay) +
                             model.theta * (a2 / (2.0 * model.b)) * (1.0 - decay) * (1.0 - decay);
    CHECK(std::abs(est.mean - mean_exact) <= 4.0 * est.std_error);
    const auto var_est =
        mc_estimate(draws, [&](double y) { return (y - mean_exact) * (y - mean_exact); });
    CHECK(std::abs(var_est.mean - var_exact) <= 4.0 * var_est.std_error);
    for (double d : draws) CHECK(d > 0.0);

    // long horizon: sample mean within the CI of the stationary mean theta
    const auto longdraws = sample_state_terminal(model, prefs, Measure::PhysicalP, y0, 400.0, cfg);
    const auto longest = mc_estimate(longdraws);
    CHECK(std::abs(longest.mean - model.theta) <= 4.0 * longest.std_error);
}

TEST_CASE("riskless wealth compounds exactly") {
    const auto prefs = make_preferences(-1.0);
    const auto model = calibration_model();
    Policy zero;
    zero.name = "flat";
    zero.pi_const = VectorXd::Zero(1);
    zero.pi_lin = MatrixXd::Zero(1, 1);
    zero.eta_const = VectorXd::Zero(1);
    zero.eta_lin = MatrixXd::Zero(1, 1);
    SimConfig cfg;
    cfg.n_paths = 64;
    cfg.dt = 0.25;
    const double T = 24.0;
    const auto paths = simulate_wealth_and_sdf(model, zero, prefs, 0.0, T, cfg);
    for (double x : paths.x_terminal)
        CHECK(x == doctest::Approx(std::exp(model.r0 * T)).epsilon(1e-12));
}

TEST_CASE("wealth/SDF joint simulation: supermartingale and primal identity") {
    const auto prefs = make_preferences(-1.0);
    const auto model = calibration_model();
    const auto sol = solve_ou_1d(model, prefs);
    const auto lr = longrun_policy(model, sol, prefs);
    SimConfig cfg;
    cfg.n_paths = 40000;
    cfg.dt = 1.0 / 16.0;
    cfg.seed = 11;
    const double T = 24.0, y0 = 0.0;
    const auto paths = simulate_wealth_and_sdf(model, lr, prefs, y0, T, cfg);
    CHECK(paths.aborted == 0);

    std::vector<double> xm(paths.x_terminal.size());
    for (size_t i = 0; i < xm.size(); ++i) xm[i] = paths.x_terminal[i] * paths.m_terminal[i];
    const auto super = mc_estimate(xm);
    CHECK(super.mean <= 1.0 + 3.0 * super.std_error);
    // For the optimal pair the supermartingale is in fact a martingale:
    CHECK(std::abs(super.mean - 1.0) <= 4.0 * super.std_error);

    const auto xp = mc_estimate(paths.x_terminal,
                                [&](double x) { return std::pow(x, prefs.p); });
    const auto bounds = finite_horizon_bounds(model, sol, prefs, y0, T);
    CHECK(std::abs(xp.mean - bounds.primal) <= 3.0 * xp.std_error);
}

TEST_CASE("mc_estimate: moments, degenerate cases, heavy-tail guard") {
    {
        std::vector<double> constant(64, 2.5);
        const auto est = mc_estimate(constant);
        CHECK(est.mean == doctest::Approx(2.5).epsilon(1e-15));
        CHECK(est.std_error == 0.0);
    }
    {
        std::vector<double> tiny(4, 1.0);
        CHECK_THROWS_AS((void)mc_estimate(tiny), DegenerateSample);
    }
    {
        // CLT sanity on a million standard normals from the path streams
        PathRng rng(123, 0);
        std::vector<double> draws(1000000);
        for (auto& d : draws) d = rng.normal();
        const auto est = mc_estimate(draws);
        CHECK(std::abs(est.mean) <= 4.0 / 1000.0);
        const auto var = mc_estimate(draws, [](double x) { return x * x; });
        CHECK(std::abs(var.mean - 1.0) <= 4.0 * var.std_error);
    }
    {
        // one dominant draw: unreliable-estimator warning
        std::vector<double> skew(100, 1e-6);
        skew[17] = 5.0;
        const auto est = mc_estimate(skew);
        CHECK(est.heavy_tail_warning);
        CHECK(est.max_share > 0.9);
    }
}

TEST_CASE("transform estimate matches the Gaussian moment") {
    const auto prefs = make_preferences(-1.0);
    const auto model = calibration_model();
    const auto sol = solve_ou_1d(model, prefs);
    SimConfig cfg;
    cfg.n_paths = 100000;
    cfg.seed = 31;
    const double T = 30.0, y0 = 0.1;
    const auto draws = sample_state_terminal(model, prefs, Measure::MyopicPhat, y0, T, cfg);
    const auto est = mc_estimate(draws, [&](double y) { return std::exp(-sol.value(y)); });
    const auto law = ou_hatp_law(sol, model, y0, T);
    const double exact = gaussian_exp_quad_moment(law, 0.5 * sol.v1, -sol.v0);
    CHECK(std::abs(est.mean - exact) <= 3.0 * est.std_error);
}

TEST_CASE("state sampling under the q-optimal measure") {
    const auto prefs = make_preferences(-1.0);
    const auto model = calibration_model();
    const auto sol = solve_ou_1d(model, prefs);
    const auto dyn = measure_dynamics(model, sol, Measure::QOptimal);
    SimConfig cfg;
    cfg.n_paths = 100000;
    cfg.seed = 13;
    const double T = 36.0, y0 = 0.5;
    const auto draws = sample_state_terminal(model, prefs, Measure::QOptimal, y0, T, cfg);
    const auto est = mc_estimate(draws);
    const double decay = std::exp(-dyn.speed * T);
    const double mean_exact = dyn.level + (y0 - dyn.level) * decay;
    CHECK(std::abs(est.mean - mean_exact) <= 4.0 * est.std_error);
}

TEST_CASE("CIR Euler fallback clamps negative excursions and stays close") {
    const auto prefs = make_preferences(-2.0);
    const auto model = sample_cir_model();
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.seed = 17;
    cfg.scheme = SimScheme::FullTruncationEuler;
    cfg.dt = 0.02;
    CirSampleStats stats;
    const auto draws =
        sample_state_terminal(model, prefs, Measure::PhysicalP, 0.02, 6.0, cfg, &stats);
    for (double d : draws) CHECK(d >= 0.0);
    // same quantity with the exact scheme
    SimConfig exact = cfg;
    exact.scheme = SimScheme::ExactTransition;
    const auto ref = sample_state_terminal(model, prefs, Measure::PhysicalP, 0.02, 6.0, exact);
    const auto a = mc_estimate(draws);
    const auto b = mc_estimate(ref);
    CHECK(std::abs(a.mean - b.mean) <=
          4.0 * std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error) + 2e-4);
}

TEST_CASE("antithetic pairing halves the stream count and keeps determinism") {
    const auto prefs = make_preferences(-1.0);
    const auto model = calibration_model();
    SimConfig cfg;
    cfg.n_paths = 2000;
    cfg.seed = 5;
    cfg.antithetic = true;
    const auto draws = sample_state_terminal(model, prefs, Measure::PhysicalP, 0.0, 12.0, cfg);
    // consecutive pairs mirror around the conditional mean (y0 = 0 -> mean e^{-bT} y0 = 0)
    for (size_t i = 0; i + 1 < draws.size(); i += 2)
        CHECK(draws[i] == doctest::Approx(-draws[i + 1]).epsilon(1e-12));
}
