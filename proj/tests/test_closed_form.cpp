#include <doctest.h>

#include <cmath>
#include <random>

#include "longrun/closed_form.hpp"
#include "test_util.hpp"

using namespace longrun;
using longrun_test::calibration_model;
using longrun_test::sample_cir_model;

// Golden values computed independently from the closed-form expressions.
namespace {
constexpr double kCalTheta1 = 0.56776189884799999;
constexpr double kCalV1_1 = 0.0057998126195452091;
constexpr double kCalV0_1 = -0.056274407314477484;
constexpr double kCalLambda1 = -0.0070340806232476166;
constexpr double kCalHatKappa1 = 0.017029094733884254;
constexpr double kCalHatMean1 = 0.30317756953334152;
constexpr double kCalDelta1 = 1.7765539295152228;

constexpr double kCalTheta4 = 0.30841903815679989;
constexpr double kCalV1_4 = 0.013598216558937542;
constexpr double kCalV0_4 = -0.15878710691530096;
constexpr double kCalLambda4 = -0.020452359514683542;

constexpr double kCirTheta = 0.23506666666666667;
constexpr double kCirLambdaDisc = 0.0015666666666666667;
constexpr double kCirV0 = 0.087434208703791649;
constexpr double kCirV1 = -0.14510226846136839;
constexpr double kCirGrowth = -0.090613778791432356;
}  // namespace

TEST_CASE("OU closed form: constant opportunities reduce to the Merton rate") {
    const auto prefs = make_preferences(-1.0);
    auto model = calibration_model();
    model.nu1.setZero();
    const auto sol = solve_ou_1d(model, prefs);
    CHECK(sol.Theta == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sol.v1 == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(sol.v0 == doctest::Approx(0.0).epsilon(1e-15));
    const double merton = prefs.p * model.r0 - 0.5 * prefs.q * model.nu0.squaredNorm();
    CHECK(sol.lambda == doctest::Approx(merton).epsilon(1e-15));
}

TEST_CASE("OU closed form: kappa = 1 simplifications") {
    const auto prefs = make_preferences(-1.0);
    auto model = calibration_model();
    model.nu1 = -model.rho;  // kappa = 1
    const auto sol = solve_ou_1d(model, prefs);
    const double delta = delta_of(prefs, model.rho_sq());
    CHECK(sol.Theta == doctest::Approx(1.0 / delta).epsilon(1e-13));
    CHECK(sol.v1 == doctest::Approx(model.b * (std::sqrt(delta) - 1.0)).epsilon(1e-13));
    CHECK(sol.v0 ==
          doctest::Approx(prefs.q * delta * model.rho.dot(model.nu0)).epsilon(1e-13));
    // myopic-probability state dynamics: speed b/sqrt(delta), level 0
    const auto dyn = measure_dynamics(model, sol, Measure::MyopicPhat);
    CHECK(dyn.speed == doctest::Approx(model.b / std::sqrt(delta)).epsilon(1e-12));
    CHECK(dyn.level == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("OU closed form: calibration golden values") {
    const auto model = calibration_model();
    {
        const auto sol = solve_ou_1d(model, make_preferences(-1.0));
        CHECK(sol.delta == doctest::Approx(kCalDelta1).epsilon(1e-14));
        CHECK(sol.Theta == doctest::Approx(kCalTheta1).epsilon(1e-14));
        CHECK(sol.v1 == doctest::Approx(kCalV1_1).epsilon(1e-13));
        CHECK(sol.v0 == doctest::Approx(kCalV0_1).epsilon(1e-13));
        CHECK(sol.lambda == doctest::Approx(kCalLambda1).epsilon(1e-13));
        CHECK(sol.hat_kappa == doctest::Approx(kCalHatKappa1).epsilon(1e-13));
        CHECK(sol.hat_mean == doctest::Approx(kCalHatMean1).epsilon(1e-12));
    }
    {
        const auto sol = solve_ou_1d(model, make_preferences(-4.0));
        CHECK(sol.Theta == doctest::Approx(kCalTheta4).epsilon(1e-14));
        CHECK(sol.v1 == doctest::Approx(kCalV1_4).epsilon(1e-13));
        CHECK(sol.v0 == doctest::Approx(kCalV0_4).epsilon(1e-13));
        CHECK(sol.lambda == doctest::Approx(kCalLambda4).epsilon(1e-13));
    }
}

TEST_CASE("CIR closed form: degenerate branches collapse as expected") {
    const auto prefs = make_preferences(-2.0);
    {
        auto model = sample_cir_model();
        model.nu0.setZero();  // Lambda = c^2, v0 = 0
        const auto sol = solve_cir(model, prefs);
        CHECK(sol.Lambda == doctest::Approx(sol.c * sol.c).epsilon(1e-14));
        CHECK(sol.v0 == doctest::Approx(0.0).epsilon(1e-15));
    }
    {
        auto model = sample_cir_model();
        model.nu1.setZero();
        model.r1 = 0.0;  // Theta = b^2, v1 = 0
        const auto sol = solve_cir(model, prefs);
        CHECK(sol.Theta == doctest::Approx(model.b * model.b).epsilon(1e-14));
        CHECK(sol.v1 == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("CIR closed form: sample instance goldens and signs") {
    const auto prefs = make_preferences(-2.0);
    const auto model = sample_cir_model();
    const auto sol = solve_cir(model, prefs);
    CHECK(sol.c == doctest::Approx(0.03).epsilon(1e-15));
    CHECK(sol.Theta == doctest::Approx(kCirTheta).epsilon(1e-14));
    CHECK(sol.Lambda == doctest::Approx(kCirLambdaDisc).epsilon(1e-14));
    CHECK(sol.v0 == doctest::Approx(kCirV0).epsilon(1e-13));
    CHECK(sol.v1 == doctest::Approx(kCirV1).epsilon(1e-13));
    CHECK(sol.lambda == doctest::Approx(kCirGrowth).epsilon(1e-13));
    CHECK(sol.v0 >= 0.0);
    CHECK(sol.v1 <= 0.0);
    CHECK(sol.Theta > std::pow(model.b + prefs.q * model.a * model.rho.dot(model.nu1), 2));
    CHECK(sol.Lambda > std::pow(sol.c - prefs.q * model.a * model.rho.dot(model.nu0), 2));

    for (double y : {0.05, 0.1, 1.0, 5.0})
        CHECK(std::abs(cir_pde_residual(model, prefs, sol, y)) < 1e-10);
}

TEST_CASE("branch consistency: ergodic-equation residual on a grid") {
    const auto prefs1 = make_preferences(-1.0);
    const auto ou = calibration_model();
    const auto ou_sol = solve_ou_1d(ou, prefs1);
    for (int i = 0; i < 100; ++i) {
        const double y = -10.0 + 20.0 * i / 99.0;
        CHECK(std::abs(ou_pde_residual(ou, prefs1, ou_sol, y)) < 1e-9);
    }
    const auto prefs2 = make_preferences(-2.0);
    const auto cir = sample_cir_model();
    const auto cir_sol = solve_cir(cir, prefs2);
    for (int i = 0; i < 100; ++i) {
        const double y = 0.01 + 5.0 * i / 99.0;
        CHECK(std::abs(cir_pde_residual(cir, prefs2, cir_sol, y)) < 1e-9);
    }
}

TEST_CASE("measure dynamics: myopic-probability speed identity, random draws") {
    std::mt19937 gen(42);
    std::uniform_real_distribution<double> punif(-8.0, -0.05);
    int tested = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const auto model = longrun_test::random_ou_model(gen);
        const auto prefs = make_preferences(punif(gen));
        OuSolution sol;
        try {
            sol = solve_ou_1d(model, prefs);
        } catch (const Error&) {
            continue;
        }
        const auto dyn = measure_dynamics(model, sol, Measure::MyopicPhat);
        // independent route: speed = b(1 + q rho'nu1) + v1/delta
        const double alt =
            model.b * (1.0 + prefs.q * model.rho.dot(model.nu1)) + sol.v1 / sol.delta;
        CHECK(std::abs(dyn.speed - model.b * std::sqrt(sol.Theta)) <= 1e-12 * (1.0 + dyn.speed));
        CHECK(std::abs(dyn.speed - alt) <= 1e-11 * (1.0 + std::abs(dyn.speed)));
        // discriminant dominates its square part for p < 0; v1 > 0 unless nu1 = 0
        const double s = 1.0 + prefs.q * model.rho.dot(model.nu1);
        CHECK(sol.Theta >= s * s - 1e-15);
        if (model.nu1.cwiseAbs().maxCoeff() > 1e-12) CHECK(sol.v1 > 0.0);
        ++tested;
    }
    CHECK(tested > 900);
}

TEST_CASE("positive-exponent preferences are flagged, CIR rejects them") {
    const auto prefs = make_preferences(0.5);
    auto model = calibration_model();
    model.nu1 = 0.1 * model.nu1;  // keep Theta positive for q < 0
    const auto sol = solve_ou_1d(model, prefs);
    CHECK(sol.tightness_unverified);
    CHECK_FALSE(solve_ou_1d(model, make_preferences(-1.0)).tightness_unverified);
    CHECK_THROWS_AS(solve_cir(sample_cir_model(), prefs), AssumptionViolation);
}

TEST_CASE("measure dynamics: complete-market pricing is preference-free") {
    auto model = calibration_model();
    model.rho = VectorXd::Constant(1, -1.0);  // rho'rho = 1
    model.nu1 = -0.8944 * model.rho;
    const auto s1 = solve_ou_1d(model, make_preferences(-1.0));
    const auto s2 = solve_ou_1d(model, make_preferences(-4.0));
    const auto d1 = measure_dynamics(model, s1, Measure::QOptimal);
    const auto d2 = measure_dynamics(model, s2, Measure::QOptimal);
    // drift reduces to -bY - rho'sigma^-1 mu(Y) for both preference levels
    CHECK(d1.speed == doctest::Approx(model.b * (1.0 + model.rho.dot(model.nu1))).epsilon(1e-12));
    CHECK(d1.speed == doctest::Approx(d2.speed).epsilon(1e-12));
    CHECK(d1.level == doctest::Approx(d2.level).epsilon(1e-10));
    const double expected_level = -model.rho.dot(model.nu0) / d1.speed;
    CHECK(d1.level == doctest::Approx(expected_level).epsilon(1e-12));
}

TEST_CASE("measure dynamics: CIR myopic probability") {
    const auto prefs = make_preferences(-2.0);
    const auto model = sample_cir_model();
    const auto sol = solve_cir(model, prefs);
    const auto dyn = measure_dynamics(model, sol, Measure::MyopicPhat);
    CHECK(dyn.speed == doctest::Approx(std::sqrt(sol.Theta)).epsilon(1e-14));
    CHECK(dyn.level ==
          doctest::Approx((std::sqrt(sol.Lambda) + 0.5 * model.a * model.a) /
                          std::sqrt(sol.Theta))
              .epsilon(1e-14));
}

TEST_CASE("utility growth rate shrinks with risk aversion") {
    const auto model = calibration_model();
    double prev = std::numeric_limits<double>::infinity();
    for (double p : {-0.5, -1.0, -2.0, -4.0, -8.0}) {
        const auto sol = solve_ou_1d(model, make_preferences(p));
        CHECK(sol.lambda < prev);
        prev = sol.lambda;
    }
}

TEST_CASE("CIR branch listing returns all four sign combinations") {
    const auto prefs = make_preferences(-2.0);
    const auto model = sample_cir_model();
    const auto branches = cir_branch_listing(model, prefs);
    const auto sol = solve_cir(model, prefs);
    int matches = 0;
    for (const auto& br : branches) {
        if (std::abs(br.v0 - sol.v0) < 1e-14 && std::abs(br.v1 - sol.v1) < 1e-14) ++matches;
    }
    CHECK(matches == 1);  // the tight-making branch appears exactly once
}
