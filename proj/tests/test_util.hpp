#pragma once

#include <random>

#include "longrun/model.hpp"

namespace longrun_test {

// Monthly equity / dividend-yield calibration used across the suite.
inline longrun::KimOmbergModel calibration_model() {
    longrun::KimOmbergModel m;
    m.sigma = longrun::MatrixXd::Constant(1, 1, 0.0436);
    m.nu0 = longrun::VectorXd::Constant(1, 0.0788);
    m.rho = longrun::VectorXd::Constant(1, -0.935);
    m.nu1 = -0.8944 * m.rho;
    m.b = 0.0226;
    m.r0 = 0.0014;
    return m;
}

inline longrun::CirModel sample_cir_model() {
    longrun::CirModel m;
    m.sigma = longrun::MatrixXd::Constant(1, 1, 1.0);
    m.nu0 = longrun::VectorXd::Constant(1, 0.1);
    m.nu1 = longrun::VectorXd::Constant(1, 0.3);
    m.b = 0.5;
    m.theta = 0.1;
    m.a = 0.2;
    m.rho = longrun::VectorXd::Constant(1, -0.5);
    m.r0 = 0.01;
    m.r1 = 0.02;
    return m;
}

// kappa = 1 model with q rho'rho targeted via rho for the given preferences.
inline longrun::KimOmbergModel kappa1_model(double q_rho_sq, double q, double b = 0.05,
                                            double nu0 = 0.02) {
    longrun::KimOmbergModel m;
    const double rr = q_rho_sq / q;
    m.sigma = longrun::MatrixXd::Constant(1, 1, 0.05);
    m.rho = longrun::VectorXd::Constant(1, -std::sqrt(rr));
    m.nu1 = -m.rho;  // kappa = 1
    m.nu0 = longrun::VectorXd::Constant(1, nu0);
    m.b = b;
    m.r0 = 0.001;
    return m;
}

// Random one-state model with p < 0 for property tests.
inline longrun::KimOmbergModel random_ou_model(std::mt19937& gen) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    longrun::KimOmbergModel m;
    m.sigma = longrun::MatrixXd::Constant(1, 1, 0.02 + 0.1 * unif(gen));
    m.rho = longrun::VectorXd::Constant(1, -0.95 + 1.9 * unif(gen));
    m.nu0 = longrun::VectorXd::Constant(1, -0.2 + 0.4 * unif(gen));
    m.nu1 = longrun::VectorXd::Constant(1, -0.5 + 1.0 * unif(gen));
    m.b = 0.01 + 0.3 * unif(gen);
    m.r0 = 0.002 * unif(gen);
    return m;
}

}  // namespace longrun_test
