#pragma once

// Closed-form long-run solutions for the two one-state families.
//
// Kim-Omberg OU:   v(y) = v0 y - v1 y^2 / 2 with
//   Theta = (1 + q rho'nu1)^2 + q nu1'nu1 / delta
//   v1    = delta b (sqrt(Theta) - (1 + q rho'nu1))
//   v0    = q delta rho'nu0 - (q nu1'nu0 + q delta rho'nu0 (1+q rho'nu1)) / sqrt(Theta)
//   lambda = p r0 - q nu0'nu0/2 + v0^2/(2 delta) - q v0 rho'nu0 - v1/2
//
// CIR:             v(y) = v0 log y + v1 y with
//   c = b theta - a^2/2
//   Theta  = (b + q a rho'nu1)^2 + (a^2/delta)(q nu1'nu1 - 2 p r1)
//   Lambda = (c - q a rho'nu0)^2 + (a^2/delta) q nu0'nu0
//   v1 = (delta/a^2)(b + q a rho'nu1 - sqrt(Theta))      [-sqrt branch]
//   v0 = (delta/a^2)(sqrt(Lambda) - (c - q a rho'nu0))   [+sqrt branch]
// The -sqrt(Theta)/+sqrt(Lambda) choice is the tight-making one: it is the
// only branch whose state dynamics under the myopic probability mean-revert
// inside (0, inf).

#include <array>
#include <cmath>

#include "longrun/errors.hpp"
#include "longrun/model.hpp"

namespace longrun {

struct OuSolution {
    double Theta = 0.0;
    double v1 = 0.0;
    double v0 = 0.0;
    double lambda = 0.0;
    double delta = 0.0;
    double hat_kappa = 0.0;  // mean-reversion speed under the myopic probability
    double hat_mean = 0.0;   // long-run mean under the myopic probability
    bool tightness_unverified = false;  // set for 0 < p < 1

    double value(double y) const { return v0 * y - 0.5 * v1 * y * y; }
    double grad(double y) const { return v0 - v1 * y; }
};

struct CirSolution {
    double Theta = 0.0;
    double Lambda = 0.0;
    double c = 0.0;
    double v0 = 0.0;
    double v1 = 0.0;
    double lambda = 0.0;
    double delta = 0.0;

    double value(double y) const { return v0 * std::log(y) + v1 * y; }
    double grad(double y) const { return v0 / y + v1; }
};

namespace closed_form_detail {

// sqrt(s^2 + t) - s without cancellation for s > 0, t >= 0.
inline double sqrt_shift(double s, double t, double sqrt_total) {
    if (s > 0.0) return t / (sqrt_total + s);
    return sqrt_total - s;
}

}  // namespace closed_form_detail

inline OuSolution solve_ou_1d(const KimOmbergModel& model, const Preferences& prefs) {
    model.validate();
    OuSolution sol;
    const double q = prefs.q;
    sol.delta = delta_of(prefs, model.rho_sq());
    const double rn1 = model.rho.dot(model.nu1);
    const double rn0 = model.rho.dot(model.nu0);
    const double s = 1.0 + q * rn1;
    const double t = q * model.nu1.squaredNorm() / sol.delta;
    sol.Theta = s * s + t;
    if (sol.Theta < 0.0)
        throw NegativeDiscriminant("solve_ou_1d: Theta < 0");
    const double sqT = std::sqrt(sol.Theta);
    sol.v1 = sol.delta * model.b * closed_form_detail::sqrt_shift(s, t, sqT);
    if (sqT == 0.0) throw NegativeDiscriminant("solve_ou_1d: Theta == 0, v0 undefined");
    sol.v0 = q * sol.delta * rn0 - (q * model.nu1.dot(model.nu0) + q * sol.delta * rn0 * s) / sqT;
    sol.lambda = prefs.p * model.r0 - 0.5 * q * model.nu0.squaredNorm() +
                 0.5 * sol.v0 * sol.v0 / sol.delta - q * sol.v0 * rn0 - 0.5 * sol.v1;
    sol.hat_kappa = model.b * sqT;
    sol.hat_mean = (-q * rn0 + sol.v0 / sol.delta) / sol.hat_kappa;
    sol.tightness_unverified = prefs.p > 0.0;
    return sol;
}

inline CirSolution solve_cir(const CirModel& model, const Preferences& prefs) {
    model.validate();
    if (prefs.p >= 0.0)
        throw AssumptionViolation("solve_cir: closed form stated for p < 0 only");
    CirSolution sol;
    const double q = prefs.q;
    const double a2 = model.a * model.a;
    sol.delta = delta_of(prefs, model.rho_sq());
    sol.c = model.b * model.theta - 0.5 * a2;
    const double rn1 = model.rho.dot(model.nu1);
    const double rn0 = model.rho.dot(model.nu0);
    const double s1 = model.b + q * model.a * rn1;
    const double t1 = (a2 / sol.delta) * (q * model.nu1.squaredNorm() - 2.0 * prefs.p * model.r1);
    sol.Theta = s1 * s1 + t1;
    const double s0 = sol.c - q * model.a * rn0;
    const double t0 = (a2 / sol.delta) * q * model.nu0.squaredNorm();
    sol.Lambda = s0 * s0 + t0;
    const double sqT = std::sqrt(sol.Theta);
    const double sqL = std::sqrt(sol.Lambda);
    sol.v1 = -(sol.delta / a2) * closed_form_detail::sqrt_shift(s1, t1, sqT);
    sol.v0 = (sol.delta / a2) * closed_form_detail::sqrt_shift(s0, t0, sqL);
    sol.lambda = prefs.p * model.r0 - q * model.nu0.dot(model.nu1) +
                 (a2 / sol.delta) * sol.v0 * sol.v1 - sol.v0 * s1 +
                 sol.v1 * (model.b * model.theta - q * model.a * rn0);
    return sol;
}

// The other sign branches of the CIR candidate equations; diagnostic listing
// only, never returned as the optimizer.
struct CirBranch {
    double v0 = 0.0;
    double v1 = 0.0;
    double lambda = 0.0;
    int theta_sign = 0;
    int lambda_sign = 0;
};

inline std::array<CirBranch, 4> cir_branch_listing(const CirModel& model,
                                                   const Preferences& prefs) {
    const CirSolution base = solve_cir(model, prefs);
    const double q = prefs.q;
    const double a2 = model.a * model.a;
    const double rn1 = model.rho.dot(model.nu1);
    const double rn0 = model.rho.dot(model.nu0);
    const double s1 = model.b + q * model.a * rn1;
    const double s0 = base.c - q * model.a * rn0;
    std::array<CirBranch, 4> out;
    int idx = 0;
    for (int st : {+1, -1}) {
        for (int sl : {+1, -1}) {
            CirBranch br;
            br.theta_sign = st;
            br.lambda_sign = sl;
            br.v1 = (base.delta / a2) * (s1 + st * std::sqrt(base.Theta));
            br.v0 = (base.delta / a2) * (-s0 + sl * std::sqrt(base.Lambda));
            br.lambda = prefs.p * model.r0 - q * model.nu0.dot(model.nu1) +
                        (a2 / base.delta) * br.v0 * br.v1 - br.v0 * s1 +
                        br.v1 * (model.b * model.theta - q * model.a * rn0);
            out[idx++] = br;
        }
    }
    return out;
}

enum class Measure { PhysicalP, MyopicPhat, QOptimal };

// Affine state drift speed * (level - y); the diffusion coefficient stays the
// model's own (dW for OU, a sqrt(y) dW for CIR).
struct AffineDrift {
    double speed = 0.0;
    double level = 0.0;
};

inline AffineDrift measure_dynamics(const KimOmbergModel& model, const OuSolution& sol,
                                    Measure which) {
    AffineDrift out;
    const double rn0 = model.rho.dot(model.nu0);
    const double rn1 = model.rho.dot(model.nu1);
    switch (which) {
        case Measure::PhysicalP:
            out.speed = model.b;
            out.level = 0.0;
            break;
        case Measure::MyopicPhat:
            out.speed = sol.hat_kappa;
            out.level = sol.hat_mean;
            break;
        case Measure::QOptimal: {
            const double one_m_rr = 1.0 - model.rho_sq();
            out.speed = model.b * (1.0 + rn1) + one_m_rr * sol.v1;
            out.level = (-rn0 + one_m_rr * sol.v0) / out.speed;
            break;
        }
    }
    return out;
}

inline AffineDrift measure_dynamics(const CirModel& model, const CirSolution& sol,
                                    Measure which) {
    AffineDrift out;
    const double a2 = model.a * model.a;
    const double rn0 = model.rho.dot(model.nu0);
    const double rn1 = model.rho.dot(model.nu1);
    switch (which) {
        case Measure::PhysicalP:
            out.speed = model.b;
            out.level = model.theta;
            break;
        case Measure::MyopicPhat:
            out.speed = std::sqrt(sol.Theta);
            out.level = (std::sqrt(sol.Lambda) + 0.5 * a2) / out.speed;
            break;
        case Measure::QOptimal: {
            const double one_m_rr = 1.0 - model.rho_sq();
            out.speed = model.b + model.a * rn1 - a2 * one_m_rr * sol.v1;
            out.level = (model.b * model.theta - model.a * rn0 + a2 * one_m_rr * sol.v0) / out.speed;
            break;
        }
    }
    return out;
}

// pi(y) = Sigma^-1 (mu(y) + (v0 - v1 y) sigma rho) / (1-p),  eta(y) = v0 - v1 y.
inline Policy longrun_policy(const KimOmbergModel& model, const OuSolution& sol,
                             const Preferences& prefs) {
    Policy pol;
    pol.kind = PolicyKind::LongRun;
    pol.name = "long_run";
    Eigen::LDLT<MatrixXd> S(model.Sigma());
    const VectorXd srho = model.sigma * model.rho;
    pol.pi_const = S.solve(model.sigma * model.nu0 + sol.v0 * srho) / (1.0 - prefs.p);
    pol.pi_lin = S.solve(model.b * (model.sigma * model.nu1) - sol.v1 * srho) / (1.0 - prefs.p);
    pol.pi_inv = VectorXd::Zero(model.n());
    pol.eta_const = VectorXd::Constant(1, sol.v0);
    pol.eta_lin = MatrixXd::Constant(1, 1, -sol.v1);
    pol.eta_inv = VectorXd::Zero(1);
    return pol;
}

// pi(y) = Sigma(y)^-1 (mu(y) + sigma rho a (v0 + v1 y)) / (1-p),
// eta(y) = v0/y + v1.
inline Policy longrun_policy(const CirModel& model, const CirSolution& sol,
                             const Preferences& prefs) {
    Policy pol;
    pol.kind = PolicyKind::LongRun;
    pol.name = "long_run";
    Eigen::LDLT<MatrixXd> S(model.sigma * model.sigma.transpose());
    const VectorXd srho = model.sigma * model.rho;
    pol.pi_const = S.solve(model.sigma * model.nu1 + model.a * sol.v1 * srho) / (1.0 - prefs.p);
    pol.pi_lin = MatrixXd::Zero(model.n(), 1);
    pol.pi_inv = S.solve(model.sigma * model.nu0 + model.a * sol.v0 * srho) / (1.0 - prefs.p);
    pol.eta_const = VectorXd::Constant(1, sol.v1);
    pol.eta_lin = MatrixXd::Zero(1, 1);
    pol.eta_inv = VectorXd::Constant(1, sol.v0);
    return pol;
}

// Ergodic-equation residual at y for the two one-state families; used by the
// branch-consistency checks.
inline double ou_pde_residual(const KimOmbergModel& model, const Preferences& prefs,
                              const OuSolution& sol, double y) {
    const double q = prefs.q;
    const double dv = sol.grad(y);
    const double d2v = -sol.v1;
    const double ahat = 1.0 - q * model.rho_sq();
    const VectorXd m = model.nu0 + model.b * y * model.nu1;  // mu'S^-1 mu = |m|^2
    const double V = prefs.p * model.r0 - 0.5 * q * m.squaredNorm();
    const double btilde = -model.b * y - q * model.rho.dot(m);
    return V + 0.5 * ahat * dv * dv + btilde * dv + 0.5 * d2v - sol.lambda;
}

inline double cir_pde_residual(const CirModel& model, const Preferences& prefs,
                               const CirSolution& sol, double y) {
    if (y <= 0.0) throw DomainError("cir_pde_residual: y must be positive");
    const double q = prefs.q;
    const double dv = sol.grad(y);
    const double d2v = -sol.v0 / (y * y);
    const double A = model.a * model.a * y;
    const double ahat = A * (1.0 - q * model.rho_sq());
    const VectorXd m = model.nu0 + y * model.nu1;  // mu'S(y)^-1 mu = |m|^2 / y
    const double V = prefs.p * model.rate(y) - 0.5 * q * m.squaredNorm() / y;
    const double btilde = model.b * (model.theta - y) - q * model.a * model.rho.dot(m);
    return V + 0.5 * ahat * dv * dv + btilde * dv + 0.5 * A * d2v - sol.lambda;
}

}  // namespace longrun
