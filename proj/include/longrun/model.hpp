#pragma once

// Market models, preferences and policies.
//
// Three parametric families are supported, all with per-month units:
//   LinearDiffusionModel  multivariate OU state, affine drifts/rates, constant covariances
//   KimOmbergModel        single OU state driving risk premia (a = 1, r1 = 0)
//   CirModel              square-root state driving rates, drifts and volatilities
//
// Every type is an immutable value object after construction; all operations
// are pure functions and safe to call concurrently.

#include <cmath>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "longrun/errors.hpp"

namespace longrun {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Risk aversion gamma = 1 - p, conjugate exponent q = p/(p-1).
struct Preferences {
    double p = 0.0;
    double q = 0.0;
    double gamma = 0.0;
};

inline Preferences make_preferences(double p) {
    if (!(p < 1.0) || p == 0.0 || !std::isfinite(p))
        throw DomainError("preferences: require p < 1 and p != 0, got p=" + std::to_string(p));
    Preferences prefs;
    prefs.p = p;
    prefs.q = p / (p - 1.0);
    prefs.gamma = 1.0 - p;
    return prefs;
}

// delta = 1/(1 - q rho'rho), the change-of-variable exponent of the linearized ODE.
inline double delta_of(const Preferences& prefs, double rho_sq) {
    if (rho_sq < 0.0 || rho_sq > 1.0) throw DomainError("delta_of: rho'rho must lie in [0,1]");
    const double d = 1.0 - prefs.q * rho_sq;
    if (std::abs(d) < 1e-14) throw SingularDelta("delta_of: q * rho'rho == 1");
    return 1.0 / d;
}

namespace detail {

inline bool is_positive_definite(const MatrixXd& m, double sym_tol = 1e-10) {
    if (m.rows() != m.cols() || m.rows() == 0) return false;
    const MatrixXd s = 0.5 * (m + m.transpose());
    if ((m - m.transpose()).lpNorm<Eigen::Infinity>() > sym_tol * (1.0 + m.norm())) return false;
    Eigen::LLT<MatrixXd> llt(s);
    return llt.info() == Eigen::Success;
}

// Largest eigenvalue of rho rho' (must be <= 1 for a valid correlation block).
inline double rho_spectral_bound(const MatrixXd& rho) {
    const MatrixXd g = rho * rho.transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(g);
    return es.eigenvalues().maxCoeff();
}

inline MatrixXd spd_sqrt(const MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()));
    if (es.eigenvalues().minCoeff() < -1e-12 * (1.0 + m.norm()))
        throw DomainError("spd_sqrt: matrix is not positive semidefinite");
    VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

// dR = (mu0 + mu1 Y) dt + sigma dZ,  dY = -b Y dt + a dW,  d<Z,W'> = rho dt,
// r(Y) = r0 + r1'Y.  Sigma = sigma sigma', mu1'mu1, b + b' and a positive definite.
struct LinearDiffusionModel {
    VectorXd mu0;    // n
    MatrixXd mu1;    // n x k
    MatrixXd sigma;  // n x n
    MatrixXd b;      // k x k
    MatrixXd a;      // k x k
    MatrixXd rho;    // n x k
    double r0 = 0.0;
    VectorXd r1;  // k

    Eigen::Index n() const { return sigma.rows(); }
    Eigen::Index k() const { return b.rows(); }

    MatrixXd Sigma() const { return sigma * sigma.transpose(); }
    MatrixXd A() const { return a * a.transpose(); }
    MatrixXd Upsilon() const { return sigma * rho * a.transpose(); }

    VectorXd mu(const VectorXd& y) const { return mu0 + mu1 * y; }
    double rate(const VectorXd& y) const { return r0 + r1.dot(y); }

    void validate() const {
        const auto nn = n();
        const auto kk = k();
        if (mu0.size() != nn || mu1.rows() != nn || mu1.cols() != kk || a.rows() != kk ||
            a.cols() != kk || rho.rows() != nn || rho.cols() != kk || r1.size() != kk)
            throw AssumptionViolation("linear model: inconsistent dimensions");
        if (!detail::is_positive_definite(Sigma()))
            throw AssumptionViolation("linear model: Sigma = sigma sigma' not positive definite");
        if (!detail::is_positive_definite(mu1.transpose() * mu1))
            throw AssumptionViolation("linear model: mu1'mu1 not positive definite");
        if (!detail::is_positive_definite(b + b.transpose()))
            throw AssumptionViolation("linear model: b + b' not positive definite");
        if (!detail::is_positive_definite(a))
            throw AssumptionViolation("linear model: a not positive definite");
        if (detail::rho_spectral_bound(rho) > 1.0 + 1e-10)
            throw AssumptionViolation("linear model: spectral norm of rho rho' exceeds 1");
    }
};

// dR = (sigma nu0 + b sigma nu1 Y) dt + sigma dZ,  dY = -b Y dt + dW,  r = r0.
struct KimOmbergModel {
    MatrixXd sigma;  // n x n
    VectorXd nu0;    // n
    VectorXd nu1;    // n
    double b = 0.0;
    VectorXd rho;  // n
    double r0 = 0.0;

    Eigen::Index n() const { return sigma.rows(); }
    double rho_sq() const { return rho.squaredNorm(); }

    MatrixXd Sigma() const { return sigma * sigma.transpose(); }
    VectorXd mu(double y) const { return sigma * (nu0 + b * y * nu1); }

    void validate() const {
        const auto nn = n();
        if (nu0.size() != nn || nu1.size() != nn || rho.size() != nn)
            throw AssumptionViolation("kim_omberg model: inconsistent dimensions");
        if (b <= 0.0) throw AssumptionViolation("kim_omberg model: require b > 0");
        if (rho_sq() > 1.0 + 1e-10)
            throw AssumptionViolation("kim_omberg model: rho'rho exceeds 1");
        Eigen::FullPivLU<MatrixXd> lu(sigma);
        if (!lu.isInvertible()) throw AssumptionViolation("kim_omberg model: sigma singular");
    }

    LinearDiffusionModel to_linear() const {
        LinearDiffusionModel m;
        m.mu0 = sigma * nu0;
        m.mu1 = b * (sigma * nu1);
        m.sigma = sigma;
        m.b = MatrixXd::Constant(1, 1, b);
        m.a = MatrixXd::Identity(1, 1);
        m.rho = rho;
        m.r0 = r0;
        m.r1 = VectorXd::Zero(1);
        return m;
    }
};

// dR = (sigma nu0 + sigma nu1 Y) dt + sqrt(Y) sigma dZ,
// dY = b (theta - Y) dt + a sqrt(Y) dW,  r(Y) = r0 + r1 Y,  state space (0, inf).
struct CirModel {
    MatrixXd sigma;  // n x n
    VectorXd nu0;    // n
    VectorXd nu1;    // n
    double b = 0.0;
    double theta = 0.0;
    double a = 0.0;
    VectorXd rho;  // n
    double r0 = 0.0;
    double r1 = 0.0;

    Eigen::Index n() const { return sigma.rows(); }
    double rho_sq() const { return rho.squaredNorm(); }

    MatrixXd Sigma(double y) const { return y * (sigma * sigma.transpose()); }
    VectorXd mu(double y) const { return sigma * (nu0 + y * nu1); }
    double rate(double y) const { return r0 + r1 * y; }

    void validate() const {
        const auto nn = n();
        if (nu0.size() != nn || nu1.size() != nn || rho.size() != nn)
            throw AssumptionViolation("cir model: inconsistent dimensions");
        if (b < 0.0 || theta < 0.0 || a < 0.0 || r1 < 0.0)
            throw AssumptionViolation("cir model: require b, theta, a, r1 >= 0");
        if (!(b * theta > 0.5 * a * a))
            throw AssumptionViolation("cir model: Feller condition b*theta > a^2/2 fails");
        if (rho_sq() > 1.0 + 1e-10)
            throw AssumptionViolation("cir model: rho'rho exceeds 1");
        Eigen::FullPivLU<MatrixXd> lu(sigma);
        if (!lu.isInvertible()) throw AssumptionViolation("cir model: sigma singular");
    }
};

using MarketModel = std::variant<LinearDiffusionModel, KimOmbergModel, CirModel>;

inline void validate(const MarketModel& model) {
    std::visit([](const auto& m) { m.validate(); }, model);
}

enum class PolicyKind { LongRun, Myopic, AffineCustom };

// Portfolio/risk-premia pair, affine in the state.  The 1/y coefficients are
// used by the CIR family only.
struct Policy {
    PolicyKind kind = PolicyKind::AffineCustom;
    VectorXd pi_const;  // n
    MatrixXd pi_lin;    // n x k
    VectorXd pi_inv;    // n (CIR only)
    VectorXd eta_const; // k
    MatrixXd eta_lin;   // k x k
    VectorXd eta_inv;   // k (CIR only)
    std::string name = "custom";

    bool has_inverse_part() const {
        return (pi_inv.size() > 0 && pi_inv.cwiseAbs().maxCoeff() > 0.0) ||
               (eta_inv.size() > 0 && eta_inv.cwiseAbs().maxCoeff() > 0.0);
    }
};

struct PolicyValue {
    VectorXd pi;   // n
    VectorXd eta;  // k
};

inline PolicyValue evaluate_policy(const Policy& policy, const VectorXd& y) {
    PolicyValue out;
    out.pi = policy.pi_const;
    out.eta = policy.eta_const;
    if (policy.pi_lin.size() > 0) out.pi += policy.pi_lin * y;
    if (policy.eta_lin.size() > 0) out.eta += policy.eta_lin * y;
    if (policy.has_inverse_part()) {
        if (y.size() != 1 || y(0) <= 0.0)
            throw DomainError("evaluate_policy: 1/y terms require a scalar state y > 0");
        if (policy.pi_inv.size() > 0) out.pi += policy.pi_inv / y(0);
        if (policy.eta_inv.size() > 0) out.eta += policy.eta_inv / y(0);
    }
    if (!out.pi.allFinite() || !out.eta.allFinite())
        throw DomainError("evaluate_policy: non-finite policy value");
    return out;
}

inline PolicyValue evaluate_policy(const Policy& policy, double y) {
    return evaluate_policy(policy, VectorXd::Constant(1, y));
}

// pi(y) = Sigma(y)^{-1} mu(y) / (1-p), eta = 0.
inline Policy myopic_policy(const LinearDiffusionModel& model, const Preferences& prefs) {
    Policy pol;
    pol.kind = PolicyKind::Myopic;
    pol.name = "myopic";
    const MatrixXd Sigma = model.Sigma();
    Eigen::LDLT<MatrixXd> solver(Sigma);
    pol.pi_const = solver.solve(model.mu0) / (1.0 - prefs.p);
    pol.pi_lin = solver.solve(model.mu1) / (1.0 - prefs.p);
    pol.pi_inv = VectorXd::Zero(model.n());
    pol.eta_const = VectorXd::Zero(model.k());
    pol.eta_lin = MatrixXd::Zero(model.k(), model.k());
    pol.eta_inv = VectorXd::Zero(model.k());
    return pol;
}

inline Policy myopic_policy(const KimOmbergModel& model, const Preferences& prefs) {
    return myopic_policy(model.to_linear(), prefs);
}

inline Policy myopic_policy(const CirModel& model, const Preferences& prefs) {
    // Sigma(y)^{-1} mu(y) = Sigma1^{-1} sigma (nu1 + nu0 / y) with Sigma1 = sigma sigma'.
    Policy pol;
    pol.kind = PolicyKind::Myopic;
    pol.name = "myopic";
    const MatrixXd Sigma1 = model.sigma * model.sigma.transpose();
    Eigen::LDLT<MatrixXd> solver(Sigma1);
    pol.pi_const = solver.solve(model.sigma * model.nu1) / (1.0 - prefs.p);
    pol.pi_lin = MatrixXd::Zero(model.n(), 1);
    pol.pi_inv = solver.solve(model.sigma * model.nu0) / (1.0 - prefs.p);
    pol.eta_const = VectorXd::Zero(1);
    pol.eta_lin = MatrixXd::Zero(1, 1);
    pol.eta_inv = VectorXd::Zero(1);
    return pol;
}

inline Policy myopic_policy(const MarketModel& model, const Preferences& prefs) {
    return std::visit([&](const auto& m) { return myopic_policy(m, prefs); }, model);
}

}  // namespace longrun
