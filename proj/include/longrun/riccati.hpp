#pragma once

// Long-run solution of the multivariate linear-diffusion model: the value
// function is v(y) = v0'y - y'v1 y / 2 where the symmetric matrix v1 solves
//
//   v1 (A - q U'S^-1 U) v1 + v1 (b + q U'S^-1 mu1) + (b + q U'S^-1 mu1)' v1
//     - q mu1'S^-1 mu1 = 0,
//
// v0 solves the linear system obtained from the gradient terms, and the
// utility growth rate lambda follows from the constant terms.  Among the
// roots of the quadratic equation, the one that matters is the stabilizing
// one: the closed-loop matrix D = (b + q U'S^-1 mu1) + (A - q U'S^-1 U) v1
// (the mean-reversion matrix of the state under the myopic probability) must
// have spectrum in the open right half-plane.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "longrun/errors.hpp"
#include "longrun/model.hpp"

namespace longrun {

struct ValueSolution {
    VectorXd v0;
    MatrixXd v1;
    double lambda = 0.0;
    double residual_v1 = 0.0;
    double residual_v0 = 0.0;
    std::vector<std::complex<double>> stabilizing_spectrum;
    double v0_condition_number = 0.0;  // conditioning diagnostic of the v0 system
};

namespace riccati_detail {

// Coefficients of the algebraic equation in the notation above.
struct Coefficients {
    MatrixXd Ahat;  // A - q U'S^-1 U   (k x k, SPD)
    MatrixXd B;     // b + q U'S^-1 mu1 (k x k)
    MatrixXd C;     // q mu1'S^-1 mu1   (k x k, SPD for p < 0)
};

inline Coefficients make_coefficients(const LinearDiffusionModel& model,
                                      const Preferences& prefs) {
    Coefficients co;
    const MatrixXd Sigma = model.Sigma();
    const MatrixXd U = model.Upsilon();
    Eigen::LDLT<MatrixXd> S(Sigma);
    const MatrixXd SinvU = S.solve(U);
    const MatrixXd Sinvmu1 = S.solve(model.mu1);
    co.Ahat = model.A() - prefs.q * U.transpose() * SinvU;
    co.B = model.b + prefs.q * U.transpose() * Sinvmu1;
    co.C = prefs.q * model.mu1.transpose() * Sinvmu1;
    co.Ahat = 0.5 * (co.Ahat + co.Ahat.transpose());
    co.C = 0.5 * (co.C + co.C.transpose());
    return co;
}

inline MatrixXd riccati_residual_matrix(const Coefficients& co, const MatrixXd& x) {
    return x * co.Ahat * x + x * co.B + co.B.transpose() * x - co.C;
}

// Solve D'X + X D = S by the Kronecker-product linearization; fine for the
// dense small-k problems targeted here.
inline MatrixXd solve_lyapunov(const MatrixXd& d, const MatrixXd& s) {
    const Eigen::Index k = d.rows();
    MatrixXd big = MatrixXd::Zero(k * k, k * k);
    // vec(D'X) = (I kron D') vec(X); vec(X D) = (D' kron I) vec(X)
    for (Eigen::Index i = 0; i < k; ++i)
        big.block(i * k, i * k, k, k) += d.transpose();
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            for (Eigen::Index r = 0; r < k; ++r)
                big(j * k + r, i * k + r) += d(i, j);
    Eigen::VectorXd rhs(k * k);
    for (Eigen::Index j = 0; j < k; ++j) rhs.segment(j * k, k) = s.col(j);
    Eigen::FullPivLU<MatrixXd> lu(big);
    if (!lu.isInvertible()) throw SingularSystem("lyapunov: singular coefficient matrix");
    const Eigen::VectorXd xv = lu.solve(rhs);
    MatrixXd x(k, k);
    for (Eigen::Index j = 0; j < k; ++j) x.col(j) = xv.segment(j * k, k);
    return 0.5 * (x + x.transpose());
}

inline std::vector<std::complex<double>> spectrum(const MatrixXd& m) {
    Eigen::EigenSolver<MatrixXd> es(m);
    std::vector<std::complex<double>> out(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i) out[i] = es.eigenvalues()(i);
    return out;
}

inline double min_real_part(const std::vector<std::complex<double>>& spec) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& z : spec) m = std::min(m, z.real());
    return m;
}

// Newton iteration: given X, the correction solves D'dX + dX D = -R(X) with
// D = B + Ahat X.  Symmetrize every step to suppress drift.
inline bool newton_refine(const Coefficients& co, MatrixXd& x, int max_iter, double tol) {
    for (int it = 0; it < max_iter; ++it) {
        const MatrixXd d = co.B + co.Ahat * x;
        const MatrixXd res = riccati_residual_matrix(co, x);
        MatrixXd dx;
        try {
            dx = solve_lyapunov(d, -res);
        } catch (const SingularSystem&) {
            return false;
        }
        x = 0.5 * ((x + dx) + (x + dx).transpose());
        if (!x.allFinite()) return false;
        if (dx.norm() <= tol * (1.0 + x.norm())) return true;
    }
    return false;
}

// Stable invariant subspace of the Hamiltonian matrix
//   H = [ -B, -Ahat; -C, B' ]
// gives the stabilizing root X = V U^-1 from the eigenvectors with Re < 0.
inline MatrixXd hamiltonian_subspace_root(const Coefficients& co) {
    const Eigen::Index k = co.B.rows();
    MatrixXd h(2 * k, 2 * k);
    h << -co.B, -co.Ahat, -co.C, co.B.transpose();
    Eigen::EigenSolver<MatrixXd> es(h);
    if (es.info() != Eigen::Success)
        throw NoStabilizingSolution("riccati: Hamiltonian eigendecomposition failed");
    Eigen::MatrixXcd basis(2 * k, k);
    Eigen::Index cols = 0;
    for (Eigen::Index i = 0; i < 2 * k && cols < k; ++i) {
        if (es.eigenvalues()(i).real() < 0.0) basis.col(cols++) = es.eigenvectors().col(i);
    }
    if (cols != k)
        throw NoStabilizingSolution("riccati: stable subspace has wrong dimension");
    const Eigen::MatrixXcd u = basis.topRows(k);
    const Eigen::MatrixXcd v = basis.bottomRows(k);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(u);
    if (!lu.isInvertible())
        throw NoStabilizingSolution("riccati: stable subspace not a graph subspace");
    const MatrixXd x = (v * lu.inverse()).real();
    return 0.5 * (x + x.transpose());
}

}  // namespace riccati_detail

// Stabilizing root of the algebraic matrix Riccati equation.  Newton from
// v1 = 0 with exact Lyapunov solves; eigenvector fallback on the Hamiltonian
// when Newton stalls.
inline MatrixXd solve_riccati(const LinearDiffusionModel& model, const Preferences& prefs) {
    if (prefs.p >= 0.0)
        throw AssumptionViolation("solve_riccati: matrix solver requires p < 0");
    // Lighter than the full model validation: mu1 = 0 (constant opportunities)
    // is a legitimate degenerate input here with root v1 = 0.
    if (!detail::is_positive_definite(model.Sigma()))
        throw AssumptionViolation("solve_riccati: Sigma not positive definite");
    if (!detail::is_positive_definite(model.b + model.b.transpose()))
        throw AssumptionViolation("solve_riccati: b + b' not positive definite");
    if (!detail::is_positive_definite(model.a))
        throw AssumptionViolation("solve_riccati: a not positive definite");
    const auto co = riccati_detail::make_coefficients(model, prefs);
    const Eigen::Index k = model.k();

    MatrixXd x = MatrixXd::Zero(k, k);
    bool ok = riccati_detail::newton_refine(co, x, 200, 1e-12);
    if (ok) {
        const auto spec = riccati_detail::spectrum(co.B + co.Ahat * x);
        if (riccati_detail::min_real_part(spec) <= 0.0) ok = false;
    }
    if (!ok) {
        x = riccati_detail::hamiltonian_subspace_root(co);
        if (!riccati_detail::newton_refine(co, x, 50, 1e-13))
            throw NoStabilizingSolution("riccati: Newton polish after subspace extraction failed");
        const auto spec = riccati_detail::spectrum(co.B + co.Ahat * x);
        if (riccati_detail::min_real_part(spec) <= 0.0)
            throw NoStabilizingSolution("riccati: selected root is not stabilizing");
    }

    const double res = riccati_detail::riccati_residual_matrix(co, x).norm();
    if (res > 1e-10 * (1.0 + x.norm()))
        throw NoConvergence("riccati: residual above tolerance");
    return x;
}

// v0 solves  D' v0 = p r1 - q (mu1' - v1 U') S^-1 mu0  with D' = v1 Ahat + B'.
inline VectorXd solve_v0(const MatrixXd& v1, const LinearDiffusionModel& model,
                         const Preferences& prefs, double* condition_number = nullptr) {
    const auto co = riccati_detail::make_coefficients(model, prefs);
    const MatrixXd lhs = v1 * co.Ahat + co.B.transpose();
    const MatrixXd Sigma = model.Sigma();
    Eigen::LDLT<MatrixXd> S(Sigma);
    const VectorXd rhs =
        prefs.p * model.r1 -
        prefs.q * ((model.mu1.transpose() - v1 * model.Upsilon().transpose()) * S.solve(model.mu0));
    Eigen::JacobiSVD<MatrixXd> svd(lhs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cond = svd.singularValues()(0) / svd.singularValues().tail(1)(0);
    if (condition_number) *condition_number = cond;
    if (!(cond < 1e14)) throw SingularSystem("solve_v0: system numerically singular");
    return svd.solve(rhs);
}

inline double growth_rate(const VectorXd& v0, const MatrixXd& v1,
                          const LinearDiffusionModel& model, const Preferences& prefs) {
    const auto co = riccati_detail::make_coefficients(model, prefs);
    const MatrixXd Sigma = model.Sigma();
    Eigen::LDLT<MatrixXd> S(Sigma);
    const VectorXd Sinvmu0 = S.solve(model.mu0);
    return prefs.p * model.r0 - 0.5 * prefs.q * model.mu0.dot(Sinvmu0) +
           0.5 * v0.dot(co.Ahat * v0) -
           prefs.q * v0.dot(model.Upsilon().transpose() * Sinvmu0) -
           0.5 * (model.A() * v1).trace();
}

// Left-minus-right of the ergodic HJB equation at y, for v(y) = v0'y - y'v1 y/2.
inline double pde_residual(const ValueSolution& sol, const LinearDiffusionModel& model,
                           const Preferences& prefs, const VectorXd& y) {
    const MatrixXd Sigma = model.Sigma();
    const MatrixXd U = model.Upsilon();
    Eigen::LDLT<MatrixXd> S(Sigma);
    const VectorXd mu = model.mu(y);
    const VectorXd Sinvmu = S.solve(mu);
    const VectorXd grad = sol.v0 - sol.v1 * y;
    const MatrixXd Ahat = model.A() - prefs.q * U.transpose() * S.solve(U);
    const VectorXd btilde = -(model.b * y) - prefs.q * (U.transpose() * Sinvmu);
    const double lhs = prefs.p * model.rate(y) - 0.5 * prefs.q * mu.dot(Sinvmu) +
                       0.5 * grad.dot(Ahat * grad) + grad.dot(btilde) -
                       0.5 * (model.A() * sol.v1).trace();
    return std::abs(lhs - sol.lambda);
}

// Backward flow of the finite-horizon quadratic ansatz: dX/dtau = -R(X) from
// X(0) = 0.  Converges to the stabilizing algebraic root as tau -> infinity;
// used as an independent oracle for solve_riccati.
inline MatrixXd differential_riccati_oracle(const LinearDiffusionModel& model,
                                            const Preferences& prefs, double T, int steps) {
    if (!(T > 0.0)) throw DomainError("differential_riccati_oracle: T must be positive");
    if (steps < 1000) throw DomainError("differential_riccati_oracle: need steps >= 1000");
    const auto co = riccati_detail::make_coefficients(model, prefs);
    const Eigen::Index k = model.k();
    const double h = T / steps;
    MatrixXd x = MatrixXd::Zero(k, k);
    auto rhs = [&co](const MatrixXd& m) -> MatrixXd {
        return -riccati_detail::riccati_residual_matrix(co, m);
    };
    for (int i = 0; i < steps; ++i) {
        const MatrixXd k1 = rhs(x);
        const MatrixXd k2 = rhs(x + 0.5 * h * k1);
        const MatrixXd k3 = rhs(x + 0.5 * h * k2);
        const MatrixXd k4 = rhs(x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        x = 0.5 * (x + x.transpose());
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e12)
            throw BlowUpError("differential_riccati_oracle: blow-up detected", (i + 1) * h);
    }
    return x;
}

// Full long-run solve: v1, v0, lambda plus residual diagnostics.
inline ValueSolution solve_long_run(const LinearDiffusionModel& model, const Preferences& prefs) {
    ValueSolution sol;
    sol.v1 = solve_riccati(model, prefs);
    sol.v0 = solve_v0(sol.v1, model, prefs, &sol.v0_condition_number);
    sol.lambda = growth_rate(sol.v0, sol.v1, model, prefs);

    const auto co = riccati_detail::make_coefficients(model, prefs);
    sol.residual_v1 = riccati_detail::riccati_residual_matrix(co, sol.v1).norm();
    const MatrixXd d = co.B + co.Ahat * sol.v1;
    sol.stabilizing_spectrum = riccati_detail::spectrum(d);
    const MatrixXd Sigma = model.Sigma();
    Eigen::LDLT<MatrixXd> S(Sigma);
    sol.residual_v0 =
        (d.transpose() * sol.v0 -
         (prefs.p * model.r1 -
          prefs.q * ((model.mu1.transpose() - sol.v1 * model.Upsilon().transpose()) *
                     S.solve(model.mu0))))
            .norm();
    return sol;
}

// State dynamics under the myopic probability: dY = D (E - Y) dt + a dW with
// D the stabilizing closed-loop matrix.
struct PhatDynamics {
    MatrixXd mean_reversion;  // D
    VectorXd level;           // E
};

inline PhatDynamics phat_dynamics(const LinearDiffusionModel& model, const ValueSolution& sol,
                                  const Preferences& prefs) {
    const auto co = riccati_detail::make_coefficients(model, prefs);
    PhatDynamics out;
    out.mean_reversion = co.B + co.Ahat * sol.v1;
    Eigen::LDLT<MatrixXd> S(model.Sigma());
    const VectorXd drift0 = -prefs.q * (model.Upsilon().transpose() * S.solve(model.mu0)) +
                            co.Ahat * sol.v0;
    out.level = Eigen::FullPivLU<MatrixXd>(out.mean_reversion).solve(drift0);
    return out;
}

// pi(y) = Sigma^-1 (mu(y) + U (v0 - v1 y)) / (1-p),  eta(y) = v0 - v1 y.
inline Policy longrun_policy(const LinearDiffusionModel& model, const ValueSolution& sol,
                             const Preferences& prefs) {
    Policy pol;
    pol.kind = PolicyKind::LongRun;
    pol.name = "long_run";
    const MatrixXd U = model.Upsilon();
    Eigen::LDLT<MatrixXd> S(model.Sigma());
    pol.pi_const = S.solve(model.mu0 + U * sol.v0) / (1.0 - prefs.p);
    pol.pi_lin = S.solve(model.mu1 - U * sol.v1) / (1.0 - prefs.p);
    pol.pi_inv = VectorXd::Zero(model.n());
    pol.eta_const = sol.v0;
    pol.eta_lin = -sol.v1;
    pol.eta_inv = VectorXd::Zero(model.k());
    return pol;
}

}  // namespace longrun
