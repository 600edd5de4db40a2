#pragma once

// Finite-horizon performance of time-homogeneous policies.
//
// Two routes compute the expected power utility of an affine policy on the
// OU family:
//   * the closed Gaussian route through the myopic-probability identities
//       E[(X_T)^p]        = e^{lambda T + v(y)} E_hat[e^{-v(Y_T)}]
//       E[(M_T)^q]^{1-p}  = e^{lambda T + v(y)} E_hat[e^{-v(Y_T)/(1-p)}]^{1-p}
//     with the expectations evaluated by the exponential-quadratic Gaussian
//     moment formula (long-run policy only);
//   * a deterministic Feynman-Kac evaluation valid for any affine policy:
//     after absorbing the stochastic exponential of the wealth equation into
//     a measure change, the state stays an affine-drift OU and
//       E[(X_T)^p] = exp(a(T) + b(T) y0 + c(T) y0^2)
//     where (a, b, c) solve a scalar Riccati ODE system integrated by
//     classical RK4.  Finite-time blow-up of c encodes E[(X_T)^p] = +inf,
//     that is, expected utility -infinity for p < 0.
//
// The certainty-equivalent-loss bound of a policy pi against the long-run
// risk premia eta is
//   l_T <= ( (1/T) log E[(M_T)^q]^{1-p} - (1/T) log E[(X^pi_T)^p] ) / p.
// Horizons are in months; annualized figures multiply by 12.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "longrun/closed_form.hpp"
#include "longrun/errors.hpp"
#include "longrun/model.hpp"
#include "longrun/simulate.hpp"

namespace longrun {

struct GaussianLaw {
    double mean = 0.0;
    double variance = 0.0;
};

// E[exp(A X^2 + B X)] for X ~ N(mean, variance); +infinity when 2 A var >= 1.
inline double gaussian_exp_quad_moment(const GaussianLaw& law, double A, double B) {
    const double d = 1.0 - 2.0 * A * law.variance;
    if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
    const double m = law.mean;
    const double expo = (m * m * A + m * B + 0.5 * law.variance * B * B) / d;
    return std::exp(expo) / std::sqrt(d);
}

inline double log_gaussian_exp_quad_moment(const GaussianLaw& law, double A, double B) {
    const double d = 1.0 - 2.0 * A * law.variance;
    if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
    const double m = law.mean;
    return (m * m * A + m * B + 0.5 * law.variance * B * B) / d - 0.5 * std::log(d);
}

// Law of Y_T under the myopic probability for the OU family.
inline GaussianLaw ou_hatp_law(const OuSolution& sol, const KimOmbergModel& model, double y0,
                               double T) {
    (void)model;
    if (T < 0.0) throw DomainError("ou_hatp_law: T must be nonnegative");
    GaussianLaw law;
    const double kh = sol.hat_kappa;
    const double decay = std::exp(-kh * T);
    law.mean = sol.hat_mean + (y0 - sol.hat_mean) * decay;
    law.variance = kh > 0.0 ? (1.0 - decay * decay) / (2.0 * kh) : T;
    return law;
}

struct FiniteHorizonBounds {
    double primal = 0.0;  // E[(X_T)^p] for the long-run policy
    double dual = 0.0;    // E[(M_T)^q]^{1-p} for the long-run risk premia
    double log_primal = 0.0;
    double log_dual = 0.0;
    double primal_std_error = 0.0;  // Monte Carlo only
    double dual_std_error = 0.0;
};

inline FiniteHorizonBounds finite_horizon_bounds(const KimOmbergModel& model,
                                                 const OuSolution& sol, const Preferences& prefs,
                                                 double y0, double T) {
    FiniteHorizonBounds out;
    const GaussianLaw law = ou_hatp_law(sol, model, y0, T);
    const double base = sol.lambda * T + sol.value(y0);
    const double le1 = log_gaussian_exp_quad_moment(law, 0.5 * sol.v1, -sol.v0);
    const double le2 = log_gaussian_exp_quad_moment(law, 0.5 * sol.v1 / (1.0 - prefs.p),
                                                    -sol.v0 / (1.0 - prefs.p));
    out.log_primal = base + le1;
    out.log_dual = base + (1.0 - prefs.p) * le2;
    out.primal = std::exp(out.log_primal);
    out.dual = std::exp(out.log_dual);
    return out;
}

struct PowerUtilityResult {
    double value = 0.0;      // E[(X_T)^p], +infinity on blow-up
    double log_value = 0.0;  // log of the above
    std::optional<double> blow_up_at;  // months

    bool infinite() const { return blow_up_at.has_value(); }
};

namespace horizon_detail {

struct OdeCoeffs {
    double g0, g1, g2;  // running quadratic p r + p pi'mu + p(p-1)/2 pi'Sigma pi
    double b0, b1;      // state drift under the absorbed measure: b0 + b1 y
};

inline OdeCoeffs affine_policy_coeffs(const KimOmbergModel& model, const Policy& policy,
                                      const Preferences& prefs) {
    if (policy.has_inverse_part())
        throw DomainError("expected_power_utility_affine: policy must be affine in y");
    const double p = prefs.p;
    const VectorXd pic = policy.pi_const;
    const VectorXd pil = policy.pi_lin.col(0);
    const MatrixXd Sigma = model.Sigma();
    const VectorXd mu0 = model.sigma * model.nu0;
    const VectorXd mu1 = model.b * (model.sigma * model.nu1);
    OdeCoeffs co;
    co.g2 = p * pil.dot(mu1) + 0.5 * p * (p - 1.0) * pil.dot(Sigma * pil);
    co.g1 = p * (pic.dot(mu1) + pil.dot(mu0)) + p * (p - 1.0) * pic.dot(Sigma * pil);
    co.g0 = p * model.r0 + p * pic.dot(mu0) + 0.5 * p * (p - 1.0) * pic.dot(Sigma * pic);
    // Girsanov drift of Y under the measure that absorbs E(int p pi'sigma dZ):
    // -b y + p (sigma rho)'pi(y)
    const VectorXd srho = model.sigma * model.rho;
    co.b0 = p * srho.dot(pic);
    co.b1 = -model.b + p * srho.dot(pil);
    return co;
}

struct OdeState {
    double a = 0.0, b = 0.0, c = 0.0;
};

inline OdeState ode_rhs(const OdeCoeffs& co, const OdeState& s) {
    OdeState d;
    d.c = 2.0 * s.c * s.c + 2.0 * co.b1 * s.c + co.g2;
    d.b = 2.0 * s.b * s.c + co.b1 * s.b + 2.0 * co.b0 * s.c + co.g1;
    d.a = 0.5 * s.b * s.b + co.b0 * s.b + s.c + co.g0;
    return d;
}

inline bool rk4_step(const OdeCoeffs& co, OdeState& s, double h) {
    const OdeState k1 = ode_rhs(co, s);
    OdeState t{s.a + 0.5 * h * k1.a, s.b + 0.5 * h * k1.b, s.c + 0.5 * h * k1.c};
    const OdeState k2 = ode_rhs(co, t);
    t = {s.a + 0.5 * h * k2.a, s.b + 0.5 * h * k2.b, s.c + 0.5 * h * k2.c};
    const OdeState k3 = ode_rhs(co, t);
    t = {s.a + h * k3.a, s.b + h * k3.b, s.c + h * k3.c};
    const OdeState k4 = ode_rhs(co, t);
    OdeState next{s.a + h / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a),
                  s.b + h / 6.0 * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b),
                  s.c + h / 6.0 * (k1.c + 2.0 * k2.c + 2.0 * k3.c + k4.c)};
    if (!std::isfinite(next.a) || !std::isfinite(next.b) || !std::isfinite(next.c) ||
        std::abs(next.c) > 1e10 || std::abs(next.b) > 1e10)
        return false;
    s = next;
    return true;
}

// Integrate to horizon T.  Fixed steps suffice while the coefficients stay on
// the scale of the algebraic roots; once c enters the explosive regime a
// fixed step lags the true growth, so steps are accepted there only when a
// step-doubling error estimate passes, with recursive halving near the pole.
// The reported explosion time is then sharp.
inline PowerUtilityResult integrate_profile(const OdeCoeffs& co, double y0, double T, int steps) {
    PowerUtilityResult out;
    OdeState s;
    double tau = 0.0;
    double h = T / steps;
    const double h_min = 1e-9 * std::max(T, 1.0);
    auto advance = [&](double step) {
        if (s.c <= 1.0) {
            OdeState trial = s;
            if (!rk4_step(co, trial, step)) return false;
            s = trial;
            tau += step;
            return true;
        }
        OdeState one = s, two = s;
        if (!rk4_step(co, one, step)) return false;
        if (!rk4_step(co, two, 0.5 * step) || !rk4_step(co, two, 0.5 * step)) return false;
        if (std::abs(one.c - two.c) > 1e-8 * (1.0 + std::abs(two.c))) return false;
        if (two.c < s.c) return false;  // c is strictly increasing in this regime
        s = two;
        tau += step;
        return true;
    };
    while (tau < T - 1e-15 * T) {
        double step = std::min(h, T - tau);
        if (advance(step)) continue;
        bool advanced = false;
        while (step > h_min) {
            step *= 0.5;
            if (advance(step)) {
                advanced = true;
                break;
            }
        }
        if (!advanced) {
            out.blow_up_at = tau;
            out.value = std::numeric_limits<double>::infinity();
            out.log_value = std::numeric_limits<double>::infinity();
            return out;
        }
    }
    out.log_value = s.a + s.b * y0 + s.c * y0 * y0;
    out.value = std::exp(out.log_value);
    return out;
}

}  // namespace horizon_detail

// Deterministic evaluation of E[(X^pi_T)^p] for an affine policy on the OU
// family.  The result is accepted only if halving the step moves the log
// value by less than 1e-6 (relative).
inline PowerUtilityResult expected_power_utility_affine(const KimOmbergModel& model,
                                                        const Policy& policy,
                                                        const Preferences& prefs, double y0,
                                                        double T, int steps = 0) {
    if (!(T > 0.0)) throw DomainError("expected_power_utility_affine: T must be positive");
    const auto co = horizon_detail::affine_policy_coeffs(model, policy, prefs);
    if (steps <= 0) steps = std::max(512, static_cast<int>(8.0 * T));
    auto coarse = horizon_detail::integrate_profile(co, y0, T, steps);
    auto fine = horizon_detail::integrate_profile(co, y0, T, 2 * steps);
    if (coarse.infinite() || fine.infinite()) {
        if (coarse.infinite() != fine.infinite())
            throw StepTooCoarse("expected_power_utility_affine: blow-up detection unstable "
                                "under step halving");
        const double t1 = *coarse.blow_up_at, t2 = *fine.blow_up_at;
        if (std::abs(t1 - t2) > 1e-3 * std::max(1.0, t2))
            throw StepTooCoarse("expected_power_utility_affine: blow-up time unstable under "
                                "step halving");
        return fine;
    }
    const double diff = std::abs(fine.log_value - coarse.log_value);
    if (diff > 1e-6 * std::max(1.0, std::abs(fine.log_value)))
        throw StepTooCoarse("expected_power_utility_affine: step halving changes the result "
                            "beyond 1e-6 relative");
    return fine;
}

struct HorizonCurve {
    std::vector<double> horizons;  // months
    std::vector<double> primal_log_growth;  // (1/T) log E[(X_T)^p]
    std::vector<double> dual_log_growth;    // (1/T) log E[(M_T)^q]^{1-p}
    std::vector<double> cel_bound;          // per month
    std::vector<double> cel_bound_annual;   // 12 x per month
    std::string policy_name;
    std::optional<double> blow_up_at;
};

// CEL bound curve of `policy` against the long-run risk premia, OU family.
inline HorizonCurve cel_curve(const KimOmbergModel& model, const OuSolution& sol,
                              const Preferences& prefs, double y0,
                              const std::vector<double>& horizons, const Policy& policy) {
    HorizonCurve curve;
    curve.policy_name = policy.name;
    curve.horizons = horizons;
    const size_t n = horizons.size();
    curve.primal_log_growth.assign(n, std::numeric_limits<double>::quiet_NaN());
    curve.dual_log_growth.assign(n, std::numeric_limits<double>::quiet_NaN());
    curve.cel_bound.assign(n, std::numeric_limits<double>::quiet_NaN());
    curve.cel_bound_annual.assign(n, std::numeric_limits<double>::quiet_NaN());
    for (size_t i = 0; i < n; ++i) {
        const double T = horizons[i];
        const auto bounds = finite_horizon_bounds(model, sol, prefs, y0, T);
        const auto primal = expected_power_utility_affine(model, policy, prefs, y0, T);
        if (!std::isfinite(bounds.log_dual) || primal.infinite()) {
            const double inf = std::numeric_limits<double>::infinity();
            if (!curve.blow_up_at) curve.blow_up_at = primal.infinite() ? *primal.blow_up_at : T;
            curve.primal_log_growth[i] = primal.infinite() ? inf : primal.log_value / T;
            curve.dual_log_growth[i] = bounds.log_dual / T;
            curve.cel_bound[i] = inf;
            curve.cel_bound_annual[i] = inf;
            continue;
        }
        curve.primal_log_growth[i] = primal.log_value / T;
        curve.dual_log_growth[i] = bounds.log_dual / T;
        curve.cel_bound[i] = (curve.dual_log_growth[i] - curve.primal_log_growth[i]) / prefs.p;
        curve.cel_bound_annual[i] = 12.0 * curve.cel_bound[i];
    }
    return curve;
}

// CIR route: the myopic-probability expectations have no Gaussian closed
// form, so they are estimated by Monte Carlo with exact transition sampling.
inline FiniteHorizonBounds finite_horizon_bounds(const CirModel& model, const CirSolution& sol,
                                                 const Preferences& prefs, double y0, double T,
                                                 const SimConfig& cfg) {
    const auto draws = sample_state_terminal(model, prefs, Measure::MyopicPhat, y0, T, cfg);
    const double base = sol.lambda * T + sol.value(y0);
    const auto e1 = mc_estimate(draws, [&](double y) { return std::exp(-sol.value(y)); });
    const auto e2 = mc_estimate(
        draws, [&](double y) { return std::exp(-sol.value(y) / (1.0 - prefs.p)); });
    FiniteHorizonBounds out;
    out.log_primal = base + std::log(e1.mean);
    out.log_dual = base + (1.0 - prefs.p) * std::log(e2.mean);
    out.primal = std::exp(out.log_primal);
    out.dual = std::exp(out.log_dual);
    out.primal_std_error = std::exp(base) * e1.std_error;
    out.dual_std_error = std::exp(base) * (1.0 - prefs.p) *
                         std::pow(e2.mean, -prefs.p) * e2.std_error;
    return out;
}

inline HorizonCurve cel_curve(const CirModel& model, const CirSolution& sol,
                              const Preferences& prefs, double y0,
                              const std::vector<double>& horizons, const Policy& policy,
                              const SimConfig& cfg) {
    HorizonCurve curve;
    curve.policy_name = policy.name;
    curve.horizons = horizons;
    const size_t n = horizons.size();
    curve.primal_log_growth.assign(n, std::numeric_limits<double>::quiet_NaN());
    curve.dual_log_growth.assign(n, std::numeric_limits<double>::quiet_NaN());
    curve.cel_bound.assign(n, std::numeric_limits<double>::quiet_NaN());
    curve.cel_bound_annual.assign(n, std::numeric_limits<double>::quiet_NaN());
    for (size_t i = 0; i < n; ++i) {
        const double T = horizons[i];
        SimConfig cfg_t = cfg;
        cfg_t.seed = cfg.seed + i;  // independent draws per horizon
        const auto bounds = finite_horizon_bounds(model, sol, prefs, y0, T, cfg_t);
        const auto paths = simulate_wealth_and_sdf(model, policy, prefs, y0, T, cfg_t);
        const auto xp = mc_estimate(paths.x_terminal,
                                    [&](double x) { return std::pow(x, prefs.p); });
        if (!std::isfinite(bounds.log_dual) || !(xp.mean > 0.0) || !std::isfinite(xp.mean)) {
            if (!curve.blow_up_at) curve.blow_up_at = T;
            curve.cel_bound[i] = std::numeric_limits<double>::infinity();
            curve.cel_bound_annual[i] = std::numeric_limits<double>::infinity();
            continue;
        }
        curve.primal_log_growth[i] = std::log(xp.mean) / T;
        curve.dual_log_growth[i] = bounds.log_dual / T;
        curve.cel_bound[i] = (curve.dual_log_growth[i] - curve.primal_log_growth[i]) / prefs.p;
        curve.cel_bound_annual[i] = 12.0 * curve.cel_bound[i];
    }
    return curve;
}

// Smallest horizon at which the long-run policy's CEL bound drops below the
// myopic policy's.  Both bounds share the dual term, so the crossing is where
// the two primal values meet; g(T) = log primal_LR - log primal_My changes
// sign there (g > 0 for small T when p < 0).
inline double break_even_horizon(const KimOmbergModel& model, const Preferences& prefs, double y0,
                                 double t_min = 1.0, double t_max = 1200.0) {
    const OuSolution sol = solve_ou_1d(model, prefs);
    const Policy lr = longrun_policy(model, sol, prefs);
    const Policy my = myopic_policy(model, prefs);
    auto g = [&](double T) {
        const auto a = expected_power_utility_affine(model, lr, prefs, y0, T);
        const auto b = expected_power_utility_affine(model, my, prefs, y0, T);
        if (a.infinite() || b.infinite())
            throw NoBracket("break_even_horizon: blow-up inside the search range");
        return a.log_value - b.log_value;
    };
    if (g(t_min) <= 0.0) return t_min;  // identical or immediately favourable policies
    double lo = t_min, hi = t_min;
    bool bracketed = false;
    for (double T = t_min; T <= t_max; T *= 1.5) {
        if (g(T) <= 0.0) {
            hi = T;
            bracketed = true;
            break;
        }
        lo = T;
    }
    if (!bracketed) {
        if (g(t_max) > 0.0)
            throw NoBracket("break_even_horizon: no crossing in the search range");
        hi = t_max;
    }
    for (int it = 0; it < 60 && hi - lo > 1e-6 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) <= 0.0 ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace longrun
