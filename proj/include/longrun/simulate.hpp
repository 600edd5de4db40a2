#pragma once

// Monte Carlo engines for the one-state families: exact terminal-state
// sampling under the physical, myopic and q-optimal measures, joint Euler
// paths of (state, wealth, stochastic discount factor), and estimators with
// confidence intervals.  Serves as the statistical oracle for the
// deterministic evaluators.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

#include "longrun/closed_form.hpp"
#include "longrun/errors.hpp"
#include "longrun/model.hpp"
#include "longrun/rng.hpp"

namespace longrun {

enum class SimScheme { ExactTransition, FullTruncationEuler };

struct SimConfig {
    std::int64_t n_paths = 10000;
    double dt = 0.125;  // months, Euler components only
    std::uint64_t seed = 1;
    SimScheme scheme = SimScheme::ExactTransition;
    bool antithetic = false;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t n = 0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double max_share = 0.0;  // largest single-path share of the mean estimate
    bool heavy_tail_warning = false;  // max_share > 10%
};

namespace sim_detail {

inline int worker_count() {
    if (const char* env = std::getenv("LONGRUN_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

template <class Fn>
void parallel_paths(std::int64_t n_paths, Fn&& per_path) {
    const int workers = std::min<std::int64_t>(worker_count(), std::max<std::int64_t>(1, n_paths));
    if (workers <= 1) {
        for (std::int64_t i = 0; i < n_paths; ++i) per_path(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    constexpr std::int64_t kChunk = 256;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::int64_t begin = next.fetch_add(kChunk);
                if (begin >= n_paths) return;
                const std::int64_t end = std::min(begin + kChunk, n_paths);
                for (std::int64_t i = begin; i < end; ++i) per_path(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

// Order-insensitive pairwise reduction.
inline double pairwise_sum(const double* data, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

struct StreamDraw {
    std::uint64_t stream = 0;
    double sign = 1.0;
};

inline StreamDraw stream_for_path(const SimConfig& cfg, std::int64_t i) {
    if (!cfg.antithetic) return {static_cast<std::uint64_t>(i), 1.0};
    return {static_cast<std::uint64_t>(i / 2), i % 2 == 0 ? 1.0 : -1.0};
}

}  // namespace sim_detail

// Exact one-step law of an affine-drift OU state (unit diffusion).
struct GaussianLawParams {
    double mean = 0.0;
    double variance = 0.0;
};

inline GaussianLawParams ou_transition_law(const AffineDrift& dyn, double y0, double T) {
    GaussianLawParams law;
    const double s = dyn.speed;
    const double decay = std::exp(-s * T);
    law.mean = dyn.level + (y0 - dyn.level) * decay;
    law.variance = std::abs(s) > 1e-14 ? (1.0 - decay * decay) / (2.0 * s) : T;
    return law;
}

// Exact CIR transition: Y_T = c * chi'^2(d, lambda) with
// c = a^2 (1 - e^{-sT}) / (4 s), d = 4 s l / a^2, lambda = y0 e^{-sT} / c.
struct CirTransitionLaw {
    double scale = 0.0;
    double dof = 0.0;
    double noncentrality = 0.0;
};

inline CirTransitionLaw cir_transition_law(const AffineDrift& dyn, double a, double y0, double T) {
    CirTransitionLaw law;
    const double s = dyn.speed;
    const double decay = std::exp(-s * T);
    law.scale = std::abs(s) > 1e-14 ? a * a * (1.0 - decay) / (4.0 * s) : 0.25 * a * a * T;
    law.dof = 4.0 * s * dyn.level / (a * a);
    if (!(law.dof > 0.0) || !(law.scale > 0.0))
        throw SimulationError("cir_transition_law: dynamics leave the square-root family");
    law.noncentrality = y0 * decay / law.scale;
    return law;
}

// Terminal state draws under the requested measure.
inline std::vector<double> sample_state_terminal(const KimOmbergModel& model,
                                                 const Preferences& prefs, Measure measure,
                                                 double y0, double T, const SimConfig& cfg) {
    if (cfg.n_paths < 1) throw SimulationError("sample_state_terminal: need n_paths >= 1");
    AffineDrift dyn;
    if (measure == Measure::PhysicalP) {
        dyn.speed = model.b;
        dyn.level = 0.0;
    } else {
        const OuSolution sol = solve_ou_1d(model, prefs);
        dyn = measure_dynamics(model, sol, measure);
    }
    std::vector<double> out(static_cast<std::size_t>(cfg.n_paths));
    if (cfg.scheme == SimScheme::ExactTransition) {
        const auto law = ou_transition_law(dyn, y0, T);
        const double sd = std::sqrt(std::max(0.0, law.variance));
        sim_detail::parallel_paths(cfg.n_paths, [&](std::int64_t i) {
            const auto st = sim_detail::stream_for_path(cfg, i);
            PathRng rng(cfg.seed, st.stream);
            out[static_cast<std::size_t>(i)] = law.mean + sd * st.sign * rng.normal();
        });
        return out;
    }
    const auto steps = static_cast<std::int64_t>(std::ceil(T / cfg.dt));
    const double h = T / static_cast<double>(std::max<std::int64_t>(1, steps));
    const double sqh = std::sqrt(h);
    sim_detail::parallel_paths(cfg.n_paths, [&](std::int64_t i) {
        const auto st = sim_detail::stream_for_path(cfg, i);
        PathRng rng(cfg.seed, st.stream);
        double y = y0;
        for (std::int64_t k = 0; k < steps; ++k)
            y += dyn.speed * (dyn.level - y) * h + sqh * st.sign * rng.normal();
        out[static_cast<std::size_t>(i)] = y;
    });
    return out;
}

struct CirSampleStats {
    std::int64_t euler_clamps = 0;  // negative-state truncations in the Euler scheme
};

inline std::vector<double> sample_state_terminal(const CirModel& model, const Preferences& prefs,
                                                 Measure measure, double y0, double T,
                                                 const SimConfig& cfg,
                                                 CirSampleStats* stats = nullptr) {
    if (cfg.n_paths < 1) throw SimulationError("sample_state_terminal: need n_paths >= 1");
    if (!(y0 > 0.0)) throw DomainError("sample_state_terminal: CIR state must start positive");
    if (T <= 0.0) return std::vector<double>(static_cast<std::size_t>(cfg.n_paths), y0);
    AffineDrift dyn;
    if (measure == Measure::PhysicalP) {
        dyn.speed = model.b;
        dyn.level = model.theta;
    } else {
        const CirSolution sol = solve_cir(model, prefs);
        dyn = measure_dynamics(model, sol, measure);
    }
    std::vector<double> out(static_cast<std::size_t>(cfg.n_paths));
    if (cfg.scheme == SimScheme::ExactTransition) {
        const auto law = cir_transition_law(dyn, model.a, y0, T);
        sim_detail::parallel_paths(cfg.n_paths, [&](std::int64_t i) {
            const auto st = sim_detail::stream_for_path(cfg, i);
            PathRng rng(cfg.seed, st.stream);
            out[static_cast<std::size_t>(i)] =
                law.scale * rng.noncentral_chi_squared(law.dof, law.noncentrality);
        });
        return out;
    }
    const auto steps = static_cast<std::int64_t>(std::ceil(T / cfg.dt));
    const double h = T / static_cast<double>(std::max<std::int64_t>(1, steps));
    const double sqh = std::sqrt(h);
    std::atomic<std::int64_t> clamps{0};
    sim_detail::parallel_paths(cfg.n_paths, [&](std::int64_t i) {
        const auto st = sim_detail::stream_for_path(cfg, i);
        PathRng rng(cfg.seed, st.stream);
        double y = y0;
        for (std::int64_t k = 0; k < steps; ++k) {
            const double yp = std::max(y, 0.0);
            if (y < 0.0) clamps.fetch_add(1, std::memory_order_relaxed);
            y += dyn.speed * (dyn.level - yp) * h + model.a * std::sqrt(yp) * sqh * st.sign * rng.normal();
        }
        out[static_cast<std::size_t>(i)] = std::max(y, 0.0);
    });
    if (stats) stats->euler_clamps = clamps.load();
    return out;
}

// Joint Euler paths of (Y, log X, log M) with dZ = rho dW + rho_bar dB.
struct WealthSdfPaths {
    std::vector<double> x_terminal;
    std::vector<double> m_terminal;
    std::int64_t aborted = 0;  // non-finite paths, excluded from the outputs
};

namespace sim_detail {

inline MatrixXd rho_bar(const VectorXd& rho) {
    const Eigen::Index n = rho.size();
    MatrixXd g = MatrixXd::Identity(n, n) - rho * rho.transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(g);
    const VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace sim_detail

inline WealthSdfPaths simulate_wealth_and_sdf(const KimOmbergModel& model, const Policy& policy,
                                              const Preferences& prefs, double y0, double T,
                                              const SimConfig& cfg) {
    (void)prefs;
    if (cfg.dt > 0.25 + 1e-12)
        throw SimulationError("simulate_wealth_and_sdf: Euler grid requires dt <= 0.25 month");
    model.validate();
    const Eigen::Index n = model.n();
    const MatrixXd Sigma = model.Sigma();
    Eigen::LDLT<MatrixXd> S(Sigma);
    const VectorXd mu0 = model.sigma * model.nu0;
    const VectorXd mu1 = model.b * (model.sigma * model.nu1);
    const VectorXd srho = model.sigma * model.rho;
    const MatrixXd rbar = sim_detail::rho_bar(model.rho);
    const MatrixXd sig_rbar = model.sigma * rbar;  // sigma rho_bar, used via its transpose

    const VectorXd pic = policy.pi_const;
    const VectorXd pil = policy.pi_lin.size() > 0 ? VectorXd(policy.pi_lin.col(0))
                                                  : VectorXd(VectorXd::Zero(n));
    const double ec = policy.eta_const.size() > 0 ? policy.eta_const(0) : 0.0;
    const double el = policy.eta_lin.size() > 0 ? policy.eta_lin(0, 0) : 0.0;

    // wealth drift p0 + p1 y + p2 y^2 and loadings, precomputed from the
    // affine structure
    const double w_c0 = model.r0 + pic.dot(mu0) - 0.5 * pic.dot(Sigma * pic);
    const double w_c1 = pic.dot(mu1) + pil.dot(mu0) - pil.dot(Sigma * pic);
    const double w_c2 = pil.dot(mu1) - 0.5 * pil.dot(Sigma * pil);
    const double pw0 = pic.dot(srho), pw1 = pil.dot(srho);  // pi'sigma rho
    const VectorXd pb0 = sig_rbar.transpose() * pic;        // (pi'sigma rho_bar)'
    const VectorXd pb1 = sig_rbar.transpose() * pil;

    // u(y) = sigma' S^-1 (mu(y) + sigma rho eta(y)) = u0 + u1 y
    const VectorXd u0 = model.sigma.transpose() * S.solve(mu0 + ec * srho);
    const VectorXd u1 = model.sigma.transpose() * S.solve(mu1 + el * srho);
    const double uu0 = u0.dot(u0), uu1 = 2.0 * u0.dot(u1), uu2 = u1.dot(u1);
    const double ur0 = u0.dot(model.rho), ur1 = u1.dot(model.rho);
    const VectorXd ub0 = rbar.transpose() * u0;
    const VectorXd ub1 = rbar.transpose() * u1;

    const auto steps = static_cast<std::int64_t>(std::ceil(T / cfg.dt));
    const double h = T / static_cast<double>(std::max<std::int64_t>(1, steps));
    const double sqh = std::sqrt(h);

    std::vector<double> xs(static_cast<std::size_t>(cfg.n_paths));
    std::vector<double> ms(static_cast<std::size_t>(cfg.n_paths));
    std::vector<unsigned char> bad(static_cast<std::size_t>(cfg.n_paths), 0);

    sim_detail::parallel_paths(cfg.n_paths, [&](std::int64_t ipath) {
        const auto st = sim_detail::stream_for_path(cfg, ipath);
        PathRng rng(cfg.seed, st.stream);
        double y = y0, lx = 0.0, lm = 0.0;
        VectorXd db(n);
        for (std::int64_t k = 0; k < steps; ++k) {
            const double dw = sqh * st.sign * rng.normal();
            for (Eigen::Index j = 0; j < n; ++j) db(j) = sqh * st.sign * rng.normal();
            const double eta = ec + el * y;
            const double uu = uu0 + uu1 * y + uu2 * y * y;
            const double ur = ur0 + ur1 * y;
            lx += (w_c0 + w_c1 * y + w_c2 * y * y) * h + (pw0 + pw1 * y) * dw +
                  (pb0 + y * pb1).dot(db);
            lm += (-model.r0 - 0.5 * uu - 0.5 * eta * eta + ur * eta) * h -
                  ((ur0 + ur1 * y) * dw + (ub0 + y * ub1).dot(db)) + eta * dw;
            y += -model.b * y * h + dw;
            if (!std::isfinite(y) || !std::isfinite(lx) || !std::isfinite(lm)) {
                bad[static_cast<std::size_t>(ipath)] = 1;
                return;
            }
        }
        xs[static_cast<std::size_t>(ipath)] = std::exp(lx);
        ms[static_cast<std::size_t>(ipath)] = std::exp(lm);
    });

    WealthSdfPaths out;
    out.x_terminal.reserve(xs.size());
    out.m_terminal.reserve(ms.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (bad[i]) {
            ++out.aborted;
            continue;
        }
        out.x_terminal.push_back(xs[i]);
        out.m_terminal.push_back(ms[i]);
    }
    if (out.aborted > cfg.n_paths / 1000)
        throw SimulationError("simulate_wealth_and_sdf: more than 0.1% of paths aborted");
    return out;
}

inline WealthSdfPaths simulate_wealth_and_sdf(const CirModel& model, const Policy& policy,
                                              const Preferences& prefs, double y0, double T,
                                              const SimConfig& cfg) {
    (void)prefs;
    if (cfg.dt > 0.25 + 1e-12)
        throw SimulationError("simulate_wealth_and_sdf: Euler grid requires dt <= 0.25 month");
    model.validate();
    if (!(y0 > 0.0)) throw DomainError("simulate_wealth_and_sdf: CIR state must start positive");
    const Eigen::Index n = model.n();
    const MatrixXd Sigma1 = model.sigma * model.sigma.transpose();
    Eigen::LDLT<MatrixXd> S(Sigma1);
    const VectorXd snu0 = model.sigma * model.nu0;
    const VectorXd snu1 = model.sigma * model.nu1;
    const VectorXd srho = model.sigma * model.rho;
    const MatrixXd rbar = sim_detail::rho_bar(model.rho);
    const MatrixXd sig_rbar = model.sigma * rbar;

    const VectorXd pic = policy.pi_const;  // constant and 1/y parts only
    const VectorXd piv = policy.pi_inv.size() > 0 ? policy.pi_inv : VectorXd(VectorXd::Zero(n));
    const double ec = policy.eta_const.size() > 0 ? policy.eta_const(0) : 0.0;
    const double ev = policy.eta_inv.size() > 0 ? policy.eta_inv(0) : 0.0;

    const auto steps = static_cast<std::int64_t>(std::ceil(T / cfg.dt));
    const double h = T / static_cast<double>(std::max<std::int64_t>(1, steps));
    const double sqh = std::sqrt(h);

    std::vector<double> xs(static_cast<std::size_t>(cfg.n_paths));
    std::vector<double> ms(static_cast<std::size_t>(cfg.n_paths));
    std::vector<unsigned char> bad(static_cast<std::size_t>(cfg.n_paths), 0);

    sim_detail::parallel_paths(cfg.n_paths, [&](std::int64_t ipath) {
        const auto st = sim_detail::stream_for_path(cfg, ipath);
        PathRng rng(cfg.seed, st.stream);
        double y = y0, lx = 0.0, lm = 0.0;
        VectorXd db(n), pi(n), u(n);
        for (std::int64_t k = 0; k < steps; ++k) {
            const double yp = std::max(y, 1e-12);
            const double sq = std::sqrt(yp);
            const double dw = sqh * st.sign * rng.normal();
            for (Eigen::Index j = 0; j < n; ++j) db(j) = sqh * st.sign * rng.normal();
            pi = pic + piv / yp;
            const double eta = ec + ev / yp;
            const VectorXd mu = snu0 + yp * snu1;
            // u = sigma(y)' Sigma(y)^-1 (mu + Upsilon eta), sigma(y) = sqrt(y) sigma
            u = model.sigma.transpose() * S.solve(mu / sq + model.a * sq * eta * srho);
            const double pisig_w = sq * pi.dot(srho);       // pi' sigma(y) rho
            const double u_w = u.dot(model.rho);            // u'rho
            const double r = model.r0 + model.r1 * yp;
            lx += (r + pi.dot(mu) - 0.5 * yp * pi.dot(Sigma1 * pi)) * h + pisig_w * dw +
                  sq * (sig_rbar.transpose() * pi).dot(db);
            lm += (-r - 0.5 * u.dot(u) - 0.5 * eta * eta * model.a * model.a * yp +
                   u_w * eta * model.a * sq) * h -
                  (u_w * dw + (rbar.transpose() * u).dot(db)) + eta * model.a * sq * dw;
            y += model.b * (model.theta - yp) * h + model.a * sq * dw;
            if (!std::isfinite(y) || !std::isfinite(lx) || !std::isfinite(lm)) {
                bad[static_cast<std::size_t>(ipath)] = 1;
                return;
            }
        }
        xs[static_cast<std::size_t>(ipath)] = std::exp(lx);
        ms[static_cast<std::size_t>(ipath)] = std::exp(lm);
    });

    WealthSdfPaths out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (bad[i]) {
            ++out.aborted;
            continue;
        }
        out.x_terminal.push_back(xs[i]);
        out.m_terminal.push_back(ms[i]);
    }
    if (out.aborted > cfg.n_paths / 1000)
        throw SimulationError("simulate_wealth_and_sdf: more than 0.1% of paths aborted");
    return out;
}

template <class Transform>
McEstimate mc_estimate(const std::vector<double>& draws, Transform&& transform) {
    if (draws.size() < 2) throw DegenerateSample("mc_estimate: need at least two draws");
    const std::size_t n = draws.size();
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i) vals[i] = transform(draws[i]);
    McEstimate est;
    est.n = static_cast<std::int64_t>(n);
    est.mean = sim_detail::pairwise_sum(vals) / static_cast<double>(n);
    std::vector<double> sq(n);
    double max_abs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = vals[i] - est.mean;
        sq[i] = d * d;
        max_abs = std::max(max_abs, std::abs(vals[i]));
    }
    const double var = sim_detail::pairwise_sum(sq) / static_cast<double>(n - 1);
    if (var == 0.0 && n < 10)
        throw DegenerateSample("mc_estimate: zero variance with fewer than 10 draws");
    est.std_error = std::sqrt(var / static_cast<double>(n));
    est.ci_lo = est.mean - 1.96 * est.std_error;
    est.ci_hi = est.mean + 1.96 * est.std_error;
    const double total = std::abs(est.mean) * static_cast<double>(n);
    est.max_share = total > 0.0 ? max_abs / total : 0.0;
    est.heavy_tail_warning = est.max_share > 0.10;
    return est;
}

inline McEstimate mc_estimate(const std::vector<double>& draws) {
    return mc_estimate(draws, [](double x) { return x; });
}

}  // namespace longrun
