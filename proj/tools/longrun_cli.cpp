// longrun: long-run portfolio, risk-premia and performance-bound calculations
// for the linear-diffusion, Kim-Omberg and CIR model families.
//
// Commands: solve | check | eigen1d | cel | simulate | calibration-demo.
// All rates are per month; CEL curves report both monthly and annualized
// (x12) figures.  Exit codes: 0 success, 2 validation failure, 3 solver
// failure; `check` exits 0/10/11 for Holds/NotImplied/FailureProven.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "longrun/longrun.hpp"

namespace {

using nlohmann::json;
using namespace longrun;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

json to_json(const VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json to_json(const MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(row);
    }
    return out;
}

json to_json(const Policy& pol) {
    json out;
    out["name"] = pol.name;
    out["pi_const"] = to_json(pol.pi_const);
    out["pi_lin"] = to_json(pol.pi_lin);
    out["pi_inv"] = to_json(pol.pi_inv);
    out["eta_const"] = to_json(pol.eta_const);
    out["eta_lin"] = to_json(pol.eta_lin);
    out["eta_inv"] = to_json(pol.eta_inv);
    return out;
}

json to_json(const AffineDrift& d) { return json{{"speed", d.speed}, {"level", d.level}}; }

json to_json(const OptimalityVerdict& v) {
    json out;
    out["status"] = to_string(v.status);
    out["condition_values"] = v.condition_values;
    if (v.blow_up_time) out["blow_up_time_months"] = *v.blow_up_time;
    if (!v.note.empty()) out["note"] = v.note;
    return out;
}

json to_json(const AssumptionReport& rep) {
    json arr = json::array();
    for (const auto& c : rep.checks) {
        json item{{"name", c.name}, {"pass", c.pass}};
        if (!c.detail.empty()) item["detail"] = c.detail;
        arr.push_back(item);
    }
    return arr;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << text;
}

ParsedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_string(ss.str());
}

int exit_code_for(const Error& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const AssumptionViolation*>(&e) ||
        dynamic_cast<const DomainError*>(&e) || dynamic_cast<const SingularDelta*>(&e))
        return 2;
    return 3;
}

struct CelOptions {
    double t_max = 360.0;
    double t_step = 1.0;
    double y0 = 0.0;
    std::int64_t paths = 20000;
    double dt = 0.125;
    std::uint64_t seed = 1;
};

std::string curve_csv(const std::vector<HorizonCurve>& curves) {
    std::string text = "T_months,T_years,primal_log,dual_log,cel_monthly,cel_annual_pct,policy\n";
    for (const auto& c : curves) {
        for (size_t i = 0; i < c.horizons.size(); ++i) {
            const double T = c.horizons[i];
            text += fmt17(T) + "," + fmt17(T / 12.0) + "," +
                    fmt17(c.primal_log_growth[i] * T) + "," + fmt17(c.dual_log_growth[i] * T) +
                    "," + fmt17(c.cel_bound[i]) + "," + fmt17(100.0 * c.cel_bound_annual[i]) +
                    "," + c.policy_name + "\n";
        }
    }
    return text;
}

std::vector<double> horizon_grid(double t_max, double t_step) {
    std::vector<double> out;
    for (double t = t_step; t <= t_max + 1e-9; t += t_step) out.push_back(t);
    return out;
}

int cmd_solve(const std::string& config_path, const std::string& out_path) {
    const ParsedConfig cfg = load_config(config_path);
    json out;
    out["preferences"] = {{"p", cfg.preferences.p},
                          {"q", cfg.preferences.q},
                          {"gamma", cfg.preferences.gamma}};
    if (const auto* m = std::get_if<LinearDiffusionModel>(&cfg.model)) {
        const ValueSolution sol = solve_long_run(*m, cfg.preferences);
        out["model_kind"] = "linear";
        out["solution"] = {{"v0", to_json(sol.v0)},
                           {"v1", to_json(sol.v1)},
                           {"lambda", sol.lambda},
                           {"residual_v1", sol.residual_v1},
                           {"residual_v0", sol.residual_v0},
                           {"v0_condition_number", sol.v0_condition_number}};
        json spec_json = json::array();
        for (const auto& z : sol.stabilizing_spectrum)
            spec_json.push_back({{"re", z.real()}, {"im", z.imag()}});
        out["solution"]["stabilizing_spectrum"] = spec_json;
        out["policies"] = {{"long_run", to_json(longrun_policy(*m, sol, cfg.preferences))},
                           {"myopic", to_json(myopic_policy(*m, cfg.preferences))}};
        const auto phat = phat_dynamics(*m, sol, cfg.preferences);
        out["measure_dynamics"] = {{"myopic_phat",
                                    json{{"mean_reversion", to_json(phat.mean_reversion)},
                                         {"level", to_json(phat.level)}}}};
    } else if (const auto* m = std::get_if<KimOmbergModel>(&cfg.model)) {
        const OuSolution sol = solve_ou_1d(*m, cfg.preferences);
        out["model_kind"] = "kim_omberg";
        out["solution"] = {{"Theta", sol.Theta},       {"v0", sol.v0},
                           {"v1", sol.v1},             {"lambda", sol.lambda},
                           {"delta", sol.delta},       {"hat_kappa", sol.hat_kappa},
                           {"hat_mean", sol.hat_mean}, {"tightness_unverified",
                                                        sol.tightness_unverified}};
        out["policies"] = {{"long_run", to_json(longrun_policy(*m, sol, cfg.preferences))},
                           {"myopic", to_json(myopic_policy(*m, cfg.preferences))}};
        out["measure_dynamics"] = {
            {"physical", to_json(measure_dynamics(*m, sol, Measure::PhysicalP))},
            {"myopic_phat",
             to_json(measure_dynamics(*m, sol, Measure::MyopicPhat))},
            {"q_optimal",
             to_json(measure_dynamics(*m, sol, Measure::QOptimal))}};
    } else if (const auto* m = std::get_if<CirModel>(&cfg.model)) {
        const CirSolution sol = solve_cir(*m, cfg.preferences);
        out["model_kind"] = "cir";
        out["solution"] = {{"Theta", sol.Theta}, {"Lambda", sol.Lambda}, {"c", sol.c},
                           {"v0", sol.v0},       {"v1", sol.v1},         {"lambda", sol.lambda},
                           {"delta", sol.delta}};
        json branches = json::array();
        for (const auto& br : cir_branch_listing(*m, cfg.preferences))
            branches.push_back({{"theta_sign", br.theta_sign},
                                {"lambda_sign", br.lambda_sign},
                                {"v0", br.v0},
                                {"v1", br.v1},
                                {"lambda", br.lambda}});
        out["candidate_branches"] = branches;
        out["policies"] = {{"long_run", to_json(longrun_policy(*m, sol, cfg.preferences))},
                           {"myopic", to_json(myopic_policy(*m, cfg.preferences))}};
        out["measure_dynamics"] = {
            {"physical", to_json(measure_dynamics(*m, sol, Measure::PhysicalP))},
            {"myopic_phat",
             to_json(measure_dynamics(*m, sol, Measure::MyopicPhat))},
            {"q_optimal",
             to_json(measure_dynamics(*m, sol, Measure::QOptimal))}};
    }
    write_text(out_path, out.dump(2) + "\n");
    return 0;
}

// Detects the nu1 = -kappa rho parameterization (returns kappa if colinear).
std::optional<double> detect_kappa(const KimOmbergModel& m) {
    const double rr = m.rho.squaredNorm();
    if (rr == 0.0) return std::nullopt;
    const double kappa = -m.rho.dot(m.nu1) / rr;
    if ((m.nu1 + kappa * m.rho).norm() <= 1e-12 * (1.0 + m.nu1.norm()) && kappa > 0.0)
        return kappa;
    return std::nullopt;
}

int cmd_check(const std::string& config_path, const std::string& out_path) {
    const ParsedConfig cfg = load_config(config_path);
    json out;
    OptimalityVerdict primary;
    std::vector<std::pair<std::string, OptimalityVerdict>> rows;
    const AssumptionReport assumptions = validate_assumptions(cfg.model, cfg.preferences);

    if (const auto* m = std::get_if<KimOmbergModel>(&cfg.model)) {
        const OuSolution sol = solve_ou_1d(*m, cfg.preferences);
        primary = check_ou_general(sol, *m, cfg.preferences);
        rows.emplace_back("ou_general", primary);
        if (auto kappa = detect_kappa(*m)) {
            const auto cond = check_ou_kappa(*kappa, cfg.preferences.q * m->rho_sq(), m,
                                             &cfg.preferences);
            rows.emplace_back("ou_kappa", cond);
            if (std::abs(*kappa - 1.0) < 1e-12) primary = cond;  // sharp at kappa = 1
        }
        rows.emplace_back("rho_region", check_rho_region(cfg.preferences, m->rho_sq()));
    } else if (const auto* m = std::get_if<CirModel>(&cfg.model)) {
        const CirSolution sol = solve_cir(*m, cfg.preferences);
        primary = check_cir(sol, *m, cfg.preferences);
        rows.emplace_back("cir", primary);
        rows.emplace_back("rho_region", check_rho_region(cfg.preferences, m->rho_sq()));
    } else {
        primary.status = OptStatus::NotImplied;
        primary.note = "no sufficient condition available for k > 1 state models";
        rows.emplace_back("multivariate", primary);
    }

    json rows_json = json::object();
    for (const auto& [name, verdict] : rows) rows_json[name] = to_json(verdict);
    out["checks"] = rows_json;
    out["assumptions"] = to_json(assumptions);
    out["verdict"] = to_string(primary.status);
    write_text(out_path, out.dump(2) + "\n");

    // aligned text table on stderr
    std::fprintf(stderr, "%-14s %-26s %s\n", "check", "status", "values");
    for (const auto& [name, verdict] : rows) {
        std::string vals;
        for (const auto& [k, v] : verdict.condition_values)
            vals += k + "=" + fmt17(v) + " ";
        std::fprintf(stderr, "%-14s %-26s %s\n", name.c_str(), to_string(verdict.status),
                     vals.c_str());
    }

    switch (primary.status) {
        case OptStatus::SufficientConditionHolds: return 0;
        case OptStatus::NotImplied: return 10;
        case OptStatus::FailureProven: return 11;
    }
    return 3;
}

int cmd_eigen1d(const std::string& config_path, const std::string& out_path,
                const std::string& phi_path, double half_width, int grid_points, double tol) {
    const ParsedConfig cfg = load_config(config_path);
    Eigen1dProblem problem;
    if (const auto* m = std::get_if<KimOmbergModel>(&cfg.model))
        problem = make_eigen_problem(*m, cfg.preferences);
    else if (const auto* m = std::get_if<CirModel>(&cfg.model))
        problem = make_eigen_problem(*m, cfg.preferences);
    else
        throw ConfigError("eigen1d: requires a one-state model (kim_omberg or cir)");

    Eigen1dGridConfig grid;
    grid.initial_half_width = half_width;
    grid.points = grid_points;
    grid.tol = tol;
    const Eigen1dSolution sol = principal_eigenvalue(problem, grid);

    json out;
    out["lambda_c"] = sol.lambda_c;
    out["eps_sensitivity"] = sol.eps_sensitivity;
    json hist = json::array();
    for (const auto& rec : sol.convergence_history)
        hist.push_back({{"domain_size", rec.domain_size},
                        {"grid_step", rec.grid_step},
                        {"eigenvalue", rec.eigenvalue},
                        {"phi2_mnu_integral", rec.phi2_mnu_integral}});
    out["convergence"] = hist;
    write_text(out_path, out.dump(2) + "\n");

    if (!phi_path.empty()) {
        std::string csv = "y,phi,v\n";
        for (size_t i = 0; i < sol.grid.size(); ++i)
            csv += fmt17(sol.grid[i]) + "," + fmt17(sol.phi_at(i)) + "," + fmt17(sol.v[i]) + "\n";
        write_text(phi_path, csv);
    }
    return 0;
}

int cmd_cel(const std::string& config_path, const std::string& out_path, const CelOptions& opt) {
    const ParsedConfig cfg = load_config(config_path);
    const auto horizons = horizon_grid(opt.t_max, opt.t_step);
    std::vector<HorizonCurve> curves;
    if (const auto* m = std::get_if<KimOmbergModel>(&cfg.model)) {
        const OuSolution sol = solve_ou_1d(*m, cfg.preferences);
        curves.push_back(cel_curve(*m, sol, cfg.preferences, opt.y0, horizons,
                                   longrun_policy(*m, sol, cfg.preferences)));
        curves.push_back(
            cel_curve(*m, sol, cfg.preferences, opt.y0, horizons, myopic_policy(*m, cfg.preferences)));
        try {
            const double tstar = break_even_horizon(*m, cfg.preferences, opt.y0, opt.t_step,
                                                    opt.t_max);
            std::fprintf(stderr, "break-even: T* = %.1f months (%.2f years)\n", tstar,
                         tstar / 12.0);
        } catch (const NoBracket& e) {
            std::fprintf(stderr, "break-even: %s\n", e.what());
        }
    } else if (const auto* m = std::get_if<CirModel>(&cfg.model)) {
        const CirSolution sol = solve_cir(*m, cfg.preferences);
        SimConfig sim;
        sim.n_paths = opt.paths;
        sim.dt = opt.dt;
        sim.seed = opt.seed;
        const double y0 = opt.y0 > 0.0 ? opt.y0 : m->theta;
        curves.push_back(cel_curve(*m, sol, cfg.preferences, y0, horizons,
                                   longrun_policy(*m, sol, cfg.preferences), sim));
        curves.push_back(cel_curve(*m, sol, cfg.preferences, y0, horizons,
                                   myopic_policy(*m, cfg.preferences), sim));
    } else {
        throw ConfigError("cel: requires a one-state model (kim_omberg or cir)");
    }
    write_text(out_path, curve_csv(curves));
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_path, Measure measure,
                 const std::string& policy_name, double T, const SimConfig& sim, double y0_arg) {
    const ParsedConfig cfg = load_config(config_path);
    json out;
    auto estimate_json = [](const McEstimate& e) {
        return json{{"mean", e.mean},         {"std_error", e.std_error}, {"n", e.n},
                    {"ci95_lo", e.ci_lo},     {"ci95_hi", e.ci_hi},       {"max_share", e.max_share},
                    {"heavy_tail_warning", e.heavy_tail_warning}};
    };
    if (const auto* m = std::get_if<KimOmbergModel>(&cfg.model)) {
        const double y0 = y0_arg;
        const auto draws = sample_state_terminal(*m, cfg.preferences, measure, y0, T, sim);
        out["terminal_state"] = estimate_json(mc_estimate(draws));
        const Policy pol =
            policy_name == "myopic"
                ? myopic_policy(*m, cfg.preferences)
                : longrun_policy(*m, solve_ou_1d(*m, cfg.preferences), cfg.preferences);
        const auto paths = simulate_wealth_and_sdf(*m, pol, cfg.preferences, y0, T, sim);
        out["policy"] = pol.name;
        const double p = cfg.preferences.p;
        out["x_power_p"] =
            estimate_json(mc_estimate(paths.x_terminal, [p](double x) { return std::pow(x, p); }));
        std::vector<double> xm(paths.x_terminal.size());
        for (size_t i = 0; i < xm.size(); ++i) xm[i] = paths.x_terminal[i] * paths.m_terminal[i];
        out["x_times_m"] = estimate_json(mc_estimate(xm));
        out["aborted_paths"] = paths.aborted;
    } else if (const auto* m = std::get_if<CirModel>(&cfg.model)) {
        const double y0 = y0_arg > 0.0 ? y0_arg : m->theta;
        CirSampleStats stats;
        const auto draws =
            sample_state_terminal(*m, cfg.preferences, measure, y0, T, sim, &stats);
        out["terminal_state"] = estimate_json(mc_estimate(draws));
        out["euler_negative_clamps"] = stats.euler_clamps;
        const Policy pol =
            policy_name == "myopic"
                ? myopic_policy(*m, cfg.preferences)
                : longrun_policy(*m, solve_cir(*m, cfg.preferences), cfg.preferences);
        const auto paths = simulate_wealth_and_sdf(*m, pol, cfg.preferences, y0, T, sim);
        out["policy"] = pol.name;
        const double p = cfg.preferences.p;
        out["x_power_p"] =
            estimate_json(mc_estimate(paths.x_terminal, [p](double x) { return std::pow(x, p); }));
        std::vector<double> xm(paths.x_terminal.size());
        for (size_t i = 0; i < xm.size(); ++i) xm[i] = paths.x_terminal[i] * paths.m_terminal[i];
        out["x_times_m"] = estimate_json(mc_estimate(xm));
        out["aborted_paths"] = paths.aborted;
    } else {
        throw ConfigError("simulate: requires a one-state model (kim_omberg or cir)");
    }
    out["measure"] = measure == Measure::PhysicalP ? "P"
                     : measure == Measure::MyopicPhat ? "Phat"
                                                      : "Q";
    out["T_months"] = T;
    out["seed"] = sim.seed;
    out["n_paths"] = sim.n_paths;
    write_text(out_path, out.dump(2) + "\n");
    return 0;
}

KimOmbergModel calibration_model() {
    KimOmbergModel m;
    m.sigma = MatrixXd::Constant(1, 1, 0.0436);
    m.nu0 = VectorXd::Constant(1, 0.0788);
    m.rho = VectorXd::Constant(1, -0.935);
    m.nu1 = -0.8944 * m.rho;
    m.b = 0.0226;
    m.r0 = 0.0014;
    return m;
}

int cmd_calibration_demo(const std::string& out_dir) {
    const KimOmbergModel model = calibration_model();
    const double kappa = 0.8944;
    const double rr = model.rho_sq();

    auto holds_at = [&](double p) {
        const auto prefs = make_preferences(p);
        return check_ou_kappa(kappa, prefs.q * rr).holds();
    };
    double lo = -20.0, hi = -1.0;  // fails at lo, holds at hi
    if (!holds_at(hi) || holds_at(lo)) {
        std::fprintf(stderr, "calibration-demo: unexpected condition bracket\n");
        return 1;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (holds_at(mid) ? hi : lo) = mid;
    }
    const double p_threshold = 0.5 * (lo + hi);
    std::printf("kappa-condition threshold: p* = %.4f (risk aversion %.4f)\n", p_threshold,
                1.0 - p_threshold);

    for (double p : {-1.0, -4.0}) {
        const auto prefs = make_preferences(p);
        const OuSolution sol = solve_ou_1d(model, prefs);
        std::printf("p = %g: Theta = %s, v0 = %s, v1 = %s, lambda = %s\n", p,
                    fmt17(sol.Theta).c_str(), fmt17(sol.v0).c_str(), fmt17(sol.v1).c_str(),
                    fmt17(sol.lambda).c_str());
        const double tstar = break_even_horizon(model, prefs, 0.0);
        std::printf("p = %g: break-even horizon T* = %.1f months (%.2f years)\n", p, tstar,
                    tstar / 12.0);
        const auto horizons = horizon_grid(360.0, 1.0);
        std::vector<HorizonCurve> curves;
        curves.push_back(
            cel_curve(model, sol, prefs, 0.0, horizons, longrun_policy(model, sol, prefs)));
        curves.push_back(cel_curve(model, sol, prefs, 0.0, horizons, myopic_policy(model, prefs)));
        const std::string path =
            (out_dir.empty() ? std::string(".") : out_dir) + "/cel_p" + std::to_string(int(p)) +
            ".csv";
        write_text(path, curve_csv(curves));
        std::printf("p = %g: wrote %s\n", p, path.c_str());
    }

    const bool ok = p_threshold >= -12.6 && p_threshold <= -12.2;
    std::printf("threshold check: %s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"long-run portfolios, risk premia and performance bounds"};
    app.require_subcommand(1);

    std::string config_path, out_path, phi_path, out_dir;
    std::string policy_name = "long_run", measure_name = "P", scheme_name = "exact";
    double half_width = 12.0, tol = 1e-6, t_max = 360.0, t_step = 1.0, y0 = 0.0, T = 12.0;
    int grid_points = 1601;
    SimConfig sim;

    auto* solve = app.add_subcommand("solve", "long-run value function and policies");
    solve->add_option("--config", config_path, "model configuration file")->required();
    solve->add_option("--out", out_path, "output path (default stdout)");

    auto* check = app.add_subcommand("check", "long-run optimality certificates");
    check->add_option("--config", config_path)->required();
    check->add_option("--out", out_path);

    auto* eigen = app.add_subcommand("eigen1d", "principal eigenvalue of the 1-D problem");
    eigen->add_option("--config", config_path)->required();
    eigen->add_option("--out", out_path);
    eigen->add_option("--phi-out", phi_path, "CSV path for the eigenfunction grid");
    eigen->add_option("--half-width", half_width, "initial truncation half-width");
    eigen->add_option("--grid-points", grid_points, "grid points on the initial truncation");
    eigen->add_option("--tol", tol, "eigenvalue tolerance between truncations");

    auto* cel = app.add_subcommand("cel", "certainty-equivalent-loss bound curves");
    cel->add_option("--config", config_path)->required();
    cel->add_option("--out", out_path);
    cel->add_option("--t-max", t_max, "largest horizon in months");
    cel->add_option("--t-step", t_step, "horizon grid step in months");
    cel->add_option("--y0", y0, "initial state");
    cel->add_option("--paths", sim.n_paths, "Monte Carlo paths (CIR)");
    cel->add_option("--dt", sim.dt, "Euler step in months (CIR)");
    cel->add_option("--seed", sim.seed, "random seed (CIR)");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates");
    simulate->add_option("--config", config_path)->required();
    simulate->add_option("--out", out_path);
    simulate->add_option("--measure", measure_name, "P | Phat | Q");
    simulate->add_option("--policy", policy_name, "long_run | myopic");
    simulate->add_option("-T,--horizon", T, "horizon in months");
    simulate->add_option("--paths", sim.n_paths, "number of paths");
    simulate->add_option("--dt", sim.dt, "Euler step in months");
    simulate->add_option("--seed", sim.seed, "random seed");
    simulate->add_option("--scheme", scheme_name, "exact | euler");
    simulate->add_flag("--antithetic", sim.antithetic, "antithetic normal draws");
    simulate->add_option("--y0", y0, "initial state");

    auto* demo = app.add_subcommand("calibration-demo",
                                    "monthly equity/dividend-yield calibration demo");
    demo->add_option("--out-dir", out_dir, "directory for the CEL curve files");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(config_path, out_path);
        if (check->parsed()) return cmd_check(config_path, out_path);
        if (eigen->parsed())
            return cmd_eigen1d(config_path, out_path, phi_path, half_width, grid_points, tol);
        if (cel->parsed()) {
            CelOptions opt;
            opt.t_max = t_max;
            opt.t_step = t_step;
            opt.y0 = y0;
            opt.paths = sim.n_paths;
            opt.dt = sim.dt;
            opt.seed = sim.seed;
            return cmd_cel(config_path, out_path, opt);
        }
        if (simulate->parsed()) {
            Measure measure = Measure::PhysicalP;
            if (measure_name == "Phat")
                measure = Measure::MyopicPhat;
            else if (measure_name == "Q")
                measure = Measure::QOptimal;
            else if (measure_name != "P")
                throw ConfigError("simulate: --measure must be P, Phat or Q");
            sim.scheme = scheme_name == "euler" ? SimScheme::FullTruncationEuler
                                                : SimScheme::ExactTransition;
            return cmd_simulate(config_path, out_path, measure, policy_name, T, sim, y0);
        }
        if (demo->parsed()) return cmd_calibration_demo(out_dir);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
