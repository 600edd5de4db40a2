#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "longrun/config.hpp"

using namespace longrun;

namespace {

const char* kKimOmbergConfig = R"({
  "model": {
    "kind": "kim_omberg",
    "sigma": [[0.0436]],
    "nu0": [0.0788],
    "nu1": [0.836264],
    "b": 0.0226,
    "rho": [-0.935],
    "r0": 0.0014
  },
  "preferences": { "p": -1.0 }
})";

const char* kCirConfig = R"({
  "model": {
    "kind": "cir",
    "sigma": [[1.0]],
    "nu0": [0.1],
    "nu1": [0.3],
    "b": 0.5,
    "theta": 0.1,
    "a": 0.2,
    "rho": [-0.5],
    "r0": 0.01,
    "r1": 0.02
  },
  "preferences": { "p": -2.0 }
})";

const char* kLinearConfig = R"({
  "model": {
    "kind": "linear",
    "mu0": [0.003, -0.001],
    "mu1": [[0.02, 0.005], [0.0, 0.015]],
    "sigma": [[0.05, 0.0], [0.01, 0.04]],
    "b": [[0.3, 0.05], [-0.05, 0.4]],
    "a": [[1.0, 0.1], [0.1, 0.8]],
    "rho": [[0.2, -0.1], [0.0, 0.3]],
    "r0": 0.001,
    "r1": [0.0, 0.001]
  },
  "preferences": { "p": -2.0 }
})";

std::string write_temp(const std::string& name, const std::string& text) {
    const std::string path = std::string("/tmp/longrun_test_") + name;
    std::ofstream out(path);
    out << text;
    return path;
}

#ifdef LONGRUN_CLI_PATH
struct CliResult {
    int exit_code;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    const std::string out_file = "/tmp/longrun_test_cli_out.txt";
    const std::string cmd =
        std::string(LONGRUN_CLI_PATH) + " " + args + " > " + out_file + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WEXITSTATUS(status), ss.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
#endif

}  // namespace

TEST_CASE("config: all three families parse and validate") {
    {
        const auto cfg = parse_config_string(kKimOmbergConfig);
        const auto* m = std::get_if<KimOmbergModel>(&cfg.model);
        REQUIRE(m != nullptr);
        CHECK(m->b == doctest::Approx(0.0226));
        CHECK(cfg.preferences.q == doctest::Approx(0.5));
    }
    {
        const auto cfg = parse_config_string(kCirConfig);
        const auto* m = std::get_if<CirModel>(&cfg.model);
        REQUIRE(m != nullptr);
        CHECK(m->theta == doctest::Approx(0.1));
    }
    {
        const auto cfg = parse_config_string(kLinearConfig);
        const auto* m = std::get_if<LinearDiffusionModel>(&cfg.model);
        REQUIRE(m != nullptr);
        CHECK(m->mu1(0, 1) == doctest::Approx(0.005));  // row-major nested arrays
        CHECK(m->k() == 2);
    }
}

TEST_CASE("config: unknown and missing keys are rejected") {
    std::string with_unknown = kKimOmbergConfig;
    with_unknown.replace(with_unknown.find("\"b\": 0.0226"), 11, "\"bb\": 0.0226");
    CHECK_THROWS_AS(parse_config_string(with_unknown), ConfigError);

    std::string top_level = kKimOmbergConfig;
    top_level.insert(top_level.rfind('}'), ", \"extra\": 1");
    CHECK_THROWS_AS(parse_config_string(top_level), ConfigError);

    CHECK_THROWS_AS(parse_config_string("{\"model\": {\"kind\": \"kim_omberg\"}}"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("not json at all"), ConfigError);
    CHECK_THROWS_AS(parse_config_string(R"({"model": {"kind": "heston"},
                                           "preferences": {"p": -1}})"),
                    ConfigError);

    // invalid preferences and violated model assumptions surface as ConfigError
    std::string bad_p = kKimOmbergConfig;
    bad_p.replace(bad_p.find("-1.0"), 4, "1.5");
    CHECK_THROWS_AS(parse_config_string(bad_p), ConfigError);
    std::string bad_cir = kCirConfig;
    bad_cir.replace(bad_cir.find("\"a\": 0.2"), 8, "\"a\": 0.9");
    CHECK_THROWS_AS(parse_config_string(bad_cir), AssumptionViolation);
}

#ifdef LONGRUN_CLI_PATH

TEST_CASE("cli: solve writes the solution and honors exit codes") {
    const auto cfg = write_temp("cal.json", kKimOmbergConfig);
    const auto res = run_cli("solve --config " + cfg);
    CHECK(res.exit_code == 0);
    const auto doc = nlohmann::json::parse(res.output);
    CHECK(doc.at("solution").at("lambda").get<double>() ==
          doctest::Approx(-0.0070340806232476166).epsilon(1e-12));
    CHECK(doc.at("model_kind") == "kim_omberg");

    const auto bad = write_temp("bad.json", "{\"model\":");
    CHECK(run_cli("solve --config " + bad).exit_code == 2);

    std::string feller = kCirConfig;
    feller.replace(feller.find("\"a\": 0.2"), 8, "\"a\": 0.45");
    const auto feller_path = write_temp("feller.json", feller);
    const auto feller_res = run_cli("solve --config " + feller_path);
    CHECK(feller_res.exit_code == 2);
    CHECK(feller_res.output.find("Feller") != std::string::npos);

    CHECK(run_cli("solve --config /tmp/does_not_exist_12345.json").exit_code == 2);
}

TEST_CASE("cli: check exit codes reflect the verdict") {
    const auto holds = write_temp("cal.json", kKimOmbergConfig);
    CHECK(run_cli("check --config " + holds).exit_code == 0);

    std::string p13 = kKimOmbergConfig;
    p13.replace(p13.find("-1.0"), 4, "-13.0");
    const auto not_implied = write_temp("cal13.json", p13);
    CHECK(run_cli("check --config " + not_implied).exit_code == 10);

    // kappa = 1 with q rho'rho = 0.9: proven failure with a blow-up horizon
    const char* fail_cfg = R"({
      "model": {
        "kind": "kim_omberg",
        "sigma": [[0.05]],
        "nu0": [0.02],
        "nu1": [0.9733285267845754],
        "b": 0.05,
        "rho": [-0.9733285267845754],
        "r0": 0.001
      },
      "preferences": { "p": -19.0 }
    })";
    const auto fails = write_temp("kappa1.json", fail_cfg);
    const auto res = run_cli("check --config " + fails);
    CHECK(res.exit_code == 11);
    CHECK(res.output.find("blow_up_time_months") != std::string::npos);

    // CIR sample satisfies both sufficient conditions
    const auto cir = write_temp("cir.json", kCirConfig);
    CHECK(run_cli("check --config " + cir).exit_code == 0);
    // no sufficient condition is stated for multi-state models
    const auto linear = write_temp("linear.json", kLinearConfig);
    CHECK(run_cli("check --config " + linear).exit_code == 10);
}

TEST_CASE("cli: cel emits the curve schema for both policies") {
    const auto cfg = write_temp("cal.json", kKimOmbergConfig);
    const std::string out = "/tmp/longrun_test_cel.csv";
    const auto res = run_cli("cel --config " + cfg + " --t-max 24 --t-step 1 --out " + out);
    CHECK(res.exit_code == 0);
    const auto body = slurp(out);
    std::istringstream lines(body);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "T_months,T_years,primal_log,dual_log,cel_monthly,cel_annual_pct,policy");
    int rows = 0, lr_rows = 0, my_rows = 0;
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        ++rows;
        if (line.find("long_run") != std::string::npos) ++lr_rows;
        if (line.find("myopic") != std::string::npos) ++my_rows;
    }
    CHECK(rows == 48);  // 24 horizons x 2 policies
    CHECK(lr_rows == 24);
    CHECK(my_rows == 24);
}

TEST_CASE("cli: cel on the CIR family runs through Monte Carlo") {
    const auto cfg = write_temp("cir.json", kCirConfig);
    const std::string out = "/tmp/longrun_test_cel_cir.csv";
    const auto res = run_cli("cel --config " + cfg +
                             " --t-max 12 --t-step 6 --paths 2000 --seed 9 --out " + out);
    CHECK(res.exit_code == 0);
    std::istringstream lines(slurp(out));
    std::string line;
    int rows = 0;
    std::getline(lines, line);  // header
    while (std::getline(lines, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);  // 2 horizons x 2 policies
}

TEST_CASE("cli: outputs are byte-identical across reruns") {
    const auto cfg = write_temp("cir.json", kCirConfig);
    const std::string out1 = "/tmp/longrun_test_sim1.json";
    const std::string out2 = "/tmp/longrun_test_sim2.json";
    const std::string args = "simulate --config " + cfg +
                             " --measure Phat -T 12 --paths 4000 --seed 77 --out ";
    CHECK(run_cli(args + out1).exit_code == 0);
    CHECK(run_cli(args + out2).exit_code == 0);
    const auto a = slurp(out1);
    const auto b = slurp(out2);
    CHECK(a == b);
    CHECK(!a.empty());
    const auto doc = nlohmann::json::parse(a);
    CHECK(doc.at("terminal_state").at("n").get<long long>() == 4000);
}

TEST_CASE("cli: eigen1d emits the eigenvalue and the eigenfunction grid") {
    const auto cfg = write_temp("cal.json", kKimOmbergConfig);
    const std::string out = "/tmp/longrun_test_eigen.json";
    const std::string phi = "/tmp/longrun_test_phi.csv";
    const auto res = run_cli("eigen1d --config " + cfg + " --half-width 16 --tol 1e-7 --out " +
                             out + " --phi-out " + phi);
    CHECK(res.exit_code == 0);
    const auto doc = nlohmann::json::parse(slurp(out));
    CHECK(doc.at("lambda_c").get<double>() ==
          doctest::Approx(-0.0070340806232476166).epsilon(1e-5));
    CHECK(doc.at("convergence").size() >= 2);
    std::istringstream lines(slurp(phi));
    std::string header;
    std::getline(lines, header);
    CHECK(header == "y,phi,v");
}

TEST_CASE("cli: calibration demo reproduces the headline numbers") {
    const auto res = run_cli("calibration-demo --out-dir /tmp");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("threshold check: PASS") != std::string::npos);
    // 360 monthly horizons x 2 policies + header
    std::istringstream lines(slurp("/tmp/cel_p-1.csv"));
    int rows = 0;
    std::string line;
    while (std::getline(lines, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 721);
}

#endif  // LONGRUN_CLI_PATH
