#pragma once

// Model configuration files.  Schema (all numbers per month):
//
// {
//   "model": {
//     "kind": "linear" | "kim_omberg" | "cir",
//     ... family-specific keys, numeric arrays row-major ...
//   },
//   "preferences": { "p": <real> }
// }
//
// linear:      mu0 [n], mu1 [n][k], sigma [n][n], b [k][k], a [k][k],
//              rho [n][k], r0, r1 [k]
// kim_omberg:  sigma [n][n], nu0 [n], nu1 [n], b, rho [n], r0
// cir:         sigma [n][n], nu0 [n], nu1 [n], b, theta, a, rho [n], r0, r1
//
// Unknown keys are rejected.

#include <set>
#include <string>

#include <json.hpp>

#include "longrun/errors.hpp"
#include "longrun/model.hpp"

namespace longrun {

namespace config_detail {

using nlohmann::json;

inline void require_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
    }
}

inline double get_number(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing key \"" + key + "\"");
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return v.get<double>();
}

inline VectorXd get_vector(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing key \"" + key + "\"");
    const auto& v = obj.at(key);
    if (!v.is_array() || v.empty()) throw ConfigError(where + "." + key + ": expected an array");
    VectorXd out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw ConfigError(where + "." + key + ": expected numbers");
        out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    return out;
}

inline MatrixXd get_matrix(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing key \"" + key + "\"");
    const auto& v = obj.at(key);
    if (!v.is_array() || v.empty() || !v[0].is_array())
        throw ConfigError(where + "." + key + ": expected a row-major nested array");
    const std::size_t rows = v.size();
    const std::size_t cols = v[0].size();
    MatrixXd out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!v[i].is_array() || v[i].size() != cols)
            throw ConfigError(where + "." + key + ": ragged rows");
        for (std::size_t j = 0; j < cols; ++j) {
            if (!v[i][j].is_number()) throw ConfigError(where + "." + key + ": expected numbers");
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                v[i][j].get<double>();
        }
    }
    return out;
}

}  // namespace config_detail

struct ParsedConfig {
    MarketModel model;
    Preferences preferences;
};

inline ParsedConfig parse_config(const nlohmann::json& doc) {
    using namespace config_detail;
    require_keys(doc, "config", {"model", "preferences"});
    if (!doc.contains("model") || !doc.contains("preferences"))
        throw ConfigError("config: require top-level keys \"model\" and \"preferences\"");

    const auto& prefs_obj = doc.at("preferences");
    require_keys(prefs_obj, "preferences", {"p"});
    Preferences prefs;
    try {
        prefs = make_preferences(get_number(prefs_obj, "preferences", "p"));
    } catch (const DomainError& e) {
        throw ConfigError(std::string("preferences: ") + e.what());
    }

    const auto& m = doc.at("model");
    if (!m.is_object() || !m.contains("kind") || !m.at("kind").is_string())
        throw ConfigError("model: require string key \"kind\"");
    const std::string kind = m.at("kind").get<std::string>();

    ParsedConfig out;
    out.preferences = prefs;
    if (kind == "linear") {
        require_keys(m, "model",
                     {"kind", "mu0", "mu1", "sigma", "b", "a", "rho", "r0", "r1"});
        LinearDiffusionModel model;
        model.mu0 = get_vector(m, "model", "mu0");
        model.mu1 = get_matrix(m, "model", "mu1");
        model.sigma = get_matrix(m, "model", "sigma");
        model.b = get_matrix(m, "model", "b");
        model.a = get_matrix(m, "model", "a");
        model.rho = get_matrix(m, "model", "rho");
        model.r0 = get_number(m, "model", "r0");
        model.r1 = get_vector(m, "model", "r1");
        model.validate();
        out.model = model;
    } else if (kind == "kim_omberg") {
        require_keys(m, "model", {"kind", "sigma", "nu0", "nu1", "b", "rho", "r0"});
        KimOmbergModel model;
        model.sigma = get_matrix(m, "model", "sigma");
        model.nu0 = get_vector(m, "model", "nu0");
        model.nu1 = get_vector(m, "model", "nu1");
        model.b = get_number(m, "model", "b");
        model.rho = get_vector(m, "model", "rho");
        model.r0 = get_number(m, "model", "r0");
        model.validate();
        out.model = model;
    } else if (kind == "cir") {
        require_keys(m, "model",
                     {"kind", "sigma", "nu0", "nu1", "b", "theta", "a", "rho", "r0", "r1"});
        CirModel model;
        model.sigma = get_matrix(m, "model", "sigma");
        model.nu0 = get_vector(m, "model", "nu0");
        model.nu1 = get_vector(m, "model", "nu1");
        model.b = get_number(m, "model", "b");
        model.theta = get_number(m, "model", "theta");
        model.a = get_number(m, "model", "a");
        model.rho = get_vector(m, "model", "rho");
        model.r0 = get_number(m, "model", "r0");
        model.r1 = get_number(m, "model", "r1");
        model.validate();
        out.model = model;
    } else {
        throw ConfigError("model.kind: expected \"linear\", \"kim_omberg\" or \"cir\"");
    }
    return out;
}

inline ParsedConfig parse_config_string(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

}  // namespace longrun
