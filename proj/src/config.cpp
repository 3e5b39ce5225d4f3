#include "curveflow/config.hpp"

#include "curveflow/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace curveflow {

namespace {

using nlohmann::json;

void reject_unknown(const json& object, const std::set<std::string>& allowed, std::string_view where) {
    for (const auto& [key, value] : object.items()) {
        if (!allowed.contains(key)) {
            throw Error(ErrorCode::ConfigError, fmt::format("unknown key '{}' in {}", key, where));
        }
    }
}

double real_field(const json& object, const char* key) {
    if (!object.contains(key)) throw Error(ErrorCode::ConfigError, fmt::format("missing key '{}'", key));
    const auto& v = object.at(key);
    if (!v.is_number()) throw Error(ErrorCode::ConfigError, fmt::format("'{}' must be a number", key));
    return v.get<double>();
}

} // namespace

GasConfig parse_gas_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, fmt::format("malformed JSON: {}", e.what()));
    }
    if (!doc.is_object()) throw Error(ErrorCode::ConfigError, "configuration must be a JSON object");
    reject_unknown(doc, {"R", "n", "k", "g", "lambda", "potential"}, "configuration");

    if (!doc.contains("n") || !doc.at("n").is_number_integer()) {
        throw Error(ErrorCode::ConfigError, "'n' must be an integer");
    }
    const int n = doc.at("n").get<int>();

    try {
        auto gas = GasParams::make(real_field(doc, "R"), n, real_field(doc, "k"), real_field(doc, "g"),
                                   real_field(doc, "lambda"));
        if (!doc.contains("potential")) return GasConfig{gas, ideal_gas_potential(n)};

        const auto& pot = doc.at("potential");
        if (!pot.is_object()) throw Error(ErrorCode::ConfigError, "'potential' must be an object");
        reject_unknown(pot, {"type", "coeffs"}, "potential");
        if (!pot.contains("type") || !pot.at("type").is_string()) {
            throw Error(ErrorCode::ConfigError, "'potential.type' must be \"ideal\" or \"virial\"");
        }
        const auto type = pot.at("type").get<std::string>();
        if (type == "ideal") {
            if (pot.contains("coeffs") && !pot.at("coeffs").empty()) {
                throw Error(ErrorCode::ConfigError, "ideal potential takes no coefficients");
            }
            return GasConfig{gas, ideal_gas_potential(n)};
        }
        if (type != "virial") {
            throw Error(ErrorCode::ConfigError, fmt::format("unknown potential type '{}'", type));
        }
        std::vector<VirialCoefficient> coeffs;
        if (pot.contains("coeffs")) {
            const auto& list = pot.at("coeffs");
            if (!list.is_array()) throw Error(ErrorCode::ConfigError, "'potential.coeffs' must be an array");
            for (const auto& entry : list) {
                if (!entry.is_array()) {
                    throw Error(ErrorCode::ConfigError, "each virial coefficient must be an array of numbers");
                }
                std::vector<double> c;
                for (const auto& v : entry) {
                    if (!v.is_number()) {
                        throw Error(ErrorCode::ConfigError, "each virial coefficient must be an array of numbers");
                    }
                    c.push_back(v.get<double>());
                }
                coeffs.emplace_back(std::move(c));
            }
        }
        const auto m = coeffs.size();
        return GasConfig{gas, virial_potential(n, std::move(coeffs), m)};
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        throw Error(ErrorCode::ConfigError, e.what());
    }
}

GasConfig load_gas_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot read configuration file '{}'", path));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_gas_config(buffer.str());
}

GasConfig default_gas_config() {
    return GasConfig{GasParams::make(1.0, 3, 1.0, 1.0, 0.5), ideal_gas_potential(3)};
}

std::string gas_config_to_json(const GasConfig& config) {
    json doc;
    doc["R"] = config.gas.R();
    doc["n"] = config.gas.n();
    doc["k"] = config.gas.k();
    doc["g"] = config.gas.g();
    doc["lambda"] = config.gas.lambda();
    json pot;
    if (config.potential.kind() == PlanckPotential::Kind::IdealGas) {
        pot["type"] = "ideal";
    } else {
        pot["type"] = "virial";
        json list = json::array();
        for (const auto& a : config.potential.coefficients()) {
            list.push_back(std::vector<double>(a.coefficients().begin(), a.coefficients().end()));
        }
        pot["coeffs"] = list;
    }
    doc["potential"] = pot;
    return doc.dump();
}

} // namespace curveflow
