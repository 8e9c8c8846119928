// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "strgcl/error.hpp"

namespace strgcl {

/// `grace` trains the contrastive objective alone and never builds the rule
/// branch; `strgcl` always builds it, whatever the loss weights are.
enum class Method { strgcl, grace };

inline const char* to_string(Method m) noexcept { return m == Method::grace ? "grace" : "strgcl"; }

struct TrainConfig {
    std::string dataset;
    Method method = Method::strgcl;
    double tau = 0.5;
    double tau_rule = 0.4;
    double learning_rate = 1e-4;
    double weight_decay = 5e-4;
    std::size_t num_epochs = 300;
    std::size_t hidden_dim = 256;
    std::size_t mlp_hidden_dim = 128;
    std::string activation = "relu";
    double drop_edge_rate_1 = 0.3;
    double drop_edge_rate_2 = 0.2;
    double drop_feature_rate_1 = 0.4;
    double drop_feature_rate_2 = 0.2;
    double alpha_rule = 100.0;
    double alpha_cross = 1.0;
    std::size_t pca_dim = 128; // capped at min(N, F) when the graph is known
    std::size_t num_layers = 2;
    std::uint64_t seed = 0;

    void validate() const {
        auto rate = [](double p, const char* name) {
            require(p >= 0.0 && p <= 1.0, ErrorKind::config, std::string(name) + " must lie in [0,1]");
        };
        rate(drop_edge_rate_1, "drop_edge_rate_1");
        rate(drop_edge_rate_2, "drop_edge_rate_2");
        rate(drop_feature_rate_1, "drop_feature_rate_1");
        rate(drop_feature_rate_2, "drop_feature_rate_2");
        require(tau > 0.0 && std::isfinite(tau), ErrorKind::config, "tau must be positive");
        require(tau_rule > 0.0 && std::isfinite(tau_rule), ErrorKind::config, "tau_rule must be positive");
        require(learning_rate > 0.0, ErrorKind::config, "learning_rate must be positive");
        require(weight_decay >= 0.0, ErrorKind::config, "weight_decay must be non-negative");
        require(num_epochs >= 1, ErrorKind::config, "num_epochs must be at least 1");
        require(hidden_dim >= 1, ErrorKind::config, "hidden_dim must be positive");
        require(mlp_hidden_dim >= 1, ErrorKind::config, "mlp_hidden_dim must be positive");
        require(activation == "relu", ErrorKind::config, "only the relu activation is supported");
        require(alpha_rule >= 0.0 && alpha_cross >= 0.0, ErrorKind::config, "loss weights must be non-negative");
        require(pca_dim >= 1, ErrorKind::config, "pca_dim must be positive");
        require(num_layers == 1 || num_layers == 2, ErrorKind::config, "num_layers must be 1 or 2");
    }
};

inline nlohmann::json to_json(const TrainConfig& c) {
    return nlohmann::json{
        {"dataset", c.dataset},
        {"method", to_string(c.method)},
        {"tau", c.tau},
        {"tau_rule", c.tau_rule},
        {"learning_rate", c.learning_rate},
        {"weight_decay", c.weight_decay},
        {"num_epochs", c.num_epochs},
        {"hidden_dim", c.hidden_dim},
        {"mlp_hidden_dim", c.mlp_hidden_dim},
        {"activation", c.activation},
        {"drop_edge_rate_1", c.drop_edge_rate_1},
        {"drop_edge_rate_2", c.drop_edge_rate_2},
        {"drop_feature_rate_1", c.drop_feature_rate_1},
        {"drop_feature_rate_2", c.drop_feature_rate_2},
        {"alpha_rule", c.alpha_rule},
        {"alpha_cross", c.alpha_cross},
        {"pca_dim", c.pca_dim},
        {"num_layers", c.num_layers},
        {"seed", c.seed},
    };
}

/// Fields absent from `j` keep their defaults; unknown keys are rejected.
inline TrainConfig config_from_json(const nlohmann::json& j) {
    require(j.is_object(), ErrorKind::config, "config must be a JSON object");
    TrainConfig c;
    try {
        for (const auto& [key, val] : j.items()) {
            if (key == "dataset") c.dataset = val.get<std::string>();
            else if (key == "method") {
                const auto m = val.get<std::string>();
                require(m == "strgcl" || m == "grace", ErrorKind::config, "method must be \"strgcl\" or \"grace\"");
                c.method = m == "grace" ? Method::grace : Method::strgcl;
            }
            else if (key == "tau") c.tau = val.get<double>();
            else if (key == "tau_rule") c.tau_rule = val.get<double>();
            else if (key == "learning_rate") c.learning_rate = val.get<double>();
            else if (key == "weight_decay") c.weight_decay = val.get<double>();
            else if (key == "num_epochs") c.num_epochs = val.get<std::size_t>();
            else if (key == "hidden_dim") c.hidden_dim = val.get<std::size_t>();
            else if (key == "mlp_hidden_dim") c.mlp_hidden_dim = val.get<std::size_t>();
            else if (key == "activation") c.activation = val.get<std::string>();
            else if (key == "drop_edge_rate_1") c.drop_edge_rate_1 = val.get<double>();
            else if (key == "drop_edge_rate_2") c.drop_edge_rate_2 = val.get<double>();
            else if (key == "drop_feature_rate_1") c.drop_feature_rate_1 = val.get<double>();
            else if (key == "drop_feature_rate_2") c.drop_feature_rate_2 = val.get<double>();
            else if (key == "alpha_rule") c.alpha_rule = val.get<double>();
            else if (key == "alpha_cross") c.alpha_cross = val.get<double>();
            else if (key == "pca_dim") c.pca_dim = val.get<std::size_t>();
            else if (key == "num_layers") c.num_layers = val.get<std::size_t>();
            else if (key == "seed") c.seed = val.get<std::uint64_t>();
            else fail(ErrorKind::config, "unknown config key \"" + key + "\"");
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::config, std::string("bad config value: ") + e.what());
    }
    c.validate();
    return c;
}

inline TrainConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::config, "cannot open config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::config, path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

/// FNV-1a 64 over the canonical (sorted-key, compact) JSON form.
inline std::uint64_t fingerprint(const TrainConfig& c) {
    const std::string s = to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string fingerprint_hex(const TrainConfig& c) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fingerprint(c)));
    return buf;
}

} // namespace strgcl
