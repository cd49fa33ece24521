#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace i2t {

enum class AttackMode { Untargeted, Targeted };

std::string to_string(AttackMode mode);
AttackMode attack_mode_from_string(const std::string& s);

/// All optimization hyperparameters for one attack run.
struct AttackConfig {
    double epsilon = 0.05;          // L-inf budget in the unit pixel domain
    double lam = 0.1;               // weight of the image-similarity term
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double scheduler_factor = 0.1;
    int scheduler_patience = 30;    // steps without improvement before decay
    int max_steps = 1000;
    double min_learning_rate = 1e-5;  // early-stop floor
    AttackMode mode = AttackMode::Untargeted;
    std::int64_t seed = 0;

    bool operator==(const AttackConfig&) const = default;
};

/// One violated AttackConfig invariant.
struct ConfigViolation {
    std::string code;     // machine-readable, e.g. "epsilon_nonpositive"
    std::string message;

    bool operator==(const ConfigViolation&) const = default;
};

/// Returns every invariant violation; empty iff the config is valid.
std::vector<ConfigViolation> validate_config(const AttackConfig& cfg);

void to_json(nlohmann::json& j, const AttackConfig& cfg);
void from_json(const nlohmann::json& j, AttackConfig& cfg);

}  // namespace i2t
