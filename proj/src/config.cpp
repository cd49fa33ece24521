#include "i2t/config.hpp"

#include "i2t/errors.hpp"

namespace i2t {

std::string to_string(AttackMode mode) {
    return mode == AttackMode::Untargeted ? "untargeted" : "targeted";
}

AttackMode attack_mode_from_string(const std::string& s) {
    if (s == "untargeted") return AttackMode::Untargeted;
    if (s == "targeted") return AttackMode::Targeted;
    throw Error(ErrorCode::InvalidArgument, "unknown attack mode '" + s + "'");
}

std::vector<ConfigViolation> validate_config(const AttackConfig& cfg) {
    std::vector<ConfigViolation> out;
    auto add = [&out](const char* code, const std::string& msg) { out.push_back({code, msg}); };

    if (!(cfg.epsilon > 0.0)) {
        add("epsilon_nonpositive", "epsilon must be > 0, got " + std::to_string(cfg.epsilon));
    } else if (cfg.epsilon > 1.0) {
        add("epsilon_above_one", "epsilon is a unit-domain budget and must be <= 1");
    }
    if (cfg.lam < 0.0) add("lam_negative", "lam must be >= 0");
    if (!(cfg.learning_rate > 0.0)) add("learning_rate_nonpositive", "learning_rate must be > 0");
    if (!(cfg.beta1 > 0.0 && cfg.beta1 < 1.0)) add("beta1_out_of_range", "beta1 must be in (0, 1)");
    if (!(cfg.beta2 > 0.0 && cfg.beta2 < 1.0)) add("beta2_out_of_range", "beta2 must be in (0, 1)");
    if (!(cfg.scheduler_factor > 0.0 && cfg.scheduler_factor < 1.0)) {
        add("factor_out_of_range", "scheduler_factor must be in (0, 1)");
    }
    if (cfg.scheduler_patience < 1) add("patience_nonpositive", "scheduler_patience must be >= 1");
    if (cfg.max_steps < 1) add("max_steps_nonpositive", "max_steps must be >= 1");
    if (cfg.min_learning_rate < 0.0) {
        add("min_learning_rate_negative", "min_learning_rate must be >= 0");
    }
    return out;
}

void to_json(nlohmann::json& j, const AttackConfig& cfg) {
    j = nlohmann::json{{"epsilon", cfg.epsilon},
                       {"lam", cfg.lam},
                       {"learning_rate", cfg.learning_rate},
                       {"beta1", cfg.beta1},
                       {"beta2", cfg.beta2},
                       {"scheduler_factor", cfg.scheduler_factor},
                       {"scheduler_patience", cfg.scheduler_patience},
                       {"max_steps", cfg.max_steps},
                       {"min_learning_rate", cfg.min_learning_rate},
                       {"mode", to_string(cfg.mode)},
                       {"seed", cfg.seed}};
}

void from_json(const nlohmann::json& j, AttackConfig& cfg) {
    j.at("epsilon").get_to(cfg.epsilon);
    j.at("lam").get_to(cfg.lam);
    j.at("learning_rate").get_to(cfg.learning_rate);
    j.at("beta1").get_to(cfg.beta1);
    j.at("beta2").get_to(cfg.beta2);
    j.at("scheduler_factor").get_to(cfg.scheduler_factor);
    j.at("scheduler_patience").get_to(cfg.scheduler_patience);
    j.at("max_steps").get_to(cfg.max_steps);
    j.at("min_learning_rate").get_to(cfg.min_learning_rate);
    cfg.mode = attack_mode_from_string(j.at("mode").get<std::string>());
    j.at("seed").get_to(cfg.seed);
}

}  // namespace i2t
