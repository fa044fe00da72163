#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "oprlab/envs/env.hpp"
#include "oprlab/opr/shaping.hpp"
#include "oprlab/ppo/ppo.hpp"

namespace oprlab::harness {

// Full experiment description. Parsed from a flat `key = value` text file;
// see configs/reference.cfg for every key and its default.
struct ExperimentConfig {
    // environment
    std::string env_name = "deep_chain";
    envs::EnvParams env_params;

    // run shape
    std::uint64_t seed = 1;
    std::size_t total_steps = 300000;
    std::size_t steps_per_update = 2048;
    std::size_t num_envs = 4;
    std::string out_dir = "runs/latest";
    std::size_t checkpoint_interval = 0;  // updates between checkpoints; 0 = final only

    // agent
    std::vector<std::size_t> hidden_sizes{64, 64};
    std::string activation = "tanh";
    bool shared_trunk = false;
    double policy_final_scale = 1e-3;

    // optimizer
    double learning_rate = 2.5e-4;
    bool lr_linear_decay = true;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;

    ppo::PpoConfig ppo;
    opr::OprConfig opr;

    // comparison thresholds; NaN = derive from the env's optimal return
    double compare_threshold = std::numeric_limits<double>::quiet_NaN();
    double goal_return = std::numeric_limits<double>::quiet_NaN();

    std::string kernel_backend = "auto";  // auto | scalar | avx2

    void validate() const;
    std::size_t planned_updates() const {
        return steps_per_update == 0 ? 0 : total_steps / steps_per_update;
    }
};

// Throws ConfigError on unknown keys, malformed values, or invalid settings.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_stream(std::istream& is, const std::string& origin);

// Canonical echo of every setting, itself parseable as a config file.
void write_config_echo(std::ostream& os, const ExperimentConfig& cfg);

}  // namespace oprlab::harness
