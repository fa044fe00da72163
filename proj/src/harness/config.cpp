#include "oprlab/harness/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "oprlab/errors.hpp"

namespace oprlab::harness {
namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

std::uint64_t parse_count(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size() || d < 0) throw std::invalid_argument(v);
        return static_cast<std::uint64_t>(d);
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
    }
}

std::vector<std::size_t> parse_size_list(const std::string& v, const std::string& key) {
    std::vector<std::size_t> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(static_cast<std::size_t>(parse_count(item, key)));
    }
    if (out.empty()) throw ConfigError(key + ": expected a comma-separated list");
    return out;
}

void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "env") cfg.env_name = value;
    else if (key.rfind("env.", 0) == 0) cfg.env_params[key.substr(4)] = value;
    else if (key == "seed") cfg.seed = parse_count(value, key);
    else if (key == "total_steps") cfg.total_steps = parse_count(value, key);
    else if (key == "steps_per_update") cfg.steps_per_update = parse_count(value, key);
    else if (key == "num_envs") cfg.num_envs = parse_count(value, key);
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "checkpoint_interval") cfg.checkpoint_interval = parse_count(value, key);
    else if (key == "hidden_sizes") cfg.hidden_sizes = parse_size_list(value, key);
    else if (key == "activation") cfg.activation = value;
    else if (key == "shared_trunk") cfg.shared_trunk = parse_bool(value, key);
    else if (key == "policy_final_scale") cfg.policy_final_scale = parse_double(value, key);
    else if (key == "learning_rate") cfg.learning_rate = parse_double(value, key);
    else if (key == "lr_linear_decay") cfg.lr_linear_decay = parse_bool(value, key);
    else if (key == "adam_beta1") cfg.adam_beta1 = parse_double(value, key);
    else if (key == "adam_beta2") cfg.adam_beta2 = parse_double(value, key);
    else if (key == "adam_epsilon") cfg.adam_epsilon = parse_double(value, key);
    else if (key == "gamma") cfg.ppo.gamma = parse_double(value, key);
    else if (key == "gae_lambda") cfg.ppo.gae_lambda = parse_double(value, key);
    else if (key == "clip_epsilon") cfg.ppo.clip_epsilon = parse_double(value, key);
    else if (key == "entropy_coef") cfg.ppo.entropy_coef = parse_double(value, key);
    else if (key == "value_coef") cfg.ppo.value_coef = parse_double(value, key);
    else if (key == "max_grad_norm") cfg.ppo.max_grad_norm = parse_double(value, key);
    else if (key == "minibatch_size") cfg.ppo.minibatch_size = parse_count(value, key);
    else if (key == "epochs_per_update") cfg.ppo.epochs_per_update = parse_count(value, key);
    else if (key == "normalize_advantages") cfg.ppo.normalize_advantages = parse_bool(value, key);
    else if (key == "surrogate_augmentation") cfg.ppo.surrogate_augmentation = parse_bool(value, key);
    else if (key == "opr_enabled") cfg.opr.enabled = parse_bool(value, key);
    else if (key == "buffer_capacity") cfg.opr.buffer_capacity = parse_count(value, key);
    else if (key == "good_percentile") cfg.opr.good_percentile = parse_double(value, key);
    else if (key == "return_window") cfg.opr.return_window = parse_count(value, key);
    else if (key == "shaping_alpha") cfg.opr.alpha = parse_double(value, key);
    else if (key == "shaping_delta") cfg.opr.delta = parse_double(value, key);
    else if (key == "lambda_bc") cfg.opr.lambda_bc = parse_double(value, key);
    else if (key == "bc_epochs") cfg.opr.bc_epochs = parse_count(value, key);
    else if (key == "bc_update_interval") cfg.opr.update_interval = parse_count(value, key);
    else if (key == "shaping_enabled") cfg.opr.shaping_enabled = parse_bool(value, key);
    else if (key == "bc_enabled") cfg.opr.bc_enabled = parse_bool(value, key);
    else if (key == "compare_threshold") cfg.compare_threshold = parse_double(value, key);
    else if (key == "goal_return") cfg.goal_return = parse_double(value, key);
    else if (key == "kernel_backend") cfg.kernel_backend = value;
    else throw ConfigError("unknown config key: " + key);
}

}  // namespace

void ExperimentConfig::validate() const {
    if (num_envs == 0) throw ConfigError("num_envs must be > 0");
    if (steps_per_update == 0) throw ConfigError("steps_per_update must be > 0");
    if (steps_per_update % num_envs != 0) {
        throw ConfigError("steps_per_update must be divisible by num_envs");
    }
    if (steps_per_update % ppo.minibatch_size != 0) {
        throw ConfigError("steps_per_update must be divisible by minibatch_size");
    }
    if (learning_rate < 0.0) throw ConfigError("learning_rate must be >= 0");
    if (policy_final_scale < 0.0) throw ConfigError("policy_final_scale must be >= 0");
    if (hidden_sizes.empty()) throw ConfigError("hidden_sizes must be non-empty");
    if (kernel_backend != "auto" && kernel_backend != "scalar" &&
        kernel_backend != "avx2") {
        throw ConfigError("kernel_backend must be auto, scalar, or avx2");
    }
    numkit::activation_from_name(activation);
    ppo.validate();
    opr.validate();
    envs::make_env(env_name, env_params);  // validates name and parameters
}

ExperimentConfig parse_config_stream(std::istream& is, const std::string& origin) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        }
        try {
            apply_key(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config file: " + path);
    return parse_config_stream(f, path);
}

void write_config_echo(std::ostream& os, const ExperimentConfig& cfg) {
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    os << "env = " << cfg.env_name << "\n";
    for (const auto& [k, v] : cfg.env_params) os << "env." << k << " = " << v << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "total_steps = " << cfg.total_steps << "\n";
    os << "steps_per_update = " << cfg.steps_per_update << "\n";
    os << "num_envs = " << cfg.num_envs << "\n";
    os << "checkpoint_interval = " << cfg.checkpoint_interval << "\n";
    os << "hidden_sizes = ";
    for (std::size_t i = 0; i < cfg.hidden_sizes.size(); ++i) {
        os << (i ? "," : "") << cfg.hidden_sizes[i];
    }
    os << "\n";
    os << "activation = " << cfg.activation << "\n";
    os << "shared_trunk = " << (cfg.shared_trunk ? "true" : "false") << "\n";
    os << "policy_final_scale = " << num(cfg.policy_final_scale) << "\n";
    os << "learning_rate = " << num(cfg.learning_rate) << "\n";
    os << "lr_linear_decay = " << (cfg.lr_linear_decay ? "true" : "false") << "\n";
    os << "adam_beta1 = " << num(cfg.adam_beta1) << "\n";
    os << "adam_beta2 = " << num(cfg.adam_beta2) << "\n";
    os << "adam_epsilon = " << num(cfg.adam_epsilon) << "\n";
    os << "gamma = " << num(cfg.ppo.gamma) << "\n";
    os << "gae_lambda = " << num(cfg.ppo.gae_lambda) << "\n";
    os << "clip_epsilon = " << num(cfg.ppo.clip_epsilon) << "\n";
    os << "entropy_coef = " << num(cfg.ppo.entropy_coef) << "\n";
    os << "value_coef = " << num(cfg.ppo.value_coef) << "\n";
    os << "max_grad_norm = " << num(cfg.ppo.max_grad_norm) << "\n";
    os << "minibatch_size = " << cfg.ppo.minibatch_size << "\n";
    os << "epochs_per_update = " << cfg.ppo.epochs_per_update << "\n";
    os << "normalize_advantages = " << (cfg.ppo.normalize_advantages ? "true" : "false") << "\n";
    os << "surrogate_augmentation = " << (cfg.ppo.surrogate_augmentation ? "true" : "false") << "\n";
    os << "opr_enabled = " << (cfg.opr.enabled ? "true" : "false") << "\n";
    os << "buffer_capacity = " << cfg.opr.buffer_capacity << "\n";
    os << "good_percentile = " << num(cfg.opr.good_percentile) << "\n";
    os << "return_window = " << cfg.opr.return_window << "\n";
    os << "shaping_alpha = " << num(cfg.opr.alpha) << "\n";
    os << "shaping_delta = " << num(cfg.opr.delta) << "\n";
    os << "lambda_bc = " << num(cfg.opr.lambda_bc) << "\n";
    os << "bc_epochs = " << cfg.opr.bc_epochs << "\n";
    os << "bc_update_interval = " << cfg.opr.update_interval << "\n";
    os << "shaping_enabled = " << (cfg.opr.shaping_enabled ? "true" : "false") << "\n";
    os << "bc_enabled = " << (cfg.opr.bc_enabled ? "true" : "false") << "\n";
    if (!std::isnan(cfg.compare_threshold)) {
        os << "compare_threshold = " << num(cfg.compare_threshold) << "\n";
    }
    if (!std::isnan(cfg.goal_return)) {
        os << "goal_return = " << num(cfg.goal_return) << "\n";
    }
    os << "kernel_backend = " << cfg.kernel_backend << "\n";
}

}  // namespace oprlab::harness
