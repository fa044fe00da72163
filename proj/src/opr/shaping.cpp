#include "oprlab/opr/shaping.hpp"

#include <cmath>

#include "oprlab/errors.hpp"

namespace oprlab::opr {

void OprConfig::validate() const {
    if (alpha < 0.0) throw ConfigError("opr: alpha must be >= 0");
    if (delta <= 0.0) throw ConfigError("opr: delta must be > 0");
    if (lambda_bc < 0.0) throw ConfigError("opr: lambda_bc must be >= 0");
    if (buffer_capacity == 0) throw ConfigError("opr: buffer capacity must be > 0");
    if (good_percentile < 0.0 || good_percentile > 100.0) {
        throw ConfigError("opr: percentile must be in [0, 100]");
    }
    if (return_window == 0) throw ConfigError("opr: return window must be > 0");
    if (update_interval == 0) throw ConfigError("opr: update interval must be > 0");
}

double directional_delta(double good_log_prob, double current_log_prob) {
    return good_log_prob - current_log_prob;
}

double bound_delta(double delta, double bound) {
    const double smooth = 2.0 * std::tanh(delta / 2.0);
    if (smooth > bound) return bound;
    if (smooth < -bound) return -bound;
    return smooth;
}

double shape_reward(double raw_reward, double bounded_delta, double alpha) {
    return raw_reward * (1.0 + alpha * bounded_delta);
}

double shape_rollout(ppo::RolloutBatch& batch, const GoodEpisodeBuffer& buffer,
                     const OprConfig& config) {
    batch.shaped_rewards = batch.raw_rewards;
    if (!config.enabled || !config.shaping_enabled || config.alpha == 0.0 ||
        batch.steps == 0) {
        return 0.0;
    }

    double abs_delta_sum = 0.0;
    for (std::size_t t = 0; t < batch.steps; ++t) {
        const auto good = buffer.lookup_good_log_prob(batch.state_keys[t],
                                                      batch.actions[t]);
        if (!good) continue;
        const double d = directional_delta(*good, batch.old_log_probs[t]);
        const double bd = bound_delta(d, config.delta);
        batch.shaped_rewards[t] = shape_reward(batch.raw_rewards[t], bd,
                                               config.alpha);
        abs_delta_sum += std::abs(bd);
    }
    return abs_delta_sum / static_cast<double>(batch.steps);
}

double total_loss(double actor_loss, double bc_loss, double lambda_bc) {
    return actor_loss + lambda_bc * bc_loss;
}

}  // namespace oprlab::opr
