#include <cmath>

#include "oprlab/errors.hpp"
#include "oprlab/ppo/ppo.hpp"

namespace oprlab::ppo {

void PpoConfig::validate() const {
    if (gamma <= 0.0 || gamma > 1.0) throw ConfigError("ppo: gamma must be in (0, 1]");
    if (gae_lambda < 0.0 || gae_lambda > 1.0) {
        throw ConfigError("ppo: gae_lambda must be in [0, 1]");
    }
    if (clip_epsilon <= 0.0) throw ConfigError("ppo: clip_epsilon must be > 0");
    if (entropy_coef < 0.0 || value_coef < 0.0 || max_grad_norm < 0.0) {
        throw ConfigError("ppo: coefficients must be >= 0");
    }
    if (minibatch_size == 0) throw ConfigError("ppo: minibatch_size must be > 0");
    if (epochs_per_update == 0) throw ConfigError("ppo: epochs_per_update must be > 0");
}

void compute_gae(RolloutBatch& batch, const PpoConfig& config) {
    if (batch.steps == 0) throw DomainError("compute_gae: empty batch");
    batch.advantages.assign(batch.steps, 0.0);
    batch.return_targets.assign(batch.steps, 0.0);

    const double gamma = config.gamma;
    const double gl = config.gamma * config.gae_lambda;
    for (std::size_t seg = 0; seg + 1 < batch.env_segments.size(); ++seg) {
        const std::size_t lo = batch.env_segments[seg];
        const std::size_t hi = batch.env_segments[seg + 1];
        double a_next = 0.0;
        for (std::size_t i = hi; i-- > lo;) {
            const double delta = batch.shaped_rewards[i] +
                                 gamma * batch.next_values[i] - batch.values[i];
            const double mask = batch.dones[i] ? 0.0 : 1.0;
            a_next = delta + gl * mask * a_next;
            batch.advantages[i] = a_next;
            batch.return_targets[i] = a_next + batch.values[i];
        }
    }
    batch.gae_computed = true;
}

}  // namespace oprlab::ppo
