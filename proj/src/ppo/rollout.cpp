#include "oprlab/ppo/rollout.hpp"

#include "oprlab/errors.hpp"

namespace oprlab::ppo {

void RolloutBatch::clear(std::size_t obs_dimension) {
    steps = 0;
    obs_dim = obs_dimension;
    states.clear();
    actions.clear();
    raw_rewards.clear();
    shaped_rewards.clear();
    old_log_probs.clear();
    values.clear();
    dones.clear();
    terminated.clear();
    next_values.clear();
    state_keys.clear();
    advantages.clear();
    return_targets.clear();
    gae_computed = false;
    env_segments.assign(1, 0);
}

void RolloutBatch::push(const double* state, std::int64_t state_key, int action,
                        double raw_reward, double old_log_prob, double value,
                        bool done, bool was_terminal) {
    states.insert(states.end(), state, state + obs_dim);
    state_keys.push_back(state_key);
    actions.push_back(action);
    raw_rewards.push_back(raw_reward);
    shaped_rewards.push_back(raw_reward);
    old_log_probs.push_back(old_log_prob);
    values.push_back(value);
    dones.push_back(done ? 1 : 0);
    terminated.push_back(was_terminal ? 1 : 0);
    next_values.push_back(0.0);  // finalized by the collector
    steps += 1;
}

void RolloutBatch::end_env_segment() {
    if (env_segments.back() > steps) throw UsageError("rollout: bad segment order");
    env_segments.push_back(steps);
}

}  // namespace oprlab::ppo
