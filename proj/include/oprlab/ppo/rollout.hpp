#pragma once

#include <cstdint>
#include <vector>

namespace oprlab::ppo {

// Fixed-horizon on-policy data laid out as contiguous per-env segments
// (env-major). advantages / return_targets are readable only after
// compute_gae has run.
struct RolloutBatch {
    std::size_t steps = 0;    // T, total transitions in the batch
    std::size_t obs_dim = 0;

    std::vector<double> states;  // T x obs_dim, row-major
    std::vector<int> actions;
    std::vector<double> raw_rewards;
    std::vector<double> shaped_rewards;
    std::vector<double> old_log_probs;
    std::vector<double> values;
    std::vector<std::uint8_t> dones;       // episode boundary after step t
    std::vector<std::uint8_t> terminated;  // boundary was a true terminal
    // V(s_{t+1}) for every t: the next in-segment value while the episode
    // continues, the value of the post-step observation at a truncation or
    // segment end, and 0.0 at a true terminal.
    std::vector<double> next_values;
    std::vector<std::int64_t> state_keys;

    std::vector<double> advantages;
    std::vector<double> return_targets;
    bool gae_computed = false;

    // [env_segments[e], env_segments[e+1]) is env e's slice of the arrays.
    std::vector<std::size_t> env_segments{0};

    void clear(std::size_t obs_dimension);
    void push(const double* state, std::int64_t state_key, int action,
              double raw_reward, double old_log_prob, double value,
              bool done, bool was_terminal);
    void end_env_segment();
    const double* state_row(std::size_t t) const { return states.data() + t * obs_dim; }
};

}  // namespace oprlab::ppo
