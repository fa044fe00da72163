#pragma once

#include "oprlab/opr/buffer.hpp"
#include "oprlab/ppo/rollout.hpp"

namespace oprlab::opr {

struct OprConfig {
    bool enabled = true;
    double alpha = 0.5;          // shaping scale
    double delta = 0.01;         // shaping bound
    double lambda_bc = 1.0;      // BC weight
    std::size_t bc_epochs = 3;   // optimization epochs that carry BC batches
    std::size_t update_interval = 50;  // updates between BC applications
    bool shaping_enabled = true;
    bool bc_enabled = true;
    std::size_t buffer_capacity = 100;  // N_max, transitions
    double good_percentile = 75.0;      // P
    std::size_t return_window = 100;    // K

    void validate() const;
};

// delta_t = log pi_good(a|s) - log pi_theta(a|s). Positive when the
// historically successful policy preferred the action more.
double directional_delta(double good_log_prob, double current_log_prob);

// delta_tilde = clip(2*tanh(delta/2), -bound, +bound).
double bound_delta(double delta, double bound);

// r_opr = r * (1 + alpha * delta_tilde).
double shape_reward(double raw_reward, double bounded_delta, double alpha);

// Fills batch.shaped_rewards. Matched transitions (by state key and action)
// use the rollout's own old_log_prob as log pi_theta; unmatched transitions
// keep the raw reward. Raw rewards are never modified. Returns the mean
// |delta_tilde| over the batch (0 contribution from unmatched transitions).
double shape_rollout(ppo::RolloutBatch& batch, const GoodEpisodeBuffer& buffer,
                     const OprConfig& config);

// L_total = L_actor + lambda_bc * L_bc.
double total_loss(double actor_loss, double bc_loss, double lambda_bc);

}  // namespace oprlab::opr
