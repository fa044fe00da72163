#pragma once

#include <span>
#include <vector>

#include "oprlab/agent/agent.hpp"
#include "oprlab/opr/buffer.hpp"
#include "oprlab/opr/shaping.hpp"
#include "oprlab/ppo/rollout.hpp"
#include "oprlab/rng.hpp"

namespace oprlab::ppo {

struct PpoConfig {
    double gamma = 0.99;
    double gae_lambda = 0.95;
    double clip_epsilon = 0.1;
    double entropy_coef = 0.01;
    double value_coef = 0.25;
    double max_grad_norm = 0.5;
    std::size_t minibatch_size = 64;
    std::size_t epochs_per_update = 4;
    bool normalize_advantages = true;
    // Open-question override: route buffer samples into the clipped surrogate
    // as well, using their recorded probabilities as pi_old and a
    // return-to-go advantage under the current critic.
    bool surrogate_augmentation = false;

    void validate() const;
};

// Backward-recursive GAE over each env segment:
//   delta_t = r_t + gamma * next_value_t - V_t       (next_value = 0 at terminals)
//   A_t     = delta_t + gamma * lambda * (1 - done_t) * A_{t+1}
// return_targets = advantages + values. Uses shaped_rewards (callers copy raw
// into shaped when shaping is off). Throws DomainError on an empty batch.
void compute_gae(RolloutBatch& batch, const PpoConfig& config);

struct SurrogateResult {
    double loss = 0.0;           // -mean_t min(r_t A_t, clip(r_t) A_t)
    double clip_fraction = 0.0;  // share of samples with |r_t - 1| > eps
    std::vector<double> dlogp;   // d(loss)/d(log_prob_t)
};

// Clipped surrogate objective, negated for minimization. Per-sample gradient
// is zero when the clipped branch is the active minimum. Throws
// NumericalError on NaN inputs.
SurrogateResult clipped_surrogate_loss(std::span<const double> log_probs,
                                       std::span<const double> old_log_probs,
                                       std::span<const double> advantages,
                                       double clip_epsilon);

// 0.5 * mean((V - target)^2).
double value_loss(std::span<const double> values,
                  std::span<const double> return_targets);

// surrogate - c_ent * entropy_mean (surrogate is already negated).
double actor_loss(double surrogate, double entropy_mean, const PpoConfig& config);

struct UpdateStats {
    double surrogate_loss = 0.0;
    double value_loss = 0.0;
    double entropy_mean = 0.0;   // mean entropy over evaluated minibatches
    double entropy_term = 0.0;   // -c_ent * entropy_mean
    double bc_loss = 0.0;        // mean over minibatches that carried BC
    double total_loss = 0.0;
    double clip_fraction = 0.0;
    double grad_norm = 0.0;      // mean pre-clip global norm
    std::size_t minibatches = 0;
    bool bc_applied = false;
};

// OPR state threaded through the update; null disables all OPR terms.
struct OprContext {
    const opr::GoodEpisodeBuffer* buffer = nullptr;
    const opr::OprConfig* config = nullptr;
    rng::Engine* bc_engine = nullptr;
    std::uint64_t update_index = 0;
    double ppo_gamma = 0.99;  // for return-to-go when surrogate_augmentation is on
};

// One PPO update over the batch: epochs_per_update passes of shuffled
// minibatches; per-minibatch advantage normalization; optional BC
// augmentation from the buffer; global gradient-norm clipping; Adam steps.
// Throws NumericalError (params left as at the failing minibatch boundary)
// if any loss component becomes non-finite.
UpdateStats ppo_update(agent::AgentParams& params, agent::AgentOptimizer& opt,
                       const RolloutBatch& batch, const PpoConfig& config,
                       const OprContext* opr_ctx, double learning_rate,
                       rng::Engine& shuffle_engine);

}  // namespace oprlab::ppo
