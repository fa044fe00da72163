#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "oprlab/numkit/adam.hpp"
#include "oprlab/numkit/mlp.hpp"
#include "oprlab/rng.hpp"

namespace oprlab::agent {

struct AgentConfig {
    std::vector<std::size_t> hidden_sizes{64, 64};
    numkit::Activation activation = numkit::Activation::tanh;
    bool shared_trunk = false;
    // Keeps the initial policy near-uniform so early exploration is entropy
    // driven; 1e-3 holds the initial entropy within 1e-6 of ln|A|.
    double policy_final_scale = 1e-3;
};

// Categorical actor-critic. With separate networks, policy_net maps
// observation -> action logits and value_net maps observation -> scalar.
// With a shared trunk, policy_net is trunk + policy head and value_net is a
// single linear layer reading the trunk's last hidden activation.
struct AgentParams {
    numkit::MlpParams policy_net;
    numkit::MlpParams value_net;
    bool shared_trunk = false;

    std::size_t obs_dim() const { return policy_net.input_dim(); }
    std::size_t action_count() const { return policy_net.output_dim(); }

    static AgentParams init(std::size_t obs_dim, std::size_t n_actions,
                            const AgentConfig& cfg, rng::Engine& engine);
};

struct AgentGrads {
    numkit::MlpGrads policy;
    numkit::MlpGrads value;
    void zero();
};

AgentGrads grads_like(const AgentParams& params);

// Both networks' Adam states; stepped together with a shared learning rate.
struct AgentOptimizer {
    numkit::AdamState policy;
    numkit::AdamState value;

    static AgentOptimizer for_params(const AgentParams& p, double beta1 = 0.9,
                                     double beta2 = 0.999, double eps = 1e-8);
    void step(AgentParams& params, const AgentGrads& grads, double lr);
};

struct ActionDecision {
    int action = 0;
    double log_prob = 0.0;  // log pi(action | state) at collection time
    double value = 0.0;     // critic estimate V(state)
    double entropy = 0.0;   // H(pi(. | state))
};

// Samples an action from softmax(logits) using the given engine (one
// uniform01 draw per call) and reports log-prob, value, and entropy.
ActionDecision act(const AgentParams& params, std::span<const double> state,
                   rng::Engine& engine);

// Critic estimate alone (used for truncation and batch-end bootstraps).
double value_only(const AgentParams& params, std::span<const double> state);

// Batched policy/value evaluation with the traces needed for backprop.
struct EvalBatch {
    std::vector<double> log_probs;
    std::vector<double> entropies;
    std::vector<double> values;
    std::vector<std::vector<double>> logprob_rows;
    std::vector<numkit::ForwardCache> policy_caches;
    std::vector<numkit::ForwardCache> value_caches;
    std::size_t size() const { return log_probs.size(); }
};

// states is row-major n x obs_dim. actions[i] must be in range.
// want_values=false skips the critic pass (used by the BC objective).
void evaluate(const AgentParams& params, const double* states, std::size_t n,
              std::size_t obs_dim, const int* actions, EvalBatch& out,
              bool want_values = true);

// Accumulates loss gradients into `acc`. dlogp, dentropy, dvalue hold the
// per-sample derivatives of the scalar loss w.r.t. log_probs[i],
// entropies[i], values[i]; empty spans are treated as zeros.
void evaluate_backward(const AgentParams& params, const double* states,
                       std::size_t n, std::size_t obs_dim, const int* actions,
                       const EvalBatch& batch, std::span<const double> dlogp,
                       std::span<const double> dentropy,
                       std::span<const double> dvalue, AgentGrads& acc);

}  // namespace oprlab::agent
