#include "oprlab/agent/agent.hpp"

#include <cmath>

#include "oprlab/errors.hpp"
#include "oprlab/numkit/softmax.hpp"

namespace oprlab::agent {

using numkit::ForwardCache;
using numkit::MlpParams;

AgentParams AgentParams::init(std::size_t obs_dim, std::size_t n_actions,
                              const AgentConfig& cfg, rng::Engine& engine) {
    if (n_actions < 2) throw ConfigError("agent needs at least 2 actions");
    std::vector<std::size_t> policy_sizes;
    policy_sizes.push_back(obs_dim);
    for (std::size_t h : cfg.hidden_sizes) policy_sizes.push_back(h);
    policy_sizes.push_back(n_actions);

    AgentParams p;
    p.shared_trunk = cfg.shared_trunk;
    p.policy_net = MlpParams::glorot(policy_sizes, cfg.activation, engine,
                                     cfg.policy_final_scale);
    if (cfg.shared_trunk) {
        if (cfg.hidden_sizes.empty()) {
            throw ConfigError("shared trunk requires at least one hidden layer");
        }
        p.value_net = MlpParams::glorot({cfg.hidden_sizes.back(), 1},
                                        cfg.activation, engine);
    } else {
        std::vector<std::size_t> value_sizes = policy_sizes;
        value_sizes.back() = 1;
        p.value_net = MlpParams::glorot(value_sizes, cfg.activation, engine);
    }
    return p;
}

void AgentGrads::zero() {
    policy.zero();
    value.zero();
}

AgentGrads grads_like(const AgentParams& params) {
    return AgentGrads{numkit::grads_like(params.policy_net),
                      numkit::grads_like(params.value_net)};
}

AgentOptimizer AgentOptimizer::for_params(const AgentParams& p, double beta1,
                                          double beta2, double eps) {
    return AgentOptimizer{
        numkit::AdamState::for_params(p.policy_net, beta1, beta2, eps),
        numkit::AdamState::for_params(p.value_net, beta1, beta2, eps)};
}

void AgentOptimizer::step(AgentParams& params, const AgentGrads& grads, double lr) {
    numkit::adam_step(params.policy_net, grads.policy, policy, lr);
    numkit::adam_step(params.value_net, grads.value, value, lr);
}

namespace {

// Critic forward; for shared trunks the value head reads the policy cache's
// last hidden activation, which must already be populated.
double value_forward(const AgentParams& params, std::span<const double> state,
                     const ForwardCache& policy_cache, ForwardCache& value_cache,
                     std::vector<double>& scratch) {
    if (params.shared_trunk) {
        const auto& hidden = policy_cache.post[params.policy_net.num_layers() - 1];
        numkit::mlp_forward(params.value_net, hidden, value_cache, scratch);
    } else {
        numkit::mlp_forward(params.value_net, state, value_cache, scratch);
    }
    return scratch[0];
}

}  // namespace

ActionDecision act(const AgentParams& params, std::span<const double> state,
                   rng::Engine& engine) {
    ForwardCache pcache, vcache;
    std::vector<double> logits, logprobs, scratch;
    numkit::mlp_forward(params.policy_net, state, pcache, logits);
    numkit::softmax_logprobs(logits, logprobs);

    const double u = engine.uniform01();
    int action = static_cast<int>(logprobs.size()) - 1;
    double cum = 0.0;
    for (std::size_t i = 0; i < logprobs.size(); ++i) {
        cum += std::exp(logprobs[i]);
        if (u < cum) {
            action = static_cast<int>(i);
            break;
        }
    }

    ActionDecision d;
    d.action = action;
    d.log_prob = logprobs[static_cast<std::size_t>(action)];
    d.entropy = numkit::entropy_from_logprobs(logprobs);
    d.value = value_forward(params, state, pcache, vcache, scratch);
    return d;
}

double value_only(const AgentParams& params, std::span<const double> state) {
    ForwardCache pcache, vcache;
    std::vector<double> scratch;
    if (params.shared_trunk) {
        numkit::mlp_forward(params.policy_net, state, pcache, scratch);
    }
    return value_forward(params, state, pcache, vcache, scratch);
}

void evaluate(const AgentParams& params, const double* states, std::size_t n,
              std::size_t obs_dim, const int* actions, EvalBatch& out,
              bool want_values) {
    if (obs_dim != params.obs_dim()) throw ShapeError("evaluate: obs_dim mismatch");
    const int n_actions = static_cast<int>(params.action_count());
    out.log_probs.resize(n);
    out.entropies.resize(n);
    out.values.assign(n, 0.0);
    out.logprob_rows.resize(n);
    out.policy_caches.resize(n);
    out.value_caches.resize(n);

    std::vector<double> logits, scratch;
    for (std::size_t i = 0; i < n; ++i) {
        const int a = actions[i];
        if (a < 0 || a >= n_actions) {
            throw DomainError("evaluate: action index " + std::to_string(a) +
                              " out of range");
        }
        std::span<const double> row(states + i * obs_dim, obs_dim);
        numkit::mlp_forward(params.policy_net, row, out.policy_caches[i], logits);
        numkit::softmax_logprobs(logits, out.logprob_rows[i]);
        out.log_probs[i] = out.logprob_rows[i][static_cast<std::size_t>(a)];
        out.entropies[i] = numkit::entropy_from_logprobs(out.logprob_rows[i]);
        if (want_values) {
            out.values[i] = value_forward(params, row, out.policy_caches[i],
                                          out.value_caches[i], scratch);
        }
    }
}

void evaluate_backward(const AgentParams& params, const double* states,
                       std::size_t n, std::size_t obs_dim, const int* actions,
                       const EvalBatch& batch, std::span<const double> dlogp,
                       std::span<const double> dentropy,
                       std::span<const double> dvalue, AgentGrads& acc) {
    if (batch.size() != n) throw ShapeError("evaluate_backward: batch size mismatch");
    std::vector<double> dlogits(params.action_count());
    std::vector<double> dval(1);
    std::vector<double> hidden_grad;
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(dlogits.begin(), dlogits.end(), 0.0);
        const auto& row = batch.logprob_rows[i];
        if (!dlogp.empty() && dlogp[i] != 0.0) {
            numkit::logprob_backward(row, actions[i], dlogp[i], dlogits);
        }
        if (!dentropy.empty() && dentropy[i] != 0.0) {
            numkit::entropy_backward(row, batch.entropies[i], dentropy[i], dlogits);
        }

        const bool want_value = !dvalue.empty() && dvalue[i] != 0.0;
        hidden_grad.clear();
        if (want_value) {
            dval[0] = dvalue[i];
            if (params.shared_trunk) {
                numkit::mlp_backward(params.value_net, batch.value_caches[i], dval,
                                     acc.value, &hidden_grad);
            } else {
                numkit::mlp_backward(params.value_net, batch.value_caches[i], dval,
                                     acc.value);
            }
        }
        numkit::mlp_backward(params.policy_net, batch.policy_caches[i], dlogits,
                             acc.policy, nullptr, hidden_grad);
        (void)states;
        (void)obs_dim;
    }
}

}  // namespace oprlab::agent
