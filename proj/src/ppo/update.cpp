#include <cmath>
#include <numeric>

#include "oprlab/errors.hpp"
#include "oprlab/kernels.hpp"
#include "oprlab/opr/bc.hpp"
#include "oprlab/ppo/ppo.hpp"

namespace oprlab::ppo {
namespace {

double grad_sumsq(const numkit::MlpGrads& g) {
    const auto& k = kernels::ops();
    double s = 0.0;
    for (const auto& w : g.weights) s += k.sumsq(w.data.data(), w.size());
    for (const auto& b : g.biases) s += k.sumsq(b.data(), b.size());
    return s;
}

void grad_scale(numkit::MlpGrads& g, double a) {
    const auto& k = kernels::ops();
    for (auto& w : g.weights) k.scale(a, w.data.data(), w.size());
    for (auto& b : g.biases) k.scale(a, b.data(), b.size());
}

// Discounted return-to-go of a stored transition within its episode.
double return_to_go(const opr::Episode& e, std::size_t index, double gamma) {
    double g = 0.0;
    for (std::size_t j = e.transitions.size(); j-- > index;) {
        g = e.transitions[j].reward + gamma * g;
    }
    return g;
}

struct Gather {
    std::vector<double> states;
    std::vector<int> actions;
    std::vector<double> old_log_probs;
    std::vector<double> advantages;
    std::vector<double> targets;
    std::size_t count = 0;

    void clear() {
        states.clear();
        actions.clear();
        old_log_probs.clear();
        advantages.clear();
        targets.clear();
        count = 0;
    }
};

}  // namespace

UpdateStats ppo_update(agent::AgentParams& params, agent::AgentOptimizer& opt,
                       const RolloutBatch& batch, const PpoConfig& config,
                       const OprContext* opr_ctx, double learning_rate,
                       rng::Engine& shuffle_engine) {
    if (batch.steps == 0) throw DomainError("ppo_update: empty batch");
    if (!batch.gae_computed) throw UsageError("ppo_update: compute_gae first");

    const opr::OprConfig* oc =
        (opr_ctx && opr_ctx->config && opr_ctx->config->enabled) ? opr_ctx->config
                                                                 : nullptr;
    const bool bc_scheduled =
        oc && oc->bc_enabled && oc->lambda_bc > 0.0 && opr_ctx->buffer &&
        opr_ctx->buffer->transition_count() > 0 && opr_ctx->bc_engine &&
        (opr_ctx->update_index % oc->update_interval == 0);
    const bool aug_scheduled = bc_scheduled && config.surrogate_augmentation;

    std::vector<std::size_t> indices(batch.steps);
    std::iota(indices.begin(), indices.end(), 0);

    UpdateStats stats;
    double bc_sum = 0.0;
    std::size_t bc_batches = 0;
    agent::AgentGrads grads = agent::grads_like(params);
    agent::EvalBatch eval, bc_eval;
    Gather mb, rep;
    std::vector<double> dlogp, dentropy, dvalue, norm_adv, bc_dlogp;

    for (std::size_t epoch = 0; epoch < config.epochs_per_update; ++epoch) {
        shuffle_engine.shuffle(indices);
        const bool bc_this_epoch = bc_scheduled && epoch < oc->bc_epochs;
        for (std::size_t start = 0; start < batch.steps;
             start += config.minibatch_size) {
            const std::size_t end =
                std::min(batch.steps, start + config.minibatch_size);
            const std::size_t m = end - start;

            mb.clear();
            for (std::size_t k = start; k < end; ++k) {
                const std::size_t t = indices[k];
                const double* row = batch.state_row(t);
                mb.states.insert(mb.states.end(), row, row + batch.obs_dim);
                mb.actions.push_back(batch.actions[t]);
                mb.old_log_probs.push_back(batch.old_log_probs[t]);
                mb.advantages.push_back(batch.advantages[t]);
                mb.targets.push_back(batch.return_targets[t]);
            }

            norm_adv = mb.advantages;
            if (config.normalize_advantages) {
                double mean = 0.0;
                for (double a : norm_adv) mean += a;
                mean /= static_cast<double>(m);
                double var = 0.0;
                for (double a : norm_adv) var += (a - mean) * (a - mean);
                var /= static_cast<double>(m);
                const double std_floor = std::max(std::sqrt(var), 1e-8);
                for (double& a : norm_adv) a = (a - mean) / std_floor;
            }

            evaluate(params, mb.states.data(), m, batch.obs_dim,
                     mb.actions.data(), eval);

            SurrogateResult surr = clipped_surrogate_loss(
                eval.log_probs, mb.old_log_probs, norm_adv, config.clip_epsilon);
            const double vloss = value_loss(eval.values, mb.targets);
            double entropy_mb = 0.0;
            for (double h : eval.entropies) entropy_mb += h;
            entropy_mb /= static_cast<double>(m);
            const double aloss = actor_loss(surr.loss, entropy_mb, config);
            double mb_loss = aloss + config.value_coef * vloss;

            if (!std::isfinite(surr.loss)) {
                throw NumericalError("ppo_update: non-finite surrogate loss");
            }
            if (!std::isfinite(vloss)) {
                throw NumericalError("ppo_update: non-finite value loss");
            }
            if (!std::isfinite(entropy_mb)) {
                throw NumericalError("ppo_update: non-finite entropy");
            }

            grads.zero();
            dlogp = surr.dlogp;
            dentropy.assign(m, -config.entropy_coef / static_cast<double>(m));
            dvalue.resize(m);
            for (std::size_t i = 0; i < m; ++i) {
                dvalue[i] = config.value_coef * (eval.values[i] - mb.targets[i]) /
                            static_cast<double>(m);
            }
            evaluate_backward(params, mb.states.data(), m, batch.obs_dim,
                              mb.actions.data(), eval, dlogp, dentropy, dvalue,
                              grads);

            if (bc_this_epoch) {
                const std::size_t want =
                    std::min(opr_ctx->buffer->transition_count(),
                             config.minibatch_size);
                auto sample =
                    opr_ctx->buffer->sample_transitions(want, *opr_ctx->bc_engine);
                rep.clear();
                for (const auto& ref : sample) {
                    const auto& t = ref.transition();
                    rep.states.insert(rep.states.end(), t.state.begin(),
                                      t.state.end());
                    rep.actions.push_back(t.action);
                    rep.old_log_probs.push_back(t.behavior_log_prob);
                    if (aug_scheduled) {
                        rep.advantages.push_back(return_to_go(
                            *ref.episode, ref.index, opr_ctx->ppo_gamma));
                    }
                }
                const std::size_t bn = rep.actions.size();
                double bc = opr::bc_loss(params, rep.states.data(), bn,
                                         batch.obs_dim, rep.actions.data(),
                                         bc_eval, bc_dlogp);
                if (!std::isfinite(bc)) {
                    throw NumericalError("ppo_update: non-finite BC loss");
                }
                mb_loss += oc->lambda_bc * bc;
                bc_sum += bc;
                ++bc_batches;

                for (double& d : bc_dlogp) d *= oc->lambda_bc;
                if (aug_scheduled) {
                    agent::evaluate(params, rep.states.data(), bn, batch.obs_dim,
                                    rep.actions.data(), bc_eval,
                                    /*want_values=*/true);
                    // Replayed samples also enter the surrogate: recorded
                    // behavior probs as pi_old, return-to-go minus the
                    // current critic as a (constant) advantage.
                    for (std::size_t i = 0; i < bn; ++i) {
                        rep.advantages[i] -= bc_eval.values[i];
                    }
                    SurrogateResult rsurr = clipped_surrogate_loss(
                        bc_eval.log_probs, rep.old_log_probs, rep.advantages,
                        config.clip_epsilon);
                    mb_loss += rsurr.loss;
                    for (std::size_t i = 0; i < bn; ++i) {
                        bc_dlogp[i] += rsurr.dlogp[i];
                    }
                }
                evaluate_backward(params, rep.states.data(), bn, batch.obs_dim,
                                  rep.actions.data(), bc_eval, bc_dlogp, {}, {},
                                  grads);
            }

            double norm = std::sqrt(grad_sumsq(grads.policy) +
                                    grad_sumsq(grads.value));
            if (!std::isfinite(norm)) {
                throw NumericalError("ppo_update: non-finite gradient");
            }
            if (config.max_grad_norm > 0.0 && norm > config.max_grad_norm) {
                const double s = config.max_grad_norm / norm;
                grad_scale(grads.policy, s);
                grad_scale(grads.value, s);
            }
            opt.step(params, grads, learning_rate);

            stats.surrogate_loss += surr.loss;
            stats.value_loss += vloss;
            stats.entropy_mean += entropy_mb;
            stats.clip_fraction += surr.clip_fraction;
            stats.total_loss += mb_loss;
            stats.grad_norm += norm;
            stats.minibatches += 1;
        }
    }

    const double inv = 1.0 / static_cast<double>(stats.minibatches);
    stats.surrogate_loss *= inv;
    stats.value_loss *= inv;
    stats.entropy_mean *= inv;
    stats.clip_fraction *= inv;
    stats.total_loss *= inv;
    stats.grad_norm *= inv;
    stats.entropy_term = -config.entropy_coef * stats.entropy_mean;
    stats.bc_applied = bc_batches > 0;
    stats.bc_loss = bc_batches > 0 ? bc_sum / static_cast<double>(bc_batches) : 0.0;
    return stats;
}

}  // namespace oprlab::ppo
