#pragma once

#include "oprlab/agent/agent.hpp"
#include "oprlab/opr/buffer.hpp"

namespace oprlab::opr {

// Behavioral cloning over buffer samples: negative mean log-likelihood of the
// stored actions under the current policy. Fills `eval` (policy pass only)
// so callers can backpropagate; dlogp receives d(loss)/d(log_prob_i) = -1/n.
// An empty sample is a no-op contribution (loss 0, empty gradients).
double bc_loss(const agent::AgentParams& params, const double* states,
               std::size_t n, std::size_t obs_dim, const int* actions,
               agent::EvalBatch& eval, std::vector<double>& dlogp);

}  // namespace oprlab::opr
