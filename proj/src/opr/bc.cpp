#include "oprlab/opr/bc.hpp"

namespace oprlab::opr {

double bc_loss(const agent::AgentParams& params, const double* states,
               std::size_t n, std::size_t obs_dim, const int* actions,
               agent::EvalBatch& eval, std::vector<double>& dlogp) {
    dlogp.clear();
    if (n == 0) return 0.0;
    agent::evaluate(params, states, n, obs_dim, actions, eval,
                    /*want_values=*/false);
    double loss = 0.0;
    for (double lp : eval.log_probs) loss -= lp;
    loss /= static_cast<double>(n);
    dlogp.assign(n, -1.0 / static_cast<double>(n));
    return loss;
}

}  // namespace oprlab::opr
