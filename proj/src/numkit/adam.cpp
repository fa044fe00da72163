#include "oprlab/numkit/adam.hpp"

#include <cmath>

#include "oprlab/errors.hpp"
#include "oprlab/kernels.hpp"

namespace oprlab::numkit {

AdamState AdamState::for_params(const MlpParams& params, double beta1,
                                double beta2, double epsilon) {
    AdamState s;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.epsilon = epsilon;
    s.first_moment = grads_like(params);
    s.second_moment = grads_like(params);
    return s;
}

void adam_step(MlpParams& params, const MlpGrads& grads, AdamState& state,
               double learning_rate) {
    if (grads.weights.size() != params.num_layers()) {
        throw ShapeError("adam_step: gradient shape mismatch");
    }
    for (std::size_t i = 0; i < params.num_layers(); ++i) {
        if (!grads.weights[i].same_shape(params.weights[i]) ||
            grads.biases[i].size() != params.biases[i].size()) {
            throw ShapeError("adam_step: gradient shape mismatch at layer " +
                             std::to_string(i));
        }
        if (!all_finite(grads.weights[i]) || !all_finite(grads.biases[i])) {
            throw NumericalError("adam_step: non-finite gradient at layer " +
                                 std::to_string(i) + "; update aborted");
        }
    }

    state.step_count += 1;
    const double t = static_cast<double>(state.step_count);
    const double inv_bc1 = 1.0 / (1.0 - std::pow(state.beta1, t));
    const double inv_bc2 = 1.0 / (1.0 - std::pow(state.beta2, t));

    const auto& k = kernels::ops();
    for (std::size_t i = 0; i < params.num_layers(); ++i) {
        k.adam_update(params.weights[i].data.data(),
                      state.first_moment.weights[i].data.data(),
                      state.second_moment.weights[i].data.data(),
                      grads.weights[i].data.data(), params.weights[i].size(),
                      state.beta1, state.beta2, state.epsilon, learning_rate,
                      inv_bc1, inv_bc2);
        k.adam_update(params.biases[i].data(),
                      state.first_moment.biases[i].data(),
                      state.second_moment.biases[i].data(),
                      grads.biases[i].data(), params.biases[i].size(),
                      state.beta1, state.beta2, state.epsilon, learning_rate,
                      inv_bc1, inv_bc2);
    }
}

}  // namespace oprlab::numkit
