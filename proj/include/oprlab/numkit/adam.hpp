#pragma once

#include <cstdint>

#include "oprlab/numkit/mlp.hpp"

namespace oprlab::numkit {

// Adam state for one MlpParams. Moment tensors mirror the parameter shapes.
struct AdamState {
    std::uint64_t step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    MlpGrads first_moment;
    MlpGrads second_moment;

    static AdamState for_params(const MlpParams& params, double beta1 = 0.9,
                                double beta2 = 0.999, double epsilon = 1e-8);
};

// In-place Adam update with bias correction. Rejects non-finite gradients
// with NumericalError before touching params or state.
void adam_step(MlpParams& params, const MlpGrads& grads, AdamState& state,
               double learning_rate);

}  // namespace oprlab::numkit
