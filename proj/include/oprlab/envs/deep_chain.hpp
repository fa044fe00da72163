#pragma once

#include "oprlab/envs/env.hpp"

namespace oprlab::envs {

// Chain of length N with a local-optimum trap. Actions: 0 = left, 1 = right.
// Right advances one position; left resets to position 0 and pays 0.01
// immediately. Reaching position N pays 10 and terminates. Horizon 2N.
class DeepChain final : public Env {
public:
    explicit DeepChain(std::size_t n);

    const EnvSpec& spec() const override { return spec_; }
    StepResult reset(std::uint64_t seed) override;
    StepResult step(int action) override;
    std::unique_ptr<Env> clone() const override;
    std::optional<double> optimal_return(std::uint64_t seed) const override;
    void save_state(std::ostream& os) const override;
    void load_state(std::istream& is) override;

    static constexpr double kTrapReward = 0.01;
    static constexpr double kGoalReward = 10.0;

private:
    StepResult observe(double reward, bool terminated, bool truncated) const;

    EnvSpec spec_;
    std::size_t n_;
    std::size_t position_ = 0;
    std::size_t steps_ = 0;
    bool done_ = true;
};

}  // namespace oprlab::envs
