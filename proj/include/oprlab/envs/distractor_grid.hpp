#pragma once

#include "oprlab/envs/env.hpp"

namespace oprlab::envs {

// Square grid with a small-reward distractor near the start and a large
// reward in the far corner; both terminate. Actions: 0=up 1=down 2=left
// 3=right; moves off the edge leave the agent in place.
class DistractorGrid final : public Env {
public:
    explicit DistractorGrid(std::size_t side = 7);

    const EnvSpec& spec() const override { return spec_; }
    StepResult reset(std::uint64_t seed) override;
    StepResult step(int action) override;
    std::unique_ptr<Env> clone() const override;
    std::optional<double> optimal_return(std::uint64_t seed) const override;
    void save_state(std::ostream& os) const override;
    void load_state(std::istream& is) override;

    static constexpr double kDistractorReward = 1.0;
    static constexpr double kGoalReward = 20.0;

private:
    StepResult observe(double reward, bool terminated, bool truncated) const;

    EnvSpec spec_;
    std::size_t side_;
    std::size_t x_ = 0, y_ = 0;
    std::size_t steps_ = 0;
    bool done_ = true;
};

}  // namespace oprlab::envs
