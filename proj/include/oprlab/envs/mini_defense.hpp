#pragma once

#include <cstdint>

#include "oprlab/envs/env.hpp"

namespace oprlab::envs {

// Miniature cyber-defense game. An attacker walks a seeded path through the
// hosts (crown jewel last), compromising the first uncompromised host on the
// path each step unless a decoy sits on it. The defender plays one action per
// step: monitor(h) reveals h as the next target if guessed right, restore(h)
// cleans a compromised host (the attacker must re-take it), decoy(h) arms a
// one-shot trap that absorbs the next hop onto h. Reward per step is -1 per
// compromised regular host and -10 while the crown jewel is compromised.
// Episodes run to the horizon; a perfectly defended episode returns 0.
class MiniDefense final : public Env {
public:
    explicit MiniDefense(std::size_t hosts = 5, std::size_t horizon = 30);

    const EnvSpec& spec() const override { return spec_; }
    StepResult reset(std::uint64_t seed) override;
    StepResult step(int action) override;
    std::unique_ptr<Env> clone() const override;
    std::optional<double> optimal_return(std::uint64_t seed) const override;
    void save_state(std::ostream& os) const override;
    void load_state(std::istream& is) override;

    static constexpr double kHostPenalty = -1.0;
    static constexpr double kJewelPenalty = -10.0;

    const std::vector<std::size_t>& attack_path() const { return path_; }

private:
    // First uncompromised host in path order; hosts_ when none remain.
    std::size_t target_index(std::uint32_t mask) const;
    double step_penalty(std::uint32_t mask) const;
    StepResult observe(double reward, bool truncated) const;
    static std::vector<std::size_t> path_from_seed(std::size_t hosts,
                                                   std::uint64_t seed);

    EnvSpec spec_;
    std::size_t hosts_;
    std::vector<std::size_t> path_;
    std::uint32_t compromised_ = 0;
    std::uint32_t decoys_ = 0;
    bool alarm_ = false;
    std::size_t steps_ = 0;
    bool done_ = true;
};

}  // namespace oprlab::envs
