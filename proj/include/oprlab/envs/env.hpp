#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace oprlab::envs {

struct EnvSpec {
    std::string name;
    std::size_t observation_dim = 0;
    std::size_t action_count = 0;
    std::size_t max_episode_steps = 0;
};

struct StepResult {
    std::vector<double> observation;
    double reward = 0.0;
    bool terminated = false;
    bool truncated = false;
    std::int64_t state_key = 0;
};

// Deterministic, seeded, discrete-observation environment. Stepping after
// terminated/truncated throws UsageError until the next reset.
class Env {
public:
    virtual ~Env() = default;

    virtual const EnvSpec& spec() const = 0;
    virtual StepResult reset(std::uint64_t seed) = 0;
    virtual StepResult step(int action) = 0;
    virtual std::unique_ptr<Env> clone() const = 0;

    // Exact optimal undiscounted episodic return for the episode seeded with
    // `seed`, by dynamic programming over the discrete state space; nullopt
    // when the instance is too large to solve.
    virtual std::optional<double> optimal_return(std::uint64_t seed) const = 0;

    // Full internal state (for exact checkpoint resume).
    virtual void save_state(std::ostream& os) const = 0;
    virtual void load_state(std::istream& is) = 0;
};

using EnvParams = std::map<std::string, std::string>;

// Registry by name; throws ConfigError on unknown names or bad parameters.
std::unique_ptr<Env> make_env(const std::string& name, const EnvParams& params);
std::vector<EnvSpec> list_envs();

}  // namespace oprlab::envs
