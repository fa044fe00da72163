#include "oprlab/envs/deep_chain.hpp"

#include <istream>
#include <ostream>

#include "oprlab/errors.hpp"

namespace oprlab::envs {

DeepChain::DeepChain(std::size_t n) : n_(n) {
    if (n < 2) throw ConfigError("deep_chain: N must be >= 2");
    spec_.name = "deep_chain";
    spec_.observation_dim = n + 1;  // one-hot position 0..N (N never observed)
    spec_.action_count = 2;
    spec_.max_episode_steps = 2 * n;
}

StepResult DeepChain::observe(double reward, bool terminated, bool truncated) const {
    StepResult r;
    r.observation.assign(spec_.observation_dim, 0.0);
    r.observation[position_ <= n_ ? position_ : n_] = 1.0;
    r.reward = reward;
    r.terminated = terminated;
    r.truncated = truncated;
    r.state_key = static_cast<std::int64_t>(position_);
    return r;
}

StepResult DeepChain::reset(std::uint64_t /*seed*/) {
    position_ = 0;
    steps_ = 0;
    done_ = false;
    return observe(0.0, false, false);
}

StepResult DeepChain::step(int action) {
    if (done_) throw UsageError("deep_chain: step after episode end");
    if (action < 0 || action > 1) throw DomainError("deep_chain: action out of range");

    double reward = 0.0;
    bool terminated = false;
    if (action == 1) {
        position_ += 1;
        if (position_ == n_) {
            reward = kGoalReward;
            terminated = true;
        }
    } else {
        position_ = 0;
        reward = kTrapReward;
    }
    steps_ += 1;
    const bool truncated = !terminated && steps_ >= spec_.max_episode_steps;
    done_ = terminated || truncated;
    return observe(reward, terminated, truncated);
}

std::unique_ptr<Env> DeepChain::clone() const {
    return std::make_unique<DeepChain>(*this);
}

std::optional<double> DeepChain::optimal_return(std::uint64_t /*seed*/) const {
    // Backward induction over (position, steps taken).
    const std::size_t horizon = spec_.max_episode_steps;
    std::vector<std::vector<double>> v(horizon + 1,
                                       std::vector<double>(n_ + 1, 0.0));
    for (std::size_t t = horizon; t-- > 0;) {
        for (std::size_t pos = 0; pos < n_; ++pos) {
            const double left = kTrapReward + v[t + 1][0];
            const double right = (pos + 1 == n_) ? kGoalReward : v[t + 1][pos + 1];
            v[t][pos] = std::max(left, right);
        }
    }
    return v[0][0];
}

void DeepChain::save_state(std::ostream& os) const {
    os << "deep_chain " << n_ << " " << position_ << " " << steps_ << " "
       << (done_ ? 1 : 0) << "\n";
}

void DeepChain::load_state(std::istream& is) {
    std::string tag;
    int done = 0;
    if (!(is >> tag >> n_ >> position_ >> steps_ >> done) || tag != "deep_chain") {
        throw IoError("deep_chain: malformed state");
    }
    done_ = done != 0;
}

}  // namespace oprlab::envs
