#include "oprlab/envs/mini_defense.hpp"

#include <istream>
#include <ostream>
#include <unordered_map>

#include "oprlab/errors.hpp"
#include "oprlab/rng.hpp"

namespace oprlab::envs {

MiniDefense::MiniDefense(std::size_t hosts, std::size_t horizon) : hosts_(hosts) {
    if (hosts < 2 || hosts > 16) throw ConfigError("mini_defense: hosts must be in [2, 16]");
    if (horizon == 0) throw ConfigError("mini_defense: horizon must be > 0");
    spec_.name = "mini_defense";
    spec_.observation_dim = 3 * hosts;  // compromised | alarmed target | decoys
    spec_.action_count = 3 * hosts;     // monitor(h) | restore(h) | decoy(h)
    spec_.max_episode_steps = horizon;
}

std::vector<std::size_t> MiniDefense::path_from_seed(std::size_t hosts,
                                                     std::uint64_t seed) {
    std::vector<std::size_t> path(hosts - 1);
    for (std::size_t i = 0; i < path.size(); ++i) path[i] = i;
    rng::Engine engine(rng::splitmix64(seed ^ 0x5bd1e995u));
    engine.shuffle(path);
    path.push_back(hosts - 1);  // crown jewel is always the final hop
    return path;
}

std::size_t MiniDefense::target_index(std::uint32_t mask) const {
    for (std::size_t i = 0; i < path_.size(); ++i) {
        if (!(mask & (1u << path_[i]))) return i;
    }
    return hosts_;  // everything compromised
}

double MiniDefense::step_penalty(std::uint32_t mask) const {
    double r = 0.0;
    for (std::size_t h = 0; h + 1 < hosts_; ++h) {
        if (mask & (1u << h)) r += kHostPenalty;
    }
    if (mask & (1u << (hosts_ - 1))) r += kJewelPenalty;
    return r;
}

StepResult MiniDefense::observe(double reward, bool truncated) const {
    StepResult r;
    r.observation.assign(spec_.observation_dim, 0.0);
    for (std::size_t h = 0; h < hosts_; ++h) {
        if (compromised_ & (1u << h)) r.observation[h] = 1.0;
        if (decoys_ & (1u << h)) r.observation[2 * hosts_ + h] = 1.0;
    }
    std::int64_t alarmed = -1;
    const std::size_t ti = target_index(compromised_);
    if (alarm_ && ti < hosts_) {
        alarmed = static_cast<std::int64_t>(path_[ti]);
        r.observation[hosts_ + static_cast<std::size_t>(alarmed)] = 1.0;
    }
    r.reward = reward;
    r.terminated = false;
    r.truncated = truncated;
    const std::int64_t span = static_cast<std::int64_t>(1u << hosts_);
    r.state_key = ((alarmed + 1) * span + compromised_) * span + decoys_;
    return r;
}

StepResult MiniDefense::reset(std::uint64_t seed) {
    path_ = path_from_seed(hosts_, seed);
    compromised_ = 0;
    decoys_ = 0;
    alarm_ = false;
    steps_ = 0;
    done_ = false;
    return observe(0.0, false);
}

StepResult MiniDefense::step(int action) {
    if (done_) throw UsageError("mini_defense: step after episode end");
    if (action < 0 || action >= static_cast<int>(spec_.action_count)) {
        throw DomainError("mini_defense: action out of range");
    }
    const std::size_t kind = static_cast<std::size_t>(action) / hosts_;
    const std::size_t host = static_cast<std::size_t>(action) % hosts_;
    const std::uint32_t bit = 1u << host;

    // Defender move.
    std::size_t ti = target_index(compromised_);
    if (kind == 0) {  // monitor
        if (ti < hosts_ && path_[ti] == host) alarm_ = true;
    } else if (kind == 1) {  // restore
        if (compromised_ & bit) {
            compromised_ &= ~bit;
            const std::size_t nti = target_index(compromised_);
            if (nti != ti) alarm_ = false;  // target moved to the restored host
            ti = nti;
        }
    } else {  // decoy
        decoys_ |= bit;
    }

    // Attacker move: one hop onto the first uncompromised host on its path.
    if (ti < hosts_) {
        const std::uint32_t tbit = 1u << path_[ti];
        if (decoys_ & tbit) {
            decoys_ &= ~tbit;  // trap absorbed; attacker wastes the step
        } else {
            compromised_ |= tbit;
            alarm_ = false;
        }
    }

    steps_ += 1;
    const bool truncated = steps_ >= spec_.max_episode_steps;
    done_ = truncated;
    return observe(step_penalty(compromised_), truncated);
}

std::unique_ptr<Env> MiniDefense::clone() const {
    return std::make_unique<MiniDefense>(*this);
}

std::optional<double> MiniDefense::optimal_return(std::uint64_t seed) const {
    if (hosts_ > 8) return std::nullopt;
    const auto path = path_from_seed(hosts_, seed);
    const std::uint32_t span = 1u << hosts_;
    // Value over (compromised, decoys) at each remaining-step count. The
    // alarm bit never affects dynamics, so the omniscient DP can drop it.
    std::vector<double> next(span * span, 0.0), cur(span * span, 0.0);
    auto target_of = [&](std::uint32_t mask) -> std::size_t {
        for (std::size_t i = 0; i < path.size(); ++i) {
            if (!(mask & (1u << path[i]))) return i;
        }
        return hosts_;
    };
    for (std::size_t t = spec_.max_episode_steps; t-- > 0;) {
        for (std::uint32_t mask = 0; mask < span; ++mask) {
            for (std::uint32_t dec = 0; dec < span; ++dec) {
                double best = -1e300;
                for (std::size_t kind = 0; kind < 3; ++kind) {
                    for (std::size_t host = 0; host < hosts_; ++host) {
                        std::uint32_t m = mask, d = dec;
                        const std::uint32_t bit = 1u << host;
                        if (kind == 1 && (m & bit)) m &= ~bit;
                        if (kind == 2) d |= bit;
                        const std::size_t ti = target_of(m);
                        if (ti < hosts_) {
                            const std::uint32_t tbit = 1u << path[ti];
                            if (d & tbit) {
                                d &= ~tbit;
                            } else {
                                m |= tbit;
                            }
                        }
                        const double val = step_penalty(m) + next[m * span + d];
                        if (val > best) best = val;
                    }
                }
                cur[mask * span + dec] = best;
            }
        }
        std::swap(cur, next);
    }
    return next[0];
}

void MiniDefense::save_state(std::ostream& os) const {
    os << "mini_defense " << hosts_ << " " << spec_.max_episode_steps << " "
       << compromised_ << " " << decoys_ << " " << (alarm_ ? 1 : 0) << " "
       << steps_ << " " << (done_ ? 1 : 0) << " " << path_.size();
    for (std::size_t h : path_) os << " " << h;
    os << "\n";
}

void MiniDefense::load_state(std::istream& is) {
    std::string tag;
    std::size_t horizon = 0, n = 0;
    int alarm = 0, done = 0;
    if (!(is >> tag >> hosts_ >> horizon >> compromised_ >> decoys_ >> alarm >>
          steps_ >> done >> n) ||
        tag != "mini_defense") {
        throw IoError("mini_defense: malformed state");
    }
    spec_.max_episode_steps = horizon;
    spec_.observation_dim = 3 * hosts_;
    spec_.action_count = 3 * hosts_;
    alarm_ = alarm != 0;
    done_ = done != 0;
    path_.resize(n);
    for (std::size_t& h : path_) {
        if (!(is >> h)) throw IoError("mini_defense: truncated path");
    }
}

}  // namespace oprlab::envs
