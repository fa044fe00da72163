#include "oprlab/envs/distractor_grid.hpp"

#include <istream>
#include <ostream>

#include "oprlab/errors.hpp"

namespace oprlab::envs {

DistractorGrid::DistractorGrid(std::size_t side) : side_(side) {
    if (side < 3) throw ConfigError("distractor_grid: side must be >= 3");
    spec_.name = "distractor_grid";
    spec_.observation_dim = side * side;
    spec_.action_count = 4;
    spec_.max_episode_steps = 60;
}

StepResult DistractorGrid::observe(double reward, bool terminated,
                                   bool truncated) const {
    StepResult r;
    r.observation.assign(spec_.observation_dim, 0.0);
    r.observation[y_ * side_ + x_] = 1.0;
    r.reward = reward;
    r.terminated = terminated;
    r.truncated = truncated;
    r.state_key = static_cast<std::int64_t>(y_ * side_ + x_);
    return r;
}

StepResult DistractorGrid::reset(std::uint64_t /*seed*/) {
    x_ = 0;
    y_ = 0;
    steps_ = 0;
    done_ = false;
    return observe(0.0, false, false);
}

StepResult DistractorGrid::step(int action) {
    if (done_) throw UsageError("distractor_grid: step after episode end");
    std::int64_t dx = 0, dy = 0;
    switch (action) {
        case 0: dy = -1; break;
        case 1: dy = 1; break;
        case 2: dx = -1; break;
        case 3: dx = 1; break;
        default: throw DomainError("distractor_grid: action out of range");
    }
    const std::int64_t nx = static_cast<std::int64_t>(x_) + dx;
    const std::int64_t ny = static_cast<std::int64_t>(y_) + dy;
    if (nx >= 0 && ny >= 0 && nx < static_cast<std::int64_t>(side_) &&
        ny < static_cast<std::int64_t>(side_)) {
        x_ = static_cast<std::size_t>(nx);
        y_ = static_cast<std::size_t>(ny);
    }
    steps_ += 1;

    double reward = 0.0;
    bool terminated = false;
    if (x_ == 1 && y_ == 1) {
        reward = kDistractorReward;
        terminated = true;
    } else if (x_ == side_ - 1 && y_ == side_ - 1) {
        reward = kGoalReward;
        terminated = true;
    }
    const bool truncated = !terminated && steps_ >= spec_.max_episode_steps;
    done_ = terminated || truncated;
    return observe(reward, terminated, truncated);
}

std::unique_ptr<Env> DistractorGrid::clone() const {
    return std::make_unique<DistractorGrid>(*this);
}

std::optional<double> DistractorGrid::optimal_return(std::uint64_t /*seed*/) const {
    const std::size_t cells = side_ * side_;
    const std::size_t horizon = spec_.max_episode_steps;
    std::vector<std::vector<double>> v(horizon + 1, std::vector<double>(cells, 0.0));
    for (std::size_t t = horizon; t-- > 0;) {
        for (std::size_t c = 0; c < cells; ++c) {
            const std::size_t cx = c % side_, cy = c / side_;
            if ((cx == 1 && cy == 1) || (cx == side_ - 1 && cy == side_ - 1)) {
                v[t][c] = 0.0;  // terminal cells are never occupied mid-episode
                continue;
            }
            double best = -1e300;
            const std::int64_t moves[4][2] = {{0, -1}, {0, 1}, {-1, 0}, {1, 0}};
            for (const auto& mv : moves) {
                std::int64_t nx = static_cast<std::int64_t>(cx) + mv[0];
                std::int64_t ny = static_cast<std::int64_t>(cy) + mv[1];
                if (nx < 0 || ny < 0 || nx >= static_cast<std::int64_t>(side_) ||
                    ny >= static_cast<std::int64_t>(side_)) {
                    nx = static_cast<std::int64_t>(cx);
                    ny = static_cast<std::int64_t>(cy);
                }
                double val;
                if (nx == 1 && ny == 1) {
                    val = kDistractorReward;
                } else if (nx == static_cast<std::int64_t>(side_) - 1 &&
                           ny == static_cast<std::int64_t>(side_) - 1) {
                    val = kGoalReward;
                } else {
                    val = v[t + 1][static_cast<std::size_t>(ny) * side_ +
                                   static_cast<std::size_t>(nx)];
                }
                best = std::max(best, val);
            }
            v[t][c] = best;
        }
    }
    return v[0][0];
}

void DistractorGrid::save_state(std::ostream& os) const {
    os << "distractor_grid " << side_ << " " << x_ << " " << y_ << " " << steps_
       << " " << (done_ ? 1 : 0) << "\n";
}

void DistractorGrid::load_state(std::istream& is) {
    std::string tag;
    int done = 0;
    if (!(is >> tag >> side_ >> x_ >> y_ >> steps_ >> done) ||
        tag != "distractor_grid") {
        throw IoError("distractor_grid: malformed state");
    }
    done_ = done != 0;
}

}  // namespace oprlab::envs
