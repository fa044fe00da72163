#include "oprlab/opr/buffer.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "oprlab/errors.hpp"

namespace oprlab::opr {

Episode make_episode(std::vector<Transition> transitions, std::uint64_t id) {
    Episode e;
    e.transitions = std::move(transitions);
    e.episode_id = id;
    e.episodic_return = 0.0;
    for (const auto& t : e.transitions) e.episodic_return += t.reward;
    return e;
}

void save_transition(std::ostream& os, const Transition& t) {
    os << t.state_key << " " << t.action << " " << t.reward << " "
       << t.behavior_log_prob << " " << t.state.size();
    for (double x : t.state) os << " " << x;
    os << "\n";
}

Transition load_transition(std::istream& is) {
    Transition t;
    std::size_t dim = 0;
    if (!(is >> t.state_key >> t.action >> t.reward >> t.behavior_log_prob >> dim)) {
        throw IoError("transition: truncated record");
    }
    t.state.resize(dim);
    for (double& x : t.state) {
        if (!(is >> x)) throw IoError("transition: truncated state vector");
    }
    return t;
}

double percentile_linear(std::vector<double> values, double p) {
    if (values.empty()) return -std::numeric_limits<double>::infinity();
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values[0];
    const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
    const double lo = std::floor(rank);
    std::size_t i = static_cast<std::size_t>(lo);
    if (i + 1 >= values.size()) return values.back();
    const double frac = rank - lo;
    return values[i] + frac * (values[i + 1] - values[i]);
}

void ReturnWindow::push(double episodic_return) {
    returns_.push_back(episodic_return);
    while (returns_.size() > capacity_) returns_.pop_front();
}

void ReturnWindow::save(std::ostream& os) const {
    os << "window " << capacity_ << " " << returns_.size();
    os.precision(17);
    for (double r : returns_) os << " " << r;
    os << "\n";
}

void ReturnWindow::load(std::istream& is) {
    std::string tag;
    std::size_t n = 0;
    if (!(is >> tag >> capacity_ >> n) || tag != "window") {
        throw IoError("return window: malformed header");
    }
    returns_.clear();
    for (std::size_t i = 0; i < n; ++i) {
        double r;
        if (!(is >> r)) throw IoError("return window: truncated");
        returns_.push_back(r);
    }
}

double GoodEpisodeBuffer::current_threshold() const {
    return percentile_linear(window_.values(), percentile_);
}

AdmissionDecision GoodEpisodeBuffer::record_episode(Episode episode) {
    // Judge against predecessors: tau from the window before this episode's
    // return enters it.
    AdmissionDecision decision;
    decision.threshold = current_threshold();
    const double ret = [&] {
        double s = 0.0;
        for (const auto& t : episode.transitions) s += t.reward;
        return s;
    }();
    episode.episodic_return = ret;

    if (episode.transitions.size() > max_transitions_) {
        decision.status = Admission::rejected_oversize;
    } else if (ret > decision.threshold) {
        decision.status = Admission::admitted;
    } else {
        decision.status = Admission::rejected_below_threshold;
    }
    window_.push(ret);

    if (decision.status == Admission::admitted) {
        evict_until_fits(episode.transitions.size());
        total_transitions_ += episode.transitions.size();
        episodes_.push_back(std::move(episode));
        insert_lookup(episodes_.back());
        flat_dirty_ = true;
    }
    return decision;
}

void GoodEpisodeBuffer::evict_until_fits(std::size_t incoming) {
    while (!episodes_.empty() &&
           total_transitions_ + incoming > max_transitions_) {
        erase_lookup(episodes_.front());
        total_transitions_ -= episodes_.front().transitions.size();
        episodes_.pop_front();
        flat_dirty_ = true;
    }
}

void GoodEpisodeBuffer::insert_lookup(const Episode& e) {
    for (std::size_t i = 0; i < e.transitions.size(); ++i) {
        const auto& t = e.transitions[i];
        lookup_[{t.state_key, t.action}].push_back(
            {e.episode_id, static_cast<std::uint32_t>(i), t.behavior_log_prob});
    }
}

void GoodEpisodeBuffer::erase_lookup(const Episode& e) {
    for (const auto& t : e.transitions) {
        auto it = lookup_.find({t.state_key, t.action});
        if (it == lookup_.end()) continue;
        auto& entries = it->second;
        entries.erase(std::remove_if(entries.begin(), entries.end(),
                                     [&](const LookupEntry& le) {
                                         return le.episode_id == e.episode_id;
                                     }),
                      entries.end());
        if (entries.empty()) lookup_.erase(it);
    }
}

std::optional<double> GoodEpisodeBuffer::lookup_good_log_prob(
    std::int64_t state_key, int action) const {
    auto it = lookup_.find({state_key, action});
    if (it == lookup_.end() || it->second.empty()) return std::nullopt;
    return it->second.back().log_prob;
}

std::vector<GoodEpisodeBuffer::SampleRef> GoodEpisodeBuffer::sample_transitions(
    std::size_t n, rng::Engine& engine) const {
    refresh_flat();
    std::vector<SampleRef> out;
    if (flat_.empty()) return out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(flat_[engine.below(flat_.size())]);
    }
    return out;
}

void GoodEpisodeBuffer::refresh_flat() const {
    if (!flat_dirty_) return;
    flat_.clear();
    for (const auto& e : episodes_) {
        for (std::size_t i = 0; i < e.transitions.size(); ++i) {
            flat_.push_back(SampleRef{&e, i});
        }
    }
    flat_dirty_ = false;
}

bool GoodEpisodeBuffer::lookup_consistent() const {
    LookupMap rebuilt;
    std::size_t count = 0;
    for (const auto& e : episodes_) {
        count += e.transitions.size();
        for (std::size_t i = 0; i < e.transitions.size(); ++i) {
            const auto& t = e.transitions[i];
            rebuilt[{t.state_key, t.action}].push_back(
                {e.episode_id, static_cast<std::uint32_t>(i), t.behavior_log_prob});
        }
    }
    if (count != total_transitions_) return false;
    if (rebuilt.size() != lookup_.size()) return false;
    for (const auto& [key, entries] : rebuilt) {
        auto it = lookup_.find(key);
        if (it == lookup_.end()) return false;
        if (it->second.size() != entries.size()) return false;
        // Entry order within a key is admission order in both tables.
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (it->second[i].episode_id != entries[i].episode_id ||
                it->second[i].order != entries[i].order ||
                it->second[i].log_prob != entries[i].log_prob) {
                return false;
            }
        }
    }
    return true;
}

void GoodEpisodeBuffer::save(std::ostream& os) const {
    os.precision(17);
    os << "buffer " << max_transitions_ << " " << percentile_ << " "
       << episodes_.size() << "\n";
    window_.save(os);
    for (const auto& e : episodes_) {
        os << "episode " << e.episode_id << " " << e.transitions.size() << " "
           << e.episodic_return << "\n";
        for (const auto& t : e.transitions) save_transition(os, t);
    }
}

void GoodEpisodeBuffer::load(std::istream& is) {
    std::string tag;
    std::size_t n_episodes = 0;
    if (!(is >> tag >> max_transitions_ >> percentile_ >> n_episodes) ||
        tag != "buffer") {
        throw IoError("buffer: malformed header");
    }
    window_.load(is);
    episodes_.clear();
    lookup_.clear();
    total_transitions_ = 0;
    flat_dirty_ = true;
    for (std::size_t i = 0; i < n_episodes; ++i) {
        Episode e;
        std::size_t n_trans = 0;
        if (!(is >> tag >> e.episode_id >> n_trans >> e.episodic_return) ||
            tag != "episode") {
            throw IoError("buffer: malformed episode header");
        }
        e.transitions.reserve(n_trans);
        for (std::size_t k = 0; k < n_trans; ++k) {
            e.transitions.push_back(load_transition(is));
        }
        total_transitions_ += e.transitions.size();
        episodes_.push_back(std::move(e));
        insert_lookup(episodes_.back());
    }
}

}  // namespace oprlab::opr
