#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include "oprlab/rng.hpp"

namespace oprlab::opr {

// One environment step as stored for replay: the state the action was taken
// in, a hashable key for that state, and the behavior policy's log-prob of
// the action at execution time (the source of pi_good).
struct Transition {
    std::vector<double> state;
    std::int64_t state_key = 0;
    int action = 0;
    double reward = 0.0;
    double behavior_log_prob = 0.0;
};

struct Episode {
    std::vector<Transition> transitions;
    double episodic_return = 0.0;  // undiscounted sum of raw rewards
    std::uint64_t episode_id = 0;
};

Episode make_episode(std::vector<Transition> transitions, std::uint64_t id);

void save_transition(std::ostream& os, const Transition& t);
Transition load_transition(std::istream& is);

// P-th percentile by linear interpolation between closest ranks:
// rank = P/100 * (n-1) over the sorted values. Empty input -> -infinity.
double percentile_linear(std::vector<double> values, double p);

// Sliding FIFO window of the K most recent episodic returns.
class ReturnWindow {
public:
    explicit ReturnWindow(std::size_t capacity) : capacity_(capacity) {}

    void push(double episodic_return);
    std::size_t size() const { return returns_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::vector<double> values() const { return {returns_.begin(), returns_.end()}; }

    void save(std::ostream& os) const;
    void load(std::istream& is);

private:
    std::size_t capacity_;
    std::deque<double> returns_;
};

enum class Admission { admitted, rejected_below_threshold, rejected_oversize };

struct AdmissionDecision {
    Admission status = Admission::rejected_below_threshold;
    double threshold = -std::numeric_limits<double>::infinity();
    bool admitted() const { return status == Admission::admitted; }
};

// Capacity-bounded store of high-return episodes. An episode is admitted iff
// its return strictly exceeds the P-th percentile of the return window as it
// stood before the episode's own return is pushed. Eviction is episode-level
// FIFO on total stored transitions. A (state_key, action) -> behavior
// log-prob table is maintained incrementally; the most recently admitted
// match wins.
class GoodEpisodeBuffer {
public:
    GoodEpisodeBuffer(std::size_t max_transitions, double percentile,
                      std::size_t window_size)
        : max_transitions_(max_transitions),
          percentile_(percentile),
          window_(window_size) {}

    AdmissionDecision record_episode(Episode episode);

    std::optional<double> lookup_good_log_prob(std::int64_t state_key,
                                               int action) const;

    // Dynamic threshold as of now (percentile of the current window).
    double current_threshold() const;

    std::size_t transition_count() const { return total_transitions_; }
    std::size_t episode_count() const { return episodes_.size(); }
    std::size_t max_transitions() const { return max_transitions_; }
    const std::deque<Episode>& episodes() const { return episodes_; }
    const ReturnWindow& window() const { return window_; }

    // A stored transition together with its episode context (needed for
    // return-to-go when replayed samples enter the surrogate).
    struct SampleRef {
        const Episode* episode = nullptr;
        std::size_t index = 0;
        const Transition& transition() const { return episode->transitions[index]; }
    };

    // Uniform sample over all stored transitions (with replacement).
    std::vector<SampleRef> sample_transitions(std::size_t n,
                                              rng::Engine& engine) const;

    // True when the lookup table matches a from-scratch rebuild; test hook.
    bool lookup_consistent() const;

    void save(std::ostream& os) const;
    void load(std::istream& is);

private:
    struct LookupEntry {
        std::uint64_t episode_id;
        std::uint32_t order;  // position within the episode; later wins
        double log_prob;
    };
    struct KeyHash {
        std::size_t operator()(const std::pair<std::int64_t, int>& k) const {
            return std::hash<std::int64_t>()(k.first * 0x9e3779b97f4a7c15LL +
                                             k.second);
        }
    };
    using LookupMap = std::unordered_map<std::pair<std::int64_t, int>,
                                         std::vector<LookupEntry>, KeyHash>;

    void insert_lookup(const Episode& e);
    void erase_lookup(const Episode& e);
    void evict_until_fits(std::size_t incoming);
    void refresh_flat() const;

    std::size_t max_transitions_;
    double percentile_;
    ReturnWindow window_;
    std::deque<Episode> episodes_;
    std::size_t total_transitions_ = 0;
    LookupMap lookup_;
    mutable std::vector<SampleRef> flat_;
    mutable bool flat_dirty_ = true;
};

}  // namespace oprlab::opr
