#pragma once

#include <chrono>
#include <memory>
#include <vector>

#include "oprlab/agent/agent.hpp"
#include "oprlab/envs/env.hpp"
#include "oprlab/harness/config.hpp"
#include "oprlab/harness/metrics.hpp"
#include "oprlab/opr/buffer.hpp"
#include "oprlab/ppo/ppo.hpp"

namespace oprlab::harness {

// Owns the whole training loop: vectorized-in-sequence env stepping, episode
// accounting, buffer admission, reward shaping, GAE, and PPO/OPR updates.
// All randomness is derived from the master seed through fixed streams, so a
// (config, seed) pair maps to byte-identical metrics. The good-episode buffer
// is maintained regardless of opr_enabled (admission depends only on the
// trajectory), which keeps buffer diagnostics comparable across arms; the
// flag gates shaping and BC.
class Trainer {
public:
    explicit Trainer(const ExperimentConfig& cfg);

    // Creates the output directory, config echo, and metrics file. Throws
    // IoError before any training work if the directory is unwritable.
    void open_outputs();

    // One collect -> shape -> GAE -> update cycle; false once the planned
    // update count is exhausted.
    bool step_update();

    // open_outputs + all updates + final checkpoint + summary.
    void run();

    void write_summary() const;
    void save_full_checkpoint(const std::string& path) const;
    void load_full_checkpoint(const std::string& path);

    const ExperimentConfig& config() const { return cfg_; }
    const envs::EnvSpec& env_spec() const { return env_spec_; }
    const std::vector<MetricsRecord>& records() const { return records_; }
    const agent::AgentParams& agent_params() const { return params_; }
    const opr::GoodEpisodeBuffer& buffer() const { return buffer_; }
    std::uint64_t env_steps() const { return env_steps_; }
    std::uint64_t updates_done() const { return update_index_; }
    std::uint64_t total_episodes() const { return total_episodes_; }
    std::uint64_t completed_episode_steps() const { return completed_episode_steps_; }
    std::uint64_t inflight_steps() const;
    double current_lr() const;
    std::string metrics_path() const;

    static void apply_kernel_backend(const std::string& name);

    bool quiet = false;

private:
    void collect();
    MetricsRecord make_record(const ppo::UpdateStats& stats,
                              double mean_abs_delta) const;

    ExperimentConfig cfg_;
    envs::EnvSpec env_spec_;
    std::vector<std::unique_ptr<envs::Env>> envs_;
    std::vector<rng::Engine> act_engines_;
    std::vector<std::uint64_t> episode_counters_;  // episodes started per env
    std::vector<std::vector<opr::Transition>> inflight_;
    std::vector<std::vector<double>> current_obs_;
    std::vector<std::int64_t> current_key_;

    agent::AgentParams params_;
    agent::AgentOptimizer opt_;
    opr::GoodEpisodeBuffer buffer_;
    ppo::RolloutBatch batch_;

    std::uint64_t update_index_ = 0;
    std::uint64_t env_steps_ = 0;
    std::uint64_t total_episodes_ = 0;
    std::uint64_t completed_episode_steps_ = 0;

    // episode tallies for the record being assembled
    std::uint64_t rec_episodes_ = 0;
    double rec_return_sum_ = 0.0;
    double rec_return_max_ = 0.0;
    double rec_len_sum_ = 0.0;
    double collect_entropy_sum_ = 0.0;

    MetricsWriter writer_;
    std::vector<MetricsRecord> records_;
    std::chrono::steady_clock::time_point start_time_;
};

}  // namespace oprlab::harness
