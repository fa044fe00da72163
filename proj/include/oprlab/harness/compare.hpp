#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oprlab/harness/config.hpp"
#include "oprlab/harness/metrics.hpp"

namespace oprlab::harness {

// Per-run endpoint statistics extracted from a metrics file.
struct RunOutcome {
    std::string variant;  // "ppo" or "opr"
    std::uint64_t seed = 0;
    double final_return = 0.0;       // episode-weighted mean over final 10% of steps
    double auc = 0.0;                // integral of ep_return_mean over env_steps
    double steps_to_threshold = 0.0; // NaN when the threshold was never reached
    double max_return = 0.0;         // best episodic return seen
    bool reached_goal = false;       // max_return >= goal threshold
};

struct VariantAggregate {
    std::string variant;
    double median_final = 0.0;
    double iqr_final = 0.0;
    double median_auc = 0.0;
    std::uint64_t goal_seeds = 0;  // seeds whose best episode reached the goal
};

struct ComparisonResult {
    std::vector<RunOutcome> rows;  // seeds x 2, ppo then opr per seed
    VariantAggregate ppo;
    VariantAggregate opr;
    std::uint64_t opr_strictly_better = 0;  // paired final-return wins
    double threshold = 0.0;
    double goal_return = 0.0;
};

RunOutcome summarize_run(const MetricsFile& metrics, const std::string& variant,
                         std::uint64_t seed, double threshold, double goal_return);

// Runs the PPO baseline and the OPR variant on every seed with matched
// environment seed streams, writes per-run outputs under out_dir, and emits
// out_dir/comparison.txt. Needs >= 2 seeds. If a run fails, the rows finished
// so far are written before the error propagates.
ComparisonResult run_comparison(const ExperimentConfig& base,
                                const std::vector<std::uint64_t>& seeds,
                                const std::string& out_dir, bool quiet = false);

void write_comparison_summary(const std::string& path, const ComparisonResult& r);

}  // namespace oprlab::harness
