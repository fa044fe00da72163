#include "oprlab/harness/compare.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "oprlab/errors.hpp"
#include "oprlab/harness/trainer.hpp"

namespace oprlab::harness {
namespace {

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double iqr(std::vector<double> v) {
    if (v.size() < 2) return 0.0;
    std::sort(v.begin(), v.end());
    auto quant = [&](double q) {
        const double rank = q * static_cast<double>(v.size() - 1);
        const std::size_t i = static_cast<std::size_t>(rank);
        if (i + 1 >= v.size()) return v.back();
        return v[i] + (rank - static_cast<double>(i)) * (v[i + 1] - v[i]);
    };
    return quant(0.75) - quant(0.25);
}

VariantAggregate aggregate(const std::vector<RunOutcome>& rows,
                           const std::string& variant) {
    VariantAggregate a;
    a.variant = variant;
    std::vector<double> finals, aucs;
    for (const auto& r : rows) {
        if (r.variant != variant) continue;
        finals.push_back(r.final_return);
        aucs.push_back(r.auc);
        if (r.reached_goal) a.goal_seeds += 1;
    }
    a.median_final = median(finals);
    a.iqr_final = iqr(finals);
    a.median_auc = median(aucs);
    return a;
}

}  // namespace

RunOutcome summarize_run(const MetricsFile& metrics, const std::string& variant,
                         std::uint64_t seed, double threshold, double goal_return) {
    RunOutcome o;
    o.variant = variant;
    o.seed = seed;
    o.steps_to_threshold = std::numeric_limits<double>::quiet_NaN();
    o.max_return = -std::numeric_limits<double>::infinity();

    const std::size_t n = metrics.rows.size();
    double last_steps = 0.0;
    double final_steps = 0.0;
    for (std::size_t i = 0; i < n; ++i) final_steps = metrics.value(i, "env_steps");
    const double tail_start = 0.9 * final_steps;

    double carry = 0.0;
    bool have_carry = false;
    double tail_weighted = 0.0, tail_weight = 0.0;
    double last_mean = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < n; ++i) {
        const double steps = metrics.value(i, "env_steps");
        const double mean = metrics.value(i, "ep_return_mean");
        const double mx = metrics.value(i, "ep_return_max");
        const double count = metrics.value(i, "episodes");
        if (!std::isnan(mean)) {
            carry = mean;
            have_carry = true;
            last_mean = mean;
            if (std::isnan(o.steps_to_threshold) && mean >= threshold) {
                o.steps_to_threshold = steps;
            }
        }
        if (!std::isnan(mx)) o.max_return = std::max(o.max_return, mx);
        if (have_carry) o.auc += carry * (steps - last_steps);
        if (steps > tail_start && count > 0 && !std::isnan(mean)) {
            tail_weighted += mean * count;
            tail_weight += count;
        }
        last_steps = steps;
    }
    o.final_return = tail_weight > 0 ? tail_weighted / tail_weight : last_mean;
    o.reached_goal = o.max_return >= goal_return;
    return o;
}

ComparisonResult run_comparison(const ExperimentConfig& base,
                                const std::vector<std::uint64_t>& seeds,
                                const std::string& out_dir, bool quiet) {
    if (seeds.size() < 2) throw ConfigError("compare: need at least 2 seeds");

    ComparisonResult result;
    // Derive endpoint thresholds from the env's optimal return when the
    // config does not pin them.
    auto env = envs::make_env(base.env_name, base.env_params);
    const auto optimal = env->optimal_return(0);
    result.threshold = base.compare_threshold;
    if (std::isnan(result.threshold)) {
        result.threshold = optimal ? 0.5 * *optimal : 0.0;
    }
    result.goal_return = base.goal_return;
    if (std::isnan(result.goal_return)) {
        result.goal_return = optimal ? *optimal - 1e-6
                                     : std::numeric_limits<double>::infinity();
    }

    const std::string summary_path = out_dir + "/comparison.txt";
    try {
        for (const std::uint64_t seed : seeds) {
            for (const bool opr_on : {false, true}) {
                ExperimentConfig cfg = base;
                cfg.seed = seed;
                cfg.opr.enabled = opr_on;
                const std::string variant = opr_on ? "opr" : "ppo";
                cfg.out_dir = out_dir + "/" + variant + "_seed" + std::to_string(seed);
                Trainer trainer(cfg);
                trainer.quiet = quiet;
                trainer.run();
                const auto metrics = MetricsFile::read(trainer.metrics_path());
                result.rows.push_back(summarize_run(metrics, variant, seed,
                                                    result.threshold,
                                                    result.goal_return));
            }
        }
    } catch (...) {
        // Preserve whatever finished before the failure.
        result.ppo = aggregate(result.rows, "ppo");
        result.opr = aggregate(result.rows, "opr");
        write_comparison_summary(summary_path, result);
        throw;
    }

    result.ppo = aggregate(result.rows, "ppo");
    result.opr = aggregate(result.rows, "opr");
    for (const std::uint64_t seed : seeds) {
        double ppo_final = 0.0, opr_final = 0.0;
        for (const auto& r : result.rows) {
            if (r.seed != seed) continue;
            (r.variant == "opr" ? opr_final : ppo_final) = r.final_return;
        }
        if (opr_final > ppo_final) result.opr_strictly_better += 1;
    }
    write_comparison_summary(summary_path, result);
    return result;
}

void write_comparison_summary(const std::string& path, const ComparisonResult& r) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write comparison summary: " + path);
    os.precision(17);
    os << "# variant seed final_return auc steps_to_threshold max_return reached_goal\n";
    for (const auto& row : r.rows) {
        os << row.variant << "\t" << row.seed << "\t" << row.final_return << "\t"
           << row.auc << "\t" << row.steps_to_threshold << "\t" << row.max_return
           << "\t" << (row.reached_goal ? 1 : 0) << "\n";
    }
    for (const auto& a : {r.ppo, r.opr}) {
        os << "aggregate\t" << a.variant << "\tmedian_final=" << a.median_final
           << "\tiqr_final=" << a.iqr_final << "\tmedian_auc=" << a.median_auc
           << "\tgoal_seeds=" << a.goal_seeds << "\n";
    }
    os << "paired\topr_strictly_better=" << r.opr_strictly_better
       << "\tthreshold=" << r.threshold << "\tgoal_return=" << r.goal_return << "\n";
}

}  // namespace oprlab::harness
