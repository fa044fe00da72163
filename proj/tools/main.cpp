// oprlab: train and compare PPO / PPO+OPR agents on the bundled
// deterministic environments.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oprlab/envs/env.hpp"
#include "oprlab/errors.hpp"
#include "oprlab/harness/compare.hpp"
#include "oprlab/harness/config.hpp"
#include "oprlab/harness/export_data.hpp"
#include "oprlab/harness/trainer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            if (!cur.empty()) {
                seeds.push_back(std::stoull(cur));
                cur.clear();
            }
        } else if (c >= '0' && c <= '9') {
            cur += c;
        } else {
            throw oprlab::ConfigError("bad seed list: " + text);
        }
    }
    return seeds;
}

int run_train(const std::string& config_path, std::int64_t seed,
              const std::string& out, const std::string& opr_flag,
              const std::string& resume, bool quiet) {
    auto cfg = oprlab::harness::parse_config_file(config_path);
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (!out.empty()) cfg.out_dir = out;
    if (opr_flag == "on") cfg.opr.enabled = true;
    if (opr_flag == "off") cfg.opr.enabled = false;

    oprlab::harness::Trainer trainer(cfg);
    trainer.quiet = quiet;
    if (!resume.empty()) {
        trainer.load_full_checkpoint(resume);
        trainer.open_outputs();
        while (trainer.step_update()) {
        }
        trainer.save_full_checkpoint(cfg.out_dir + "/checkpoint_final.txt");
        trainer.write_summary();
    } else {
        trainer.run();
    }
    std::printf("done: %llu updates, %llu env steps, metrics at %s\n",
                static_cast<unsigned long long>(trainer.updates_done()),
                static_cast<unsigned long long>(trainer.env_steps()),
                trainer.metrics_path().c_str());
    return kExitOk;
}

int run_compare(const std::string& config_path, const std::string& seeds_text,
                const std::string& out, bool quiet) {
    auto cfg = oprlab::harness::parse_config_file(config_path);
    const auto seeds = parse_seed_list(seeds_text);
    const std::string out_dir = out.empty() ? cfg.out_dir + "/compare" : out;
    const auto result = oprlab::harness::run_comparison(cfg, seeds, out_dir, quiet);
    std::printf("comparison written to %s/comparison.txt\n", out_dir.c_str());
    std::printf("ppo median final return: %.6g\n", result.ppo.median_final);
    std::printf("opr median final return: %.6g\n", result.opr.median_final);
    std::printf("opr strictly better on %llu/%zu seeds\n",
                static_cast<unsigned long long>(result.opr_strictly_better),
                seeds.size());
    return kExitOk;
}

int run_export(const std::string& metrics_path, const std::string& out) {
    const auto files = oprlab::harness::export_plot_data(metrics_path, out);
    std::printf("wrote %zu tables to %s\n", files.size(), out.c_str());
    return kExitOk;
}

int run_list_envs() {
    for (const auto& spec : oprlab::envs::list_envs()) {
        std::printf("%-16s obs_dim=%-4zu actions=%-3zu horizon=%zu\n",
                    spec.name.c_str(), spec.observation_dim, spec.action_count,
                    spec.max_episode_steps);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oprlab: PPO with optimistic policy regularization, desk scale"};
    app.require_subcommand(1);

    std::string config_path, out_dir, metrics_path, seeds_text, resume;
    std::string opr_flag = "config";
    std::int64_t seed = -1;
    bool quiet = false;

    auto* train = app.add_subcommand("train", "Train one agent from a config file");
    train->add_option("--config", config_path, "config file")->required();
    train->add_option("--seed", seed, "master seed override");
    train->add_option("--out", out_dir, "output directory override");
    train->add_option("--opr", opr_flag, "override opr_enabled: on|off")
        ->check(CLI::IsMember({"on", "off", "config"}));
    train->add_option("--resume", resume, "resume from a full checkpoint");
    train->add_flag("--quiet", quiet, "suppress per-update stdout lines");

    auto* compare = app.add_subcommand("compare", "Paired PPO vs PPO+OPR runs");
    compare->add_option("--config", config_path, "config file")->required();
    compare->add_option("--seeds", seeds_text, "comma-separated seeds")->required();
    compare->add_option("--out", out_dir, "output directory");
    compare->add_flag("--quiet", quiet, "suppress per-update stdout lines");

    auto* exp = app.add_subcommand("export", "Split a metrics file into plot tables");
    exp->add_option("--metrics", metrics_path, "metrics file")->required();
    exp->add_option("--out", out_dir, "output directory")->required();

    app.add_subcommand("list-envs", "List bundled environments");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            return run_train(config_path, seed, out_dir, opr_flag, resume, quiet);
        }
        if (compare->parsed()) {
            return run_compare(config_path, seeds_text, out_dir, quiet);
        }
        if (exp->parsed()) return run_export(metrics_path, out_dir);
        return run_list_envs();
    } catch (const oprlab::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const oprlab::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const oprlab::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
