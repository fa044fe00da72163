#include "oprlab/harness/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include "oprlab/errors.hpp"
#include "oprlab/harness/checkpoint.hpp"
#include "oprlab/kernels.hpp"
#include "oprlab/opr/shaping.hpp"

namespace oprlab::harness {

namespace fs = std::filesystem;

void Trainer::apply_kernel_backend(const std::string& name) {
    if (name == "scalar") {
        kernels::select_backend(kernels::Backend::scalar);
    } else if (name == "avx2") {
        if (!kernels::avx2_supported()) {
            throw ConfigError("kernel_backend=avx2 requested but AVX2 is unavailable");
        }
        kernels::select_backend(kernels::Backend::avx2);
    }
    // "auto": keep the startup detection
}

Trainer::Trainer(const ExperimentConfig& cfg)
    : cfg_(cfg),
      buffer_(cfg.opr.buffer_capacity, cfg.opr.good_percentile,
              cfg.opr.return_window) {
    cfg_.validate();
    apply_kernel_backend(cfg_.kernel_backend);

    auto proto = envs::make_env(cfg_.env_name, cfg_.env_params);
    env_spec_ = proto->spec();
    envs_.push_back(std::move(proto));
    for (std::size_t e = 1; e < cfg_.num_envs; ++e) {
        envs_.push_back(envs_[0]->clone());
    }

    rng::Engine init_engine(rng::derive_seed(cfg_.seed, rng::kStreamInit));
    agent::AgentConfig acfg;
    acfg.hidden_sizes = cfg_.hidden_sizes;
    acfg.activation = numkit::activation_from_name(cfg_.activation);
    acfg.shared_trunk = cfg_.shared_trunk;
    acfg.policy_final_scale = cfg_.policy_final_scale;
    params_ = agent::AgentParams::init(env_spec_.observation_dim,
                                       env_spec_.action_count, acfg, init_engine);
    opt_ = agent::AgentOptimizer::for_params(params_, cfg_.adam_beta1,
                                             cfg_.adam_beta2, cfg_.adam_epsilon);

    act_engines_.reserve(cfg_.num_envs);
    episode_counters_.assign(cfg_.num_envs, 0);
    inflight_.resize(cfg_.num_envs);
    current_obs_.resize(cfg_.num_envs);
    current_key_.assign(cfg_.num_envs, 0);
    for (std::size_t e = 0; e < cfg_.num_envs; ++e) {
        act_engines_.emplace_back(rng::derive_seed(cfg_.seed, rng::kStreamAction, e));
        const auto init = envs_[e]->reset(
            rng::derive_seed(cfg_.seed, rng::kStreamEnvSeed, e, 0));
        current_obs_[e] = init.observation;
        current_key_[e] = init.state_key;
    }
    start_time_ = std::chrono::steady_clock::now();
}

std::string Trainer::metrics_path() const { return cfg_.out_dir + "/metrics.txt"; }

void Trainer::open_outputs() {
    std::error_code ec;
    fs::create_directories(cfg_.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg_.out_dir);
    std::ofstream echo(cfg_.out_dir + "/config_echo.cfg");
    if (!echo) throw IoError("cannot write config echo in " + cfg_.out_dir);
    write_config_echo(echo, cfg_);
    writer_.open(metrics_path());
}

double Trainer::current_lr() const {
    const std::size_t planned = cfg_.planned_updates();
    if (!cfg_.lr_linear_decay || planned == 0) return cfg_.learning_rate;
    const double progress =
        static_cast<double>(update_index_) / static_cast<double>(planned);
    return cfg_.learning_rate * (1.0 - progress);
}

std::uint64_t Trainer::inflight_steps() const {
    std::uint64_t n = 0;
    for (const auto& v : inflight_) n += v.size();
    return n;
}

void Trainer::collect() {
    batch_.clear(env_spec_.observation_dim);
    rec_episodes_ = 0;
    rec_return_sum_ = 0.0;
    rec_return_max_ = -std::numeric_limits<double>::infinity();
    rec_len_sum_ = 0.0;
    collect_entropy_sum_ = 0.0;

    const std::size_t per_env = cfg_.steps_per_update / cfg_.num_envs;
    for (std::size_t e = 0; e < cfg_.num_envs; ++e) {
        const std::size_t seg_lo = batch_.steps;
        for (std::size_t t = 0; t < per_env; ++t) {
            const auto decision = agent::act(params_, current_obs_[e], act_engines_[e]);
            collect_entropy_sum_ += decision.entropy;
            const auto sr = envs_[e]->step(decision.action);
            env_steps_ += 1;
            const bool done = sr.terminated || sr.truncated;

            inflight_[e].push_back(opr::Transition{current_obs_[e], current_key_[e],
                                                   decision.action, sr.reward,
                                                   decision.log_prob});
            batch_.push(current_obs_[e].data(), current_key_[e], decision.action,
                        sr.reward, decision.log_prob, decision.value, done,
                        sr.terminated);

            if (done) {
                if (sr.truncated) {
                    batch_.next_values.back() =
                        agent::value_only(params_, sr.observation);
                }
                auto ep = opr::make_episode(std::move(inflight_[e]), total_episodes_);
                inflight_[e] = {};
                completed_episode_steps_ += ep.transitions.size();
                rec_episodes_ += 1;
                rec_return_sum_ += ep.episodic_return;
                rec_return_max_ = std::max(rec_return_max_, ep.episodic_return);
                rec_len_sum_ += static_cast<double>(ep.transitions.size());
                buffer_.record_episode(std::move(ep));
                total_episodes_ += 1;
                episode_counters_[e] += 1;
                const auto init = envs_[e]->reset(rng::derive_seed(
                    cfg_.seed, rng::kStreamEnvSeed, e, episode_counters_[e]));
                current_obs_[e] = init.observation;
                current_key_[e] = init.state_key;
            } else {
                current_obs_[e] = sr.observation;
                current_key_[e] = sr.state_key;
            }
        }
        batch_.end_env_segment();
        const std::size_t seg_hi = batch_.steps;
        for (std::size_t i = seg_lo; i < seg_hi; ++i) {
            if (batch_.dones[i]) continue;  // terminal 0 / truncation bootstrap set
            batch_.next_values[i] = (i + 1 < seg_hi)
                                        ? batch_.values[i + 1]
                                        : agent::value_only(params_, current_obs_[e]);
        }
    }
}

MetricsRecord Trainer::make_record(const ppo::UpdateStats& stats,
                                   double mean_abs_delta) const {
    MetricsRecord r;
    r.update_index = update_index_ - 1;
    r.env_steps = env_steps_;
    r.episodes = rec_episodes_;
    const bool any = rec_episodes_ > 0;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.ep_return_mean = any ? rec_return_sum_ / static_cast<double>(rec_episodes_) : nan;
    r.ep_return_max = any ? rec_return_max_ : nan;
    r.ep_len_mean = any ? rec_len_sum_ / static_cast<double>(rec_episodes_) : nan;
    r.entropy = collect_entropy_sum_ / static_cast<double>(cfg_.steps_per_update);
    r.surrogate_loss = stats.surrogate_loss;
    r.value_loss = stats.value_loss;
    r.entropy_term = stats.entropy_term;
    r.bc_loss = stats.bc_loss;
    r.total_loss = stats.total_loss;
    r.clip_fraction = stats.clip_fraction;
    r.grad_norm = stats.grad_norm;
    r.buffer_transitions = buffer_.transition_count();
    r.buffer_episodes = buffer_.episode_count();
    r.tau = buffer_.current_threshold();
    r.mean_abs_delta = mean_abs_delta;
    r.total_episodes = total_episodes_;
    r.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time_)
            .count();
    return r;
}

bool Trainer::step_update() {
    if (update_index_ >= cfg_.planned_updates()) return false;

    const double lr = current_lr();
    collect();
    const double mean_abs_delta = opr::shape_rollout(batch_, buffer_, cfg_.opr);
    ppo::compute_gae(batch_, cfg_.ppo);

    rng::Engine shuffle_engine(
        rng::derive_seed(cfg_.seed, rng::kStreamShuffle, update_index_));
    rng::Engine bc_engine(rng::derive_seed(cfg_.seed, rng::kStreamBc, update_index_));
    ppo::OprContext ctx;
    ctx.buffer = &buffer_;
    ctx.config = &cfg_.opr;
    ctx.bc_engine = &bc_engine;
    ctx.update_index = update_index_;
    ctx.ppo_gamma = cfg_.ppo.gamma;

    const auto stats =
        ppo::ppo_update(params_, opt_, batch_, cfg_.ppo,
                        cfg_.opr.enabled ? &ctx : nullptr, lr, shuffle_engine);
    update_index_ += 1;

    MetricsRecord r = make_record(stats, mean_abs_delta);
    r.lr = lr;
    records_.push_back(r);
    if (writer_.is_open()) writer_.append(r);
    if (!quiet) {
        std::printf("[%s seed=%llu] %s wall=%.1fs\n", cfg_.env_name.c_str(),
                    static_cast<unsigned long long>(cfg_.seed),
                    r.to_line().c_str(), r.wall_clock_s);
        std::fflush(stdout);
    }

    if (cfg_.checkpoint_interval > 0 && update_index_ % cfg_.checkpoint_interval == 0 &&
        writer_.is_open()) {
        save_full_checkpoint(cfg_.out_dir + "/checkpoint_" +
                             std::to_string(update_index_) + ".txt");
    }
    return true;
}

void Trainer::run() {
    open_outputs();
    while (step_update()) {
    }
    save_full_checkpoint(cfg_.out_dir + "/checkpoint_final.txt");
    write_summary();
}

void Trainer::write_summary() const {
    std::ofstream os(cfg_.out_dir + "/summary.txt");
    if (!os) throw IoError("cannot write summary in " + cfg_.out_dir);
    os.precision(17);
    os << "env = " << cfg_.env_name << "\n";
    os << "seed = " << cfg_.seed << "\n";
    os << "opr_enabled = " << (cfg_.opr.enabled ? "true" : "false") << "\n";
    os << "updates = " << update_index_ << "\n";
    os << "env_steps = " << env_steps_ << "\n";
    os << "total_episodes = " << total_episodes_ << "\n";
    double final_mean = std::numeric_limits<double>::quiet_NaN();
    double best_max = -std::numeric_limits<double>::infinity();
    for (const auto& r : records_) {
        if (r.episodes > 0) final_mean = r.ep_return_mean;
        if (r.episodes > 0 && r.ep_return_max > best_max) best_max = r.ep_return_max;
    }
    os << "final_ep_return_mean = " << final_mean << "\n";
    os << "best_ep_return_max = " << best_max << "\n";
    os << "kernel_backend = "
       << kernels::backend_name(kernels::active_backend()) << "\n";
    os << "wall_clock_s = "
       << std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        start_time_)
              .count()
       << "\n";
}

void Trainer::save_full_checkpoint(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open checkpoint for writing: " + path);
    write_checkpoint_header(os);
    write_agent_section(os, params_, opt_);
    os << "trainer 1\n";
    os << "progress " << update_index_ << " " << env_steps_ << " "
       << total_episodes_ << " " << completed_episode_steps_ << "\n";
    buffer_.save(os);
    os << "envs " << cfg_.num_envs << "\n";
    for (std::size_t e = 0; e < cfg_.num_envs; ++e) {
        envs_[e]->save_state(os);
        act_engines_[e].save(os);
        os << "\n";
        os << "episode_counter " << episode_counters_[e] << "\n";
        os << "obs " << current_key_[e] << " " << current_obs_[e].size();
        for (double x : current_obs_[e]) os << " " << x;
        os << "\n";
        os << "inflight " << inflight_[e].size() << "\n";
        for (const auto& t : inflight_[e]) opr::save_transition(os, t);
    }
    os << "end\n";
    if (!os) throw IoError("failed writing checkpoint: " + path);
}

void Trainer::load_full_checkpoint(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open checkpoint: " + path);
    read_checkpoint_header(is);

    agent::AgentParams params;
    agent::AgentOptimizer opt;
    read_agent_section(is, params, opt);
    if (params.obs_dim() != env_spec_.observation_dim ||
        params.action_count() != env_spec_.action_count) {
        throw IoError("checkpoint: agent shape does not match the configured env");
    }

    std::string tag;
    int has_trainer = 0;
    if (!(is >> tag >> has_trainer) || tag != "trainer") {
        throw IoError("checkpoint: missing trainer flag");
    }
    if (!has_trainer) {
        throw IoError("checkpoint: no trainer state; cannot resume from an "
                      "agent-only checkpoint");
    }

    std::uint64_t update_index = 0, env_steps = 0, total_eps = 0, ep_steps = 0;
    if (!(is >> tag >> update_index >> env_steps >> total_eps >> ep_steps) ||
        tag != "progress") {
        throw IoError("checkpoint: malformed progress line");
    }

    opr::GoodEpisodeBuffer buffer(cfg_.opr.buffer_capacity,
                                  cfg_.opr.good_percentile, cfg_.opr.return_window);
    buffer.load(is);

    std::size_t n_envs = 0;
    if (!(is >> tag >> n_envs) || tag != "envs" || n_envs != cfg_.num_envs) {
        throw IoError("checkpoint: env count mismatch");
    }
    std::vector<std::unique_ptr<envs::Env>> loaded_envs;
    std::vector<rng::Engine> engines(n_envs);
    std::vector<std::uint64_t> counters(n_envs);
    std::vector<std::vector<double>> obs(n_envs);
    std::vector<std::int64_t> keys(n_envs);
    std::vector<std::vector<opr::Transition>> inflight(n_envs);
    for (std::size_t e = 0; e < n_envs; ++e) {
        auto env = envs::make_env(cfg_.env_name, cfg_.env_params);
        env->load_state(is);
        loaded_envs.push_back(std::move(env));
        engines[e].load(is);
        if (!(is >> tag >> counters[e]) || tag != "episode_counter") {
            throw IoError("checkpoint: malformed episode counter");
        }
        std::size_t dim = 0;
        if (!(is >> tag >> keys[e] >> dim) || tag != "obs") {
            throw IoError("checkpoint: malformed observation");
        }
        obs[e].resize(dim);
        for (double& x : obs[e]) {
            if (!(is >> x)) throw IoError("checkpoint: truncated observation");
        }
        std::size_t n_inflight = 0;
        if (!(is >> tag >> n_inflight) || tag != "inflight") {
            throw IoError("checkpoint: malformed inflight header");
        }
        for (std::size_t k = 0; k < n_inflight; ++k) {
            inflight[e].push_back(opr::load_transition(is));
        }
    }
    if (!(is >> tag) || tag != "end") throw IoError("checkpoint: missing end marker");

    // Commit only after the whole file parsed.
    params_ = std::move(params);
    opt_ = std::move(opt);
    buffer_ = std::move(buffer);
    envs_ = std::move(loaded_envs);
    act_engines_ = std::move(engines);
    episode_counters_ = std::move(counters);
    current_obs_ = std::move(obs);
    current_key_ = std::move(keys);
    inflight_ = std::move(inflight);
    update_index_ = update_index;
    env_steps_ = env_steps;
    total_episodes_ = total_eps;
    completed_episode_steps_ = ep_steps;
    records_.clear();
}

}  // namespace oprlab::harness
