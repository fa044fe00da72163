#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oprlab/opr/bc.hpp"
#include "oprlab/opr/buffer.hpp"
#include "oprlab/opr/shaping.hpp"
#include "oracles.hpp"

using namespace oprlab;
using opr::Admission;
using opr::Episode;
using opr::GoodEpisodeBuffer;
using opr::Transition;

namespace {

Transition tr(std::int64_t key, int action, double reward, double logp = -0.7) {
    Transition t;
    t.state = {static_cast<double>(key)};
    t.state_key = key;
    t.action = action;
    t.reward = reward;
    t.behavior_log_prob = logp;
    return t;
}

Episode episode_with_return(double ret, std::size_t len, std::uint64_t id,
                            std::int64_t key_base = 0) {
    std::vector<Transition> ts;
    for (std::size_t i = 0; i < len; ++i) {
        ts.push_back(tr(key_base + static_cast<std::int64_t>(i), 0,
                        ret / static_cast<double>(len)));
    }
    return opr::make_episode(std::move(ts), id);
}

}  // namespace

TEST_CASE("percentile: linear interpolation between closest ranks") {
    CHECK(opr::percentile_linear({1, 2, 3, 4}, 75.0) ==
          doctest::Approx(3.25).epsilon(1e-15));
    CHECK(opr::percentile_linear({4, 2, 1, 3}, 75.0) ==
          doctest::Approx(3.25).epsilon(1e-15));
    CHECK(opr::percentile_linear({5.0}, 75.0) == 5.0);
    CHECK(opr::percentile_linear({1, 2}, 0.0) == 1.0);
    CHECK(opr::percentile_linear({1, 2}, 100.0) == 2.0);
    CHECK(opr::percentile_linear({}, 75.0) ==
          -std::numeric_limits<double>::infinity());
}

TEST_CASE("percentile: matches the sort-and-interpolate oracle exhaustively") {
    // All windows of size <= 6 over integer returns in [0, 5] (sampled
    // lexicographically via counting), all quartile-style percentiles.
    for (std::size_t n = 1; n <= 6; ++n) {
        std::size_t total = 1;
        for (std::size_t i = 0; i < n; ++i) total *= 6;
        for (std::size_t code = 0; code < total; ++code) {
            std::vector<double> w(n);
            std::size_t c = code;
            for (std::size_t i = 0; i < n; ++i) {
                w[i] = static_cast<double>(c % 6);
                c /= 6;
            }
            for (double p : {0.0, 25.0, 50.0, 75.0, 90.0, 100.0}) {
                CHECK(opr::percentile_linear(w, p) ==
                      doctest::Approx(oracles::percentile_reference(w, p))
                          .epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("percentile: raising P never lowers tau") {
    rng::Engine eng(3);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> w(1 + eng.below(8));
        for (double& x : w) x = eng.uniform(-5, 5);
        double prev = -std::numeric_limits<double>::infinity();
        for (double p = 0.0; p <= 100.0; p += 12.5) {
            const double tau = opr::percentile_linear(w, p);
            CHECK(tau >= prev);
            prev = tau;
        }
    }
}

TEST_CASE("record_episode: threshold from the window at P = 75") {
    GoodEpisodeBuffer buf(100, 75.0, 100);
    for (double r : {1.0, 2.0, 3.0, 4.0}) {
        buf.record_episode(episode_with_return(r, 1, 90 + static_cast<int>(r)));
    }
    CHECK(buf.current_threshold() == doctest::Approx(3.25).epsilon(1e-12));

    auto admitted = buf.record_episode(episode_with_return(4.0, 2, 1));
    CHECK(admitted.status == Admission::admitted);
    CHECK(admitted.threshold == doctest::Approx(3.25).epsilon(1e-12));

    // Window is now {1,2,3,4,4}; tau = 4. A return of 3 is below, and a
    // return equal to tau is rejected by strictness.
    auto rejected = buf.record_episode(episode_with_return(3.0, 2, 2));
    CHECK(rejected.status == Admission::rejected_below_threshold);
    auto tie = buf.record_episode(episode_with_return(4.0, 2, 3));
    CHECK(tie.status == Admission::rejected_below_threshold);
}

TEST_CASE("record_episode: first episode is always admitted") {
    GoodEpisodeBuffer buf(100, 75.0, 100);
    auto d = buf.record_episode(episode_with_return(-7.5, 3, 0));
    CHECK(d.status == Admission::admitted);
    CHECK(d.threshold == -std::numeric_limits<double>::infinity());
    CHECK(buf.episode_count() == 1);
}

TEST_CASE("record_episode: tau is computed before the episode's own return") {
    GoodEpisodeBuffer buf(100, 50.0, 100);
    buf.record_episode(episode_with_return(1.0, 1, 0));
    // Window {1}; tau = 1; return 5 > 1 admitted even though after the push
    // the median would be 3.
    auto d = buf.record_episode(episode_with_return(5.0, 1, 1));
    CHECK(d.threshold == doctest::Approx(1.0));
    CHECK(d.status == Admission::admitted);
}

TEST_CASE("record_episode: oversize episodes are rejected with a signal") {
    GoodEpisodeBuffer buf(4, 75.0, 100);
    auto d = buf.record_episode(episode_with_return(100.0, 5, 0));
    CHECK(d.status == Admission::rejected_oversize);
    CHECK(buf.episode_count() == 0);
    // A full-capacity episode is admitted as the sole occupant.
    buf.record_episode(episode_with_return(1.0, 2, 1));
    auto d2 = buf.record_episode(episode_with_return(50.0, 4, 2));
    CHECK(d2.status == Admission::admitted);
    CHECK(buf.episode_count() == 1);
    CHECK(buf.transition_count() == 4);
}

TEST_CASE("buffer: capacity and episode-level FIFO under random sequences") {
    rng::Engine eng(17);
    GoodEpisodeBuffer buf(20, 75.0, 12);
    std::uint64_t next_id = 0;
    for (int i = 0; i < 500; ++i) {
        const double ret = static_cast<double>(eng.below(15)) - 2.0;
        const std::size_t len = 1 + eng.below(8);
        buf.record_episode(episode_with_return(ret, len, next_id++,
                                               static_cast<std::int64_t>(eng.below(10))));
        CHECK(buf.transition_count() <= 20);
        CHECK(buf.lookup_consistent());
        // FIFO: stored ids strictly increase front to back.
        std::uint64_t prev = 0;
        bool first = true;
        for (const auto& e : buf.episodes()) {
            if (!first) CHECK(e.episode_id > prev);
            prev = e.episode_id;
            first = false;
        }
    }
}

TEST_CASE("lookup: absent on empty buffer, direct retrieval, most recent wins") {
    GoodEpisodeBuffer buf(100, 0.0, 8);
    CHECK(!buf.lookup_good_log_prob(3, 1).has_value());

    Episode e1 = opr::make_episode({tr(3, 1, 5.0, -0.2)}, 0);
    buf.record_episode(e1);
    CHECK(buf.lookup_good_log_prob(3, 1).value() == doctest::Approx(-0.2));
    CHECK(!buf.lookup_good_log_prob(3, 0).has_value());
    CHECK(!buf.lookup_good_log_prob(4, 1).has_value());

    Episode e2 = opr::make_episode({tr(3, 1, 9.0, -0.1)}, 1);
    buf.record_episode(e2);
    CHECK(buf.lookup_good_log_prob(3, 1).value() == doctest::Approx(-0.1));
    CHECK(buf.lookup_consistent());
}

TEST_CASE("lookup: eviction restores the previous entry") {
    GoodEpisodeBuffer buf(3, 0.0, 4);
    buf.record_episode(opr::make_episode({tr(7, 0, 2.0, -0.5)}, 0));
    buf.record_episode(opr::make_episode({tr(7, 0, 3.0, -0.3)}, 1));
    CHECK(buf.lookup_good_log_prob(7, 0).value() == doctest::Approx(-0.3));
    // Two more transitions force the oldest episode out.
    buf.record_episode(
        opr::make_episode({tr(8, 1, 9.0, -0.9), tr(9, 1, 1.0, -0.8)}, 2));
    CHECK(buf.transition_count() == 3);
    CHECK(buf.lookup_good_log_prob(7, 0).value() == doctest::Approx(-0.3));
    buf.record_episode(
        opr::make_episode({tr(10, 0, 50.0, -0.4), tr(11, 0, 1.0, -0.2)}, 3));
    CHECK(!buf.lookup_good_log_prob(7, 0).has_value());
    CHECK(buf.lookup_consistent());
}

TEST_CASE("directional delta") {
    CHECK(opr::directional_delta(-0.5, -0.5) == 0.0);
    CHECK(opr::directional_delta(std::log(0.9), std::log(0.1)) ==
          doctest::Approx(std::log(9.0)).epsilon(1e-12));
    CHECK(opr::directional_delta(std::log(0.1), std::log(0.9)) ==
          doctest::Approx(-std::log(9.0)).epsilon(1e-12));
}

TEST_CASE("bound_delta: hand values") {
    CHECK(opr::bound_delta(0.0, 0.01) == 0.0);
    // 2 tanh(ln(9)/2) = 2 * 0.8 = 1.6, clipped to the bound.
    CHECK(opr::bound_delta(std::log(9.0), 0.01) == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(opr::bound_delta(-std::log(9.0), 0.01) == doctest::Approx(-0.01).epsilon(1e-15));
    // Small deltas pass through nearly unchanged: 2 tanh(x/2) = x - x^3/12 + ...
    const double got = opr::bound_delta(0.004, 0.01);
    const double series = 0.004 - std::pow(0.004, 3) / 12.0;
    CHECK(std::abs(got - series) < 1e-8);
}

TEST_CASE("bound_delta: odd, monotone, bounded") {
    rng::Engine eng(29);
    double prev_x = -1e9, prev_y = -1.0;
    for (int i = 0; i <= 400; ++i) {
        const double x = -20.0 + 0.1 * i;
        const double y = opr::bound_delta(x, 0.01);
        CHECK(std::abs(y) <= 0.01);
        CHECK(opr::bound_delta(-x, 0.01) == doctest::Approx(-y).epsilon(1e-15));
        if (prev_x > -1e8) CHECK(y >= prev_y);
        prev_x = x;
        prev_y = y;
        const double z = eng.uniform(-3, 3);
        CHECK((opr::bound_delta(z, 0.01) >= 0) == (z >= 0));
    }
}

TEST_CASE("shape_reward: hand values and bound property") {
    CHECK(opr::shape_reward(3.5, 0.0, 0.5) == 3.5);
    CHECK(opr::shape_reward(0.0, 0.01, 0.5) == 0.0);
    CHECK(opr::shape_reward(1.0, 0.01, 0.5) == doctest::Approx(1.005).epsilon(1e-15));
    rng::Engine eng(31);
    for (int i = 0; i < 200; ++i) {
        const double r = eng.uniform(-5, 5);
        const double bd = opr::bound_delta(eng.uniform(-4, 4), 0.01);
        const double shaped = opr::shape_reward(r, bd, 0.5);
        CHECK(std::abs(shaped - r) <= 0.5 * 0.01 * std::abs(r) + 1e-15);
    }
}

TEST_CASE("shape_rollout: disabled, empty-buffer, and matched cases") {
    ppo::RolloutBatch batch;
    batch.clear(1);
    const double obs = 0.0;
    batch.push(&obs, 5, 1, 1.0, std::log(0.5), 0.0, false, false);
    batch.push(&obs, 6, 0, 1.0, std::log(0.5), 0.0, true, true);
    batch.end_env_segment();

    GoodEpisodeBuffer buf(100, 0.0, 10);
    opr::OprConfig cfg;

    cfg.shaping_enabled = false;
    opr::shape_rollout(batch, buf, cfg);
    CHECK(batch.shaped_rewards == batch.raw_rewards);

    cfg.shaping_enabled = true;
    opr::shape_rollout(batch, buf, cfg);  // empty buffer
    CHECK(batch.shaped_rewards == batch.raw_rewards);

    // Stored behavior log-prob large enough that delta clips at +0.01.
    buf.record_episode(opr::make_episode({tr(5, 1, 3.0, std::log(0.9))}, 0));
    const double mean_abs = opr::shape_rollout(batch, buf, cfg);
    CHECK(batch.shaped_rewards[0] == doctest::Approx(1.005).epsilon(1e-12));
    CHECK(batch.shaped_rewards[1] == 1.0);
    CHECK(mean_abs == doctest::Approx(0.005).epsilon(1e-12));
    CHECK(batch.raw_rewards[0] == 1.0);  // raw retained
}

TEST_CASE("shape_rollout: alpha = 0 is inert even with matches") {
    ppo::RolloutBatch batch;
    batch.clear(1);
    const double obs = 0.0;
    batch.push(&obs, 5, 1, 1.0, std::log(0.5), 0.0, true, true);
    batch.end_env_segment();
    GoodEpisodeBuffer buf(100, 0.0, 10);
    buf.record_episode(opr::make_episode({tr(5, 1, 3.0, std::log(0.9))}, 0));
    opr::OprConfig cfg;
    cfg.alpha = 0.0;
    CHECK(opr::shape_rollout(batch, buf, cfg) == 0.0);
    CHECK(batch.shaped_rewards == batch.raw_rewards);
}

TEST_CASE("bc_loss: uniform policy, perfect policy, hand arithmetic") {
    agent::AgentParams uniform;
    uniform.policy_net = numkit::MlpParams::zeros({2, 4});
    uniform.value_net = numkit::MlpParams::zeros({2, 1});

    std::vector<double> states{0.5, 0.5, -1.0, 0.25};
    std::vector<int> actions{1, 3};
    agent::EvalBatch eval;
    std::vector<double> dlogp;
    CHECK(opr::bc_loss(uniform, states.data(), 2, 2, actions.data(), eval, dlogp) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(dlogp == std::vector<double>{-0.5, -0.5});

    // Policy that almost surely plays the stored action everywhere.
    agent::AgentParams sharp = uniform;
    sharp.policy_net.biases[0] = {-60.0, 60.0, -60.0, -60.0};
    std::vector<int> ones{1, 1};
    CHECK(opr::bc_loss(sharp, states.data(), 2, 2, ones.data(), eval, dlogp) <
          1e-12);

    // Probabilities 0.5 and 0.25 -> -(ln .5 + ln .25)/2 = 1.0397207708399179.
    agent::AgentParams two;
    two.policy_net = numkit::MlpParams::zeros({1, 4});
    two.value_net = numkit::MlpParams::zeros({1, 1});
    two.policy_net.biases[0] = {std::log(0.5), std::log(0.25), std::log(0.125),
                                std::log(0.125)};
    std::vector<double> s2{0.0, 0.0};
    std::vector<int> a2{0, 1};
    CHECK(opr::bc_loss(two, s2.data(), 2, 1, a2.data(), eval, dlogp) ==
          doctest::Approx(1.0397207708399179).epsilon(1e-12));
}

TEST_CASE("bc_loss: empty sample is a no-op contribution") {
    agent::AgentParams uniform;
    uniform.policy_net = numkit::MlpParams::zeros({2, 4});
    uniform.value_net = numkit::MlpParams::zeros({2, 1});
    agent::EvalBatch eval;
    std::vector<double> dlogp;
    CHECK(opr::bc_loss(uniform, nullptr, 0, 2, nullptr, eval, dlogp) == 0.0);
    CHECK(dlogp.empty());
}

TEST_CASE("bc gradient step raises the probability of every stored action") {
    // One-state bandit: a gradient step on the BC loss must increase the
    // current policy's probability of each sampled stored action.
    rng::Engine eng(71);
    agent::AgentConfig acfg;
    acfg.hidden_sizes = {4};
    acfg.policy_final_scale = 1.0;
    auto params = agent::AgentParams::init(1, 3, acfg, eng);

    std::vector<double> state{1.0};
    std::vector<int> stored{2, 2, 0};
    std::vector<double> flat{1.0, 1.0, 1.0};

    agent::EvalBatch eval;
    std::vector<double> dlogp;
    opr::bc_loss(params, flat.data(), 3, 1, stored.data(), eval, dlogp);
    auto grads = agent::grads_like(params);
    agent::evaluate_backward(params, flat.data(), 3, 1, stored.data(), eval,
                             dlogp, {}, {}, grads);

    const auto before = eval.logprob_rows[0];
    const double eta = 1e-3;
    for (std::size_t l = 0; l < params.policy_net.num_layers(); ++l) {
        for (std::size_t i = 0; i < params.policy_net.weights[l].size(); ++i) {
            params.policy_net.weights[l].data[i] -= eta * grads.policy.weights[l].data[i];
        }
        for (std::size_t i = 0; i < params.policy_net.biases[l].size(); ++i) {
            params.policy_net.biases[l][i] -= eta * grads.policy.biases[l][i];
        }
    }
    agent::EvalBatch after;
    agent::evaluate(params, flat.data(), 3, 1, stored.data(), after, false);
    CHECK(after.logprob_rows[0][2] > before[2]);
    CHECK(after.logprob_rows[0][0] > before[0]);
}

TEST_CASE("total loss assembly") {
    CHECK(opr::total_loss(0.42, 5.0, 0.0) == 0.42);
    CHECK(opr::total_loss(0.5, 1.3862943611198906, 1.0) ==
          doctest::Approx(1.8862943611198906).epsilon(1e-15));
    CHECK(opr::total_loss(0.1, 1.0, 2.0) == doctest::Approx(2.1).epsilon(1e-15));
}

TEST_CASE("buffer save/load round trip preserves contents and lookup") {
    rng::Engine eng(83);
    GoodEpisodeBuffer buf(30, 60.0, 10);
    for (std::uint64_t i = 0; i < 40; ++i) {
        std::vector<Transition> ts;
        const std::size_t len = 1 + eng.below(5);
        for (std::size_t k = 0; k < len; ++k) {
            ts.push_back(tr(static_cast<std::int64_t>(eng.below(6)),
                            static_cast<int>(eng.below(3)), eng.uniform(-2, 2),
                            -eng.uniform(0.01, 2.0)));
        }
        buf.record_episode(opr::make_episode(std::move(ts), i));
    }
    std::stringstream ss;
    ss.precision(17);
    buf.save(ss);
    GoodEpisodeBuffer loaded(1, 0.0, 1);
    loaded.load(ss);
    CHECK(loaded.transition_count() == buf.transition_count());
    CHECK(loaded.episode_count() == buf.episode_count());
    CHECK(loaded.current_threshold() == buf.current_threshold());
    CHECK(loaded.lookup_consistent());
    for (std::int64_t key = 0; key < 6; ++key) {
        for (int a = 0; a < 3; ++a) {
            CHECK(loaded.lookup_good_log_prob(key, a) ==
                  buf.lookup_good_log_prob(key, a));
        }
    }
}
