#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oprlab/agent/agent.hpp"
#include "oprlab/errors.hpp"
#include "oprlab/numkit/softmax.hpp"
#include "oracles.hpp"

using namespace oprlab;
using agent::AgentConfig;
using agent::AgentParams;

namespace {

AgentParams uniform_agent(std::size_t obs_dim, std::size_t n_actions) {
    AgentParams p;
    p.policy_net = numkit::MlpParams::zeros({obs_dim, n_actions});
    p.value_net = numkit::MlpParams::zeros({obs_dim, 1});
    return p;
}

AgentParams random_agent(std::size_t obs_dim, std::size_t n_actions,
                         rng::Engine& eng, bool shared = false) {
    AgentConfig cfg;
    cfg.hidden_sizes = {6};
    cfg.shared_trunk = shared;
    cfg.policy_final_scale = 1.0;
    return AgentParams::init(obs_dim, n_actions, cfg, eng);
}

}  // namespace

TEST_CASE("act: uniform policy samples uniformly (chi-square, 10k draws)") {
    auto p = uniform_agent(3, 4);
    rng::Engine eng(123);
    std::vector<double> state{0.2, -0.4, 1.0};
    std::array<int, 4> counts{};
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const auto d = agent::act(p, state, eng);
        counts[static_cast<std::size_t>(d.action)] += 1;
        CHECK(d.entropy == doctest::Approx(std::log(4.0)).epsilon(1e-12));
        CHECK(d.log_prob == doctest::Approx(-std::log(4.0)).epsilon(1e-12));
    }
    double chi2 = 0.0;
    for (int c : counts) {
        const double expected = n / 4.0;
        chi2 += (c - expected) * (c - expected) / expected;
    }
    // chi-square(3 dof) 0.99 quantile
    CHECK(chi2 < 11.345);
}

TEST_CASE("act: deterministic under a fixed engine state") {
    rng::Engine eng(5);
    auto p = random_agent(4, 3, eng);
    std::vector<double> state{0.1, 0.2, 0.3, 0.4};
    rng::Engine a(99), b(99);
    for (int i = 0; i < 20; ++i) {
        const auto da = agent::act(p, state, a);
        const auto db = agent::act(p, state, b);
        CHECK(da.action == db.action);
        CHECK(da.log_prob == db.log_prob);
        CHECK(da.value == db.value);
        CHECK(da.entropy == db.entropy);
    }
}

TEST_CASE("act: sharply peaked logits pick action 0 essentially always") {
    auto p = uniform_agent(2, 4);
    p.policy_net.biases[0] = {10.0, -10.0, -10.0, -10.0};
    rng::Engine eng(7);
    std::vector<double> state{0.0, 0.0};
    int hits = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        hits += agent::act(p, state, eng).action == 0 ? 1 : 0;
    }
    CHECK(static_cast<double>(hits) / n > 0.999);
}

TEST_CASE("evaluate: ratio identity against stored decisions") {
    rng::Engine eng(17);
    auto p = random_agent(5, 4, eng);
    rng::Engine act_eng(31);
    std::vector<std::vector<double>> states;
    std::vector<int> actions;
    std::vector<double> stored_logp;
    std::vector<double> flat;
    for (int i = 0; i < 32; ++i) {
        std::vector<double> s(5);
        for (double& x : s) x = act_eng.uniform(-1, 1);
        const auto d = agent::act(p, s, act_eng);
        states.push_back(s);
        actions.push_back(d.action);
        stored_logp.push_back(d.log_prob);
        flat.insert(flat.end(), s.begin(), s.end());
    }
    agent::EvalBatch batch;
    agent::evaluate(p, flat.data(), states.size(), 5, actions.data(), batch);
    for (std::size_t i = 0; i < states.size(); ++i) {
        CHECK(std::exp(batch.log_probs[i] - stored_logp[i]) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("evaluate: uniform policy assigns -ln|A| to every action") {
    auto p = uniform_agent(2, 5);
    std::vector<double> flat{0.3, 0.4, -1.0, 0.0};
    std::vector<int> actions{0, 4};
    agent::EvalBatch batch;
    agent::evaluate(p, flat.data(), 2, 2, actions.data(), batch);
    for (double lp : batch.log_probs) {
        CHECK(lp == doctest::Approx(-std::log(5.0)).epsilon(1e-14));
    }
}

TEST_CASE("evaluate: hand softmax oracle on fixed logit rows") {
    // Single linear layer with identity weights turns states into logits.
    auto p = uniform_agent(3, 3);
    for (std::size_t i = 0; i < 3; ++i) p.policy_net.weights[0].at(i, i) = 1.0;
    const std::vector<std::vector<double>> rows = {
        {0.5, -0.25, 1.5}, {2.0, 2.0, 2.0}, {-3.0, 0.0, 0.5}};
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    std::vector<int> actions{2, 0, 1};
    agent::EvalBatch batch;
    agent::evaluate(p, flat.data(), 3, 3, actions.data(), batch);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double z = 0.0;
        for (double x : rows[i]) z += std::exp(x);
        const double want = rows[i][static_cast<std::size_t>(actions[i])] - std::log(z);
        CHECK(batch.log_probs[i] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("evaluate: out-of-range action throws DomainError") {
    auto p = uniform_agent(2, 3);
    std::vector<double> flat{0.0, 0.0};
    std::vector<int> actions{3};
    agent::EvalBatch batch;
    CHECK_THROWS_AS(agent::evaluate(p, flat.data(), 1, 2, actions.data(), batch),
                    DomainError);
}

TEST_CASE("entropy bounds hold for random agents and states") {
    rng::Engine eng(41);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n_actions = 2 + eng.below(5);
        auto p = random_agent(3, n_actions, eng);
        std::vector<double> s(3);
        for (double& x : s) x = eng.uniform(-2, 2);
        rng::Engine aeng(rep);
        const auto d = agent::act(p, s, aeng);
        CHECK(d.entropy >= 0.0);
        CHECK(d.entropy <= std::log(static_cast<double>(n_actions)) + 1e-12);
        CHECK(d.log_prob <= 0.0);
    }
}

TEST_CASE("evaluate_backward matches finite differences (separate nets)") {
    rng::Engine eng(53);
    for (int rep = 0; rep < 10; ++rep) {
        auto p = random_agent(4, 3, eng);
        const std::size_t n = 6;
        std::vector<double> flat(4 * n);
        std::vector<int> actions(n);
        for (double& x : flat) x = eng.uniform(-1, 1);
        for (int& a : actions) a = static_cast<int>(eng.below(3));
        std::vector<double> dlogp(n), dent(n), dval(n);
        for (std::size_t i = 0; i < n; ++i) {
            dlogp[i] = eng.uniform(-1, 1);
            dent[i] = eng.uniform(-1, 1);
            dval[i] = eng.uniform(-1, 1);
        }

        agent::EvalBatch batch;
        agent::evaluate(p, flat.data(), n, 4, actions.data(), batch);
        auto grads = agent::grads_like(p);
        agent::evaluate_backward(p, flat.data(), n, 4, actions.data(), batch,
                                 dlogp, dent, dval, grads);

        auto coords = oracles::param_coords(p);
        auto fd = oracles::finite_diff(
            [&] {
                agent::EvalBatch b;
                agent::evaluate(p, flat.data(), n, 4, actions.data(), b);
                double loss = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    loss += dlogp[i] * b.log_probs[i] + dent[i] * b.entropies[i] +
                            dval[i] * b.values[i];
                }
                return loss;
            },
            coords, 1e-5);
        CHECK(oracles::grads_match(oracles::flatten_grads(grads), fd));
    }
}

TEST_CASE("evaluate_backward matches finite differences (shared trunk)") {
    rng::Engine eng(59);
    auto p = random_agent(3, 4, eng, /*shared=*/true);
    const std::size_t n = 5;
    std::vector<double> flat(3 * n);
    std::vector<int> actions(n);
    for (double& x : flat) x = eng.uniform(-1, 1);
    for (int& a : actions) a = static_cast<int>(eng.below(4));
    std::vector<double> dlogp(n), dent(n), dval(n);
    for (std::size_t i = 0; i < n; ++i) {
        dlogp[i] = eng.uniform(-1, 1);
        dent[i] = eng.uniform(-1, 1);
        dval[i] = eng.uniform(-1, 1);
    }

    agent::EvalBatch batch;
    agent::evaluate(p, flat.data(), n, 3, actions.data(), batch);
    auto grads = agent::grads_like(p);
    agent::evaluate_backward(p, flat.data(), n, 3, actions.data(), batch, dlogp,
                             dent, dval, grads);

    auto coords = oracles::param_coords(p);
    auto fd = oracles::finite_diff(
        [&] {
            agent::EvalBatch b;
            agent::evaluate(p, flat.data(), n, 3, actions.data(), b);
            double loss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                loss += dlogp[i] * b.log_probs[i] + dent[i] * b.entropies[i] +
                        dval[i] * b.values[i];
            }
            return loss;
        },
        coords, 1e-5);
    CHECK(oracles::grads_match(oracles::flatten_grads(grads), fd));
}

TEST_CASE("near-uniform init keeps initial entropy within 1e-6 of ln|A|") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        rng::Engine eng(seed);
        AgentConfig cfg;  // default 64x64, policy_final_scale 1e-3
        auto p = AgentParams::init(21, 2, cfg, eng);
        rng::Engine aeng(seed + 1000);
        std::vector<double> s(21, 0.0);
        s[seed % 21] = 1.0;
        const auto d = agent::act(p, s, aeng);
        CHECK(std::abs(d.entropy - std::log(2.0)) < 1e-6);
    }
}

TEST_CASE("value_only agrees with act's value on both architectures") {
    rng::Engine eng(61);
    for (bool shared : {false, true}) {
        auto p = random_agent(4, 3, eng, shared);
        std::vector<double> s{0.5, -0.5, 0.25, 1.0};
        rng::Engine aeng(3);
        CHECK(agent::value_only(p, s) == agent::act(p, s, aeng).value);
    }
}
