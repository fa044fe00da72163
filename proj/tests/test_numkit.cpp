#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oprlab/errors.hpp"
#include "oprlab/numkit/adam.hpp"
#include "oprlab/numkit/mlp.hpp"
#include "oprlab/numkit/softmax.hpp"
#include "oracles.hpp"

using namespace oprlab;
using numkit::Activation;
using numkit::ForwardCache;
using numkit::MlpParams;

TEST_CASE("mlp_forward: zero net maps anything to zero") {
    auto p = MlpParams::zeros({3, 4, 2});
    ForwardCache cache;
    std::vector<double> out;
    numkit::mlp_forward(p, std::vector<double>{1.0, -2.0, 0.5}, cache, out);
    CHECK(out == std::vector<double>{0.0, 0.0});
}

TEST_CASE("mlp_forward: identity single linear layer") {
    auto p = MlpParams::zeros({3, 3});
    for (std::size_t i = 0; i < 3; ++i) p.weights[0].at(i, i) = 1.0;
    ForwardCache cache;
    std::vector<double> out;
    std::vector<double> in{0.25, -1.5, 3.0};
    numkit::mlp_forward(p, in, cache, out);
    CHECK(out == in);
}

TEST_CASE("mlp_forward: two-layer tanh net against hand evaluation") {
    // W0 = I, b0 = [0.5, -0.5]; W1 = [1, 2], b1 = 0.25; input [1, -1].
    // pre0 = [1.5, -1.5]; out = tanh(1.5) - 2 tanh(1.5) + 0.25.
    // tanh(1.5) = (e^3 - 1)/(e^3 + 1) = 0.90514825364486643.
    auto p = MlpParams::zeros({2, 2, 1});
    p.weights[0].at(0, 0) = 1.0;
    p.weights[0].at(1, 1) = 1.0;
    p.biases[0] = {0.5, -0.5};
    p.weights[1].at(0, 0) = 1.0;
    p.weights[1].at(0, 1) = 2.0;
    p.biases[1] = {0.25};
    ForwardCache cache;
    std::vector<double> out;
    numkit::mlp_forward(p, std::vector<double>{1.0, -1.0}, cache, out);
    CHECK(out[0] == doctest::Approx(0.25 - 0.90514825364486643).epsilon(1e-12));
    CHECK(cache.pre[0][0] == doctest::Approx(1.5));
    CHECK(cache.pre[0][1] == doctest::Approx(-1.5));
}

TEST_CASE("mlp_forward: dimension mismatch throws") {
    auto p = MlpParams::zeros({3, 2});
    ForwardCache cache;
    std::vector<double> out;
    CHECK_THROWS_AS(numkit::mlp_forward(p, std::vector<double>{1.0}, cache, out),
                    ShapeError);
}

TEST_CASE("mlp_backward: zero output grad gives zero parameter grads") {
    rng::Engine eng(3);
    auto p = MlpParams::glorot({3, 5, 2}, Activation::tanh, eng);
    ForwardCache cache;
    std::vector<double> out;
    numkit::mlp_forward(p, std::vector<double>{0.1, 0.2, 0.3}, cache, out);
    auto g = numkit::grads_like(p);
    numkit::mlp_backward(p, cache, std::vector<double>{0.0, 0.0}, g);
    for (double x : oracles::flatten_grads(g)) CHECK(x == 0.0);
}

TEST_CASE("mlp_backward: linear layer, loss = output[0]") {
    auto p = MlpParams::zeros({3, 2});
    ForwardCache cache;
    std::vector<double> out;
    std::vector<double> in{0.7, -0.3, 2.0};
    numkit::mlp_forward(p, in, cache, out);
    auto g = numkit::grads_like(p);
    numkit::mlp_backward(p, cache, std::vector<double>{1.0, 0.0}, g);
    for (std::size_t c = 0; c < 3; ++c) {
        CHECK(g.weights[0].at(0, c) == doctest::Approx(in[c]));
        CHECK(g.weights[0].at(1, c) == 0.0);
    }
    CHECK(g.biases[0][0] == 1.0);
    CHECK(g.biases[0][1] == 0.0);
}

TEST_CASE("mlp_backward: stale cache is rejected") {
    rng::Engine eng(5);
    auto p = MlpParams::glorot({3, 4, 2}, Activation::tanh, eng);
    auto q = MlpParams::glorot({3, 6, 2}, Activation::tanh, eng);
    ForwardCache cache;
    std::vector<double> out;
    numkit::mlp_forward(p, std::vector<double>{0.1, 0.2, 0.3}, cache, out);
    auto g = numkit::grads_like(q);
    CHECK_THROWS_AS(
        numkit::mlp_backward(q, cache, std::vector<double>{1.0, 0.0}, g),
        ShapeError);
}

TEST_CASE("gradient fidelity: backward matches central differences, 100 draws") {
    rng::Engine eng(2024);
    for (int rep = 0; rep < 100; ++rep) {
        const Activation act = rep % 3 == 2 ? Activation::relu : Activation::tanh;
        const std::size_t in_dim = 1 + eng.below(4);
        const std::size_t hid = 1 + eng.below(5);
        const std::size_t out_dim = 1 + eng.below(3);
        auto p = MlpParams::glorot({in_dim, hid, out_dim}, act, eng);
        std::vector<double> input(in_dim), ograd(out_dim);
        for (double& x : input) x = eng.uniform(-1.5, 1.5);
        for (double& x : ograd) x = eng.uniform(-1.0, 1.0);

        ForwardCache cache;
        std::vector<double> out;
        numkit::mlp_forward(p, input, cache, out);
        auto g = numkit::grads_like(p);
        numkit::mlp_backward(p, cache, ograd, g);

        auto coords = oracles::param_coords(p);
        auto fd = oracles::finite_diff(
            [&] {
                ForwardCache c;
                std::vector<double> o;
                numkit::mlp_forward(p, input, c, o);
                double loss = 0.0;
                for (std::size_t i = 0; i < o.size(); ++i) loss += o[i] * ograd[i];
                return loss;
            },
            coords, 1e-5);
        CHECK(oracles::grads_match(oracles::flatten_grads(g), fd));
    }
}

TEST_CASE("mlp_backward: input gradient matches finite differences") {
    rng::Engine eng(77);
    auto p = MlpParams::glorot({4, 6, 3}, Activation::tanh, eng);
    std::vector<double> input{0.3, -0.2, 0.9, -1.1};
    std::vector<double> ograd{0.5, -1.0, 0.25};
    ForwardCache cache;
    std::vector<double> out;
    numkit::mlp_forward(p, input, cache, out);
    auto g = numkit::grads_like(p);
    std::vector<double> igrad;
    numkit::mlp_backward(p, cache, ograd, g, &igrad);

    std::vector<double*> coords;
    for (double& x : input) coords.push_back(&x);
    auto fd = oracles::finite_diff(
        [&] {
            ForwardCache c;
            std::vector<double> o;
            numkit::mlp_forward(p, input, c, o);
            double loss = 0.0;
            for (std::size_t i = 0; i < o.size(); ++i) loss += o[i] * ograd[i];
            return loss;
        },
        coords, 1e-5);
    CHECK(oracles::grads_match(igrad, fd));
}

TEST_CASE("adam: zero gradient is the identity on parameters") {
    rng::Engine eng(9);
    auto p = MlpParams::glorot({2, 3, 2}, Activation::tanh, eng);
    const auto before = p;
    auto st = numkit::AdamState::for_params(p);
    auto g = numkit::grads_like(p);
    numkit::adam_step(p, g, st, 1e-3);
    CHECK(st.step_count == 1);
    for (std::size_t i = 0; i < p.num_layers(); ++i) {
        CHECK(p.weights[i].data == before.weights[i].data);
        CHECK(p.biases[i] == before.biases[i]);
    }
}

TEST_CASE("adam: first step moves by -lr * g / (|g| + eps)") {
    auto p = MlpParams::zeros({1, 2});
    auto st = numkit::AdamState::for_params(p);
    auto g = numkit::grads_like(p);
    g.weights[0].at(0, 0) = 0.73;
    g.weights[0].at(1, 0) = -2.1;
    const double lr = 1e-2;
    numkit::adam_step(p, g, st, lr);
    const double eps = st.epsilon;
    CHECK(p.weights[0].at(0, 0) ==
          doctest::Approx(-lr * 0.73 / (0.73 + eps)).epsilon(1e-12));
    CHECK(p.weights[0].at(1, 0) ==
          doctest::Approx(lr * 2.1 / (2.1 + eps)).epsilon(1e-12));
}

TEST_CASE("adam: two constant-gradient steps follow the moment recursion") {
    auto p = MlpParams::zeros({1, 1});
    auto st = numkit::AdamState::for_params(p);
    auto g = numkit::grads_like(p);
    const double grad = 0.4, lr = 5e-3;
    g.weights[0].at(0, 0) = grad;
    numkit::adam_step(p, g, st, lr);
    numkit::adam_step(p, g, st, lr);
    CHECK(st.step_count == 2);

    // Hand recursion: m_t and v_t under constant g, bias-corrected each step.
    double m = 0.0, v = 0.0, x = 0.0;
    for (int t = 1; t <= 2; ++t) {
        m = st.beta1 * m + (1 - st.beta1) * grad;
        v = st.beta2 * v + (1 - st.beta2) * grad * grad;
        const double mh = m / (1 - std::pow(st.beta1, t));
        const double vh = v / (1 - std::pow(st.beta2, t));
        x -= lr * mh / (std::sqrt(vh) + st.epsilon);
    }
    CHECK(p.weights[0].at(0, 0) == doctest::Approx(x).epsilon(1e-14));
}

TEST_CASE("adam: non-finite gradient aborts without touching state") {
    rng::Engine eng(4);
    auto p = MlpParams::glorot({2, 2}, Activation::tanh, eng);
    const auto before = p;
    auto st = numkit::AdamState::for_params(p);
    auto g = numkit::grads_like(p);
    g.weights[0].at(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(numkit::adam_step(p, g, st, 1e-3), NumericalError);
    CHECK(st.step_count == 0);
    CHECK(p.weights[0].data == before.weights[0].data);
}

TEST_CASE("softmax: uniform logits") {
    auto lp = numkit::softmax_logprobs(std::vector<double>{0, 0, 0, 0});
    for (double v : lp) CHECK(v == doctest::Approx(-std::log(4.0)).epsilon(1e-15));
}

TEST_CASE("softmax: shift invariance and normalization") {
    rng::Engine eng(21);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> logits(2 + eng.below(6));
        for (double& x : logits) x = eng.uniform(-30, 30);
        auto lp = numkit::softmax_logprobs(logits);
        double sum = 0.0;
        for (double v : lp) sum += std::exp(v);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

        const double c = eng.uniform(-100, 100);
        auto shifted = logits;
        for (double& x : shifted) x += c;
        auto lp2 = numkit::softmax_logprobs(shifted);
        for (std::size_t i = 0; i < lp.size(); ++i) {
            CHECK(lp[i] == doctest::Approx(lp2[i]).epsilon(1e-9));
        }

        // argmax preserved
        std::size_t am_logit = 0, am_lp = 0;
        for (std::size_t i = 1; i < logits.size(); ++i) {
            if (logits[i] > logits[am_logit]) am_logit = i;
            if (lp[i] > lp[am_lp]) am_lp = i;
        }
        CHECK(am_logit == am_lp);
    }
}

TEST_CASE("softmax: extreme logits stay finite") {
    auto lp = numkit::softmax_logprobs(std::vector<double>{1000.0, 0.0});
    CHECK(lp[0] == 0.0);
    CHECK(lp[1] == -1000.0);
}

TEST_CASE("softmax: empty input throws") {
    CHECK_THROWS_AS(numkit::softmax_logprobs(std::vector<double>{}), DomainError);
}

TEST_CASE("entropy helpers") {
    auto lp = numkit::softmax_logprobs(std::vector<double>{0, 0, 0, 0});
    CHECK(numkit::entropy_from_logprobs(lp) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-14));
    auto peaked = numkit::softmax_logprobs(std::vector<double>{50.0, 0.0});
    CHECK(numkit::entropy_from_logprobs(peaked) >= 0.0);
    CHECK(numkit::entropy_from_logprobs(peaked) < 1e-12);
}

TEST_CASE("glorot init: bounds and final layer scaling") {
    rng::Engine eng(31);
    auto p = MlpParams::glorot({10, 8, 4}, Activation::tanh, eng, 0.01);
    const double lim0 = std::sqrt(6.0 / 18.0);
    for (double w : p.weights[0].data) CHECK(std::abs(w) <= lim0);
    const double lim1 = 0.01 * std::sqrt(6.0 / 12.0);
    for (double w : p.weights[1].data) CHECK(std::abs(w) <= lim1);
    for (double b : p.biases[0]) CHECK(b == 0.0);
}
