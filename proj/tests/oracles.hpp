// Test-only oracles, independent of the library's backward/optimizer paths:
// central finite differences over flattened parameters, a brute-force
// discounted-sum GAE reference, and a sort-and-interpolate percentile.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "oprlab/agent/agent.hpp"
#include "oprlab/numkit/mlp.hpp"

namespace oracles {

inline std::vector<double*> param_coords(oprlab::numkit::MlpParams& p) {
    std::vector<double*> out;
    for (auto& w : p.weights) {
        for (double& x : w.data) out.push_back(&x);
    }
    for (auto& b : p.biases) {
        for (double& x : b) out.push_back(&x);
    }
    return out;
}

inline std::vector<double*> param_coords(oprlab::agent::AgentParams& p) {
    auto out = param_coords(p.policy_net);
    auto v = param_coords(p.value_net);
    out.insert(out.end(), v.begin(), v.end());
    return out;
}

inline std::vector<double> flatten_grads(const oprlab::numkit::MlpGrads& g) {
    std::vector<double> out;
    for (const auto& w : g.weights) out.insert(out.end(), w.data.begin(), w.data.end());
    for (const auto& b : g.biases) out.insert(out.end(), b.begin(), b.end());
    return out;
}

inline std::vector<double> flatten_grads(const oprlab::agent::AgentGrads& g) {
    auto out = flatten_grads(g.policy);
    auto v = flatten_grads(g.value);
    out.insert(out.end(), v.begin(), v.end());
    return out;
}

// Central finite differences of `loss` w.r.t. every coordinate in `coords`.
inline std::vector<double> finite_diff(const std::function<double()>& loss,
                                       const std::vector<double*>& coords,
                                       double h) {
    std::vector<double> grad(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const double saved = *coords[i];
        *coords[i] = saved + h;
        const double up = loss();
        *coords[i] = saved - h;
        const double down = loss();
        *coords[i] = saved;
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

// relative error with an absolute floor, as pinned by the gradient suite.
inline bool grads_match(const std::vector<double>& got,
                        const std::vector<double>& want, double rel = 1e-4,
                        double abs_floor = 1e-7) {
    if (got.size() != want.size()) return false;
    for (std::size_t i = 0; i < got.size(); ++i) {
        const double diff = std::abs(got[i] - want[i]);
        const double scale = std::max(std::abs(got[i]), std::abs(want[i]));
        if (diff > abs_floor && diff > rel * scale) return false;
    }
    return true;
}

// Brute-force GAE: A_t = sum_{k>=t, within the episode segment} (gamma*lambda)^{k-t} delta_k,
// with delta_k = r_k + gamma * next_value_k - V_k. Quadratic on purpose.
inline std::vector<double> gae_bruteforce(const std::vector<double>& rewards,
                                          const std::vector<double>& values,
                                          const std::vector<double>& next_values,
                                          const std::vector<unsigned char>& dones,
                                          double gamma, double lambda) {
    const std::size_t n = rewards.size();
    std::vector<double> adv(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        double weight = 1.0;
        for (std::size_t k = t; k < n; ++k) {
            const double delta = rewards[k] + gamma * next_values[k] - values[k];
            adv[t] += weight * delta;
            if (dones[k]) break;
            weight *= gamma * lambda;
        }
    }
    return adv;
}

// Percentile by explicit sort + linear interpolation between closest ranks.
inline double percentile_reference(std::vector<double> v, double p) {
    if (v.empty()) return -HUGE_VAL;
    for (std::size_t i = 1; i < v.size(); ++i) {  // insertion sort
        double x = v[i];
        std::size_t j = i;
        while (j > 0 && v[j - 1] > x) {
            v[j] = v[j - 1];
            --j;
        }
        v[j] = x;
    }
    const double rank = p / 100.0 * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(rank);
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + (rank - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

}  // namespace oracles
