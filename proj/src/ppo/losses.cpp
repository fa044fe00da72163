#include <cmath>

#include "oprlab/errors.hpp"
#include "oprlab/ppo/ppo.hpp"

namespace oprlab::ppo {

SurrogateResult clipped_surrogate_loss(std::span<const double> log_probs,
                                       std::span<const double> old_log_probs,
                                       std::span<const double> advantages,
                                       double clip_epsilon) {
    const std::size_t n = log_probs.size();
    if (old_log_probs.size() != n || advantages.size() != n) {
        throw ShapeError("clipped_surrogate_loss: length mismatch");
    }
    if (n == 0) throw DomainError("clipped_surrogate_loss: empty batch");

    SurrogateResult res;
    res.dlogp.assign(n, 0.0);
    double sum = 0.0;
    std::size_t clipped = 0;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(log_probs[i]) || std::isnan(old_log_probs[i]) ||
            std::isnan(advantages[i])) {
            throw NumericalError("clipped_surrogate_loss: NaN input");
        }
        const double ratio = std::exp(log_probs[i] - old_log_probs[i]);
        const double adv = advantages[i];
        const double unclipped = ratio * adv;
        double r_clip = ratio;
        if (r_clip > 1.0 + clip_epsilon) r_clip = 1.0 + clip_epsilon;
        if (r_clip < 1.0 - clip_epsilon) r_clip = 1.0 - clip_epsilon;
        const double clipped_term = r_clip * adv;
        if (unclipped <= clipped_term) {
            sum += unclipped;
            // d(ratio * adv)/d(log_prob) = ratio * adv
            res.dlogp[i] = -inv_n * unclipped;
        } else {
            sum += clipped_term;  // clip active and binding: flat in theta
        }
        if (ratio > 1.0 + clip_epsilon || ratio < 1.0 - clip_epsilon) ++clipped;
    }
    res.loss = -sum * inv_n;
    res.clip_fraction = static_cast<double>(clipped) * inv_n;
    return res;
}

double value_loss(std::span<const double> values,
                  std::span<const double> return_targets) {
    if (values.size() != return_targets.size()) {
        throw ShapeError("value_loss: length mismatch");
    }
    if (values.empty()) throw DomainError("value_loss: empty batch");
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - return_targets[i];
        sum += d * d;
    }
    return 0.5 * sum / static_cast<double>(values.size());
}

double actor_loss(double surrogate, double entropy_mean, const PpoConfig& config) {
    return surrogate - config.entropy_coef * entropy_mean;
}

}  // namespace oprlab::ppo
