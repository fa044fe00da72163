#include "oprlab/numkit/softmax.hpp"

#include <algorithm>
#include <cmath>

#include "oprlab/errors.hpp"

namespace oprlab::numkit {

void softmax_logprobs(std::span<const double> logits, std::vector<double>& out) {
    if (logits.empty()) throw DomainError("softmax_logprobs: empty logits");
    const double mx = *std::max_element(logits.begin(), logits.end());
    if (!std::isfinite(mx)) throw NumericalError("softmax_logprobs: non-finite logits");
    out.resize(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = logits[i] - mx;
        sum += std::exp(out[i]);
    }
    const double log_sum = std::log(sum);
    for (double& lp : out) lp -= log_sum;
}

std::vector<double> softmax_logprobs(std::span<const double> logits) {
    std::vector<double> out;
    softmax_logprobs(logits, out);
    return out;
}

double entropy_from_logprobs(std::span<const double> logprobs) {
    double h = 0.0;
    for (double lp : logprobs) h -= std::exp(lp) * lp;
    return h;
}

void entropy_backward(std::span<const double> logprobs, double entropy,
                      double coef, std::span<double> dlogits) {
    for (std::size_t j = 0; j < logprobs.size(); ++j) {
        const double p = std::exp(logprobs[j]);
        dlogits[j] += coef * (-p * (logprobs[j] + entropy));
    }
}

void logprob_backward(std::span<const double> logprobs, int action, double coef,
                      std::span<double> dlogits) {
    for (std::size_t j = 0; j < logprobs.size(); ++j) {
        const double p = std::exp(logprobs[j]);
        dlogits[j] += coef * ((static_cast<int>(j) == action ? 1.0 : 0.0) - p);
    }
}

}  // namespace oprlab::numkit
