#pragma once

#include <span>
#include <vector>

namespace oprlab::numkit {

// Log-probabilities of a categorical distribution given logits, computed with
// max subtraction so arbitrarily large logits do not overflow. Throws
// DomainError on an empty vector.
void softmax_logprobs(std::span<const double> logits, std::vector<double>& out);
std::vector<double> softmax_logprobs(std::span<const double> logits);

// Shannon entropy from log-probabilities.
double entropy_from_logprobs(std::span<const double> logprobs);

// d(entropy)/d(logit_j) = -p_j * (logprob_j + entropy), accumulated into
// dlogits with weight `coef`.
void entropy_backward(std::span<const double> logprobs, double entropy,
                      double coef, std::span<double> dlogits);

// Gradient of log p(action) w.r.t. logits: dlogit_j += coef*(1[j==a] - p_j).
void logprob_backward(std::span<const double> logprobs, int action, double coef,
                      std::span<double> dlogits);

}  // namespace oprlab::numkit
