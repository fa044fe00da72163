#include "oprlab/numkit/matrix.hpp"

#include <cmath>

namespace oprlab::numkit {

bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

bool all_finite(const Matrix& m) { return all_finite(m.data); }

}  // namespace oprlab::numkit
