#include <cmath>
#include <cstddef>

#include "oprlab/kernels.hpp"

namespace oprlab::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void matvec_scalar(const double* w, const double* x, const double* bias,
                   double* y, std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        const double* wr = w + r * cols;
        for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
        y[r] = bias ? bias[r] + acc : acc;
    }
}

void matvec_t_scalar(const double* w, const double* dy, double* dx,
                     std::size_t rows, std::size_t cols) {
    for (std::size_t c = 0; c < cols; ++c) dx[c] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double g = dy[r];
        const double* wr = w + r * cols;
        for (std::size_t c = 0; c < cols; ++c) dx[c] += g * wr[c];
    }
}

void rank1_acc_scalar(double* w, const double* u, const double* v,
                      std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double ur = u[r];
        double* wr = w + r * cols;
        for (std::size_t c = 0; c < cols; ++c) wr[c] += ur * v[c];
    }
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double sumsq_scalar(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
    return acc;
}

void adam_update_scalar(double* p, double* m, double* v, const double* g,
                        std::size_t n, double beta1, double beta2, double eps,
                        double lr, double inv_bc1, double inv_bc2) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
        const double mhat = m[i] * inv_bc1;
        const double vhat = v[i] * inv_bc2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace

const Ops scalar_ops = {
    dot_scalar,    matvec_scalar, matvec_t_scalar,    rank1_acc_scalar,
    axpy_scalar,   scale_scalar,  sumsq_scalar,       adam_update_scalar,
};

}  // namespace oprlab::kernels
