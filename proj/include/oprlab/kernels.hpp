#pragma once

#include <cstddef>
#include <string>

namespace oprlab::kernels {

// Dense float64 inner loops behind the numkit module. Every kernel has a
// scalar reference implementation and, on x86-64 with AVX2, a vectorized
// variant selected once at startup. Elementwise kernels (matvec_t, rank1_acc,
// axpy, scale, adam_update) evaluate the same per-element expression in the
// same order and are bit-identical across backends. Reductions (dot, matvec,
// sumsq) accumulate in lane order and may differ from scalar in the last few
// ulps; the equivalence tests bound that difference.
struct Ops {
    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);

    // y[r] = bias[r] + sum_c W[r*cols + c] * x[c]; bias may be null (treated as 0).
    void (*matvec)(const double* w, const double* x, const double* bias,
                   double* y, std::size_t rows, std::size_t cols);

    // dx[c] = sum_r W[r*cols + c] * dy[r]; dx is overwritten.
    void (*matvec_t)(const double* w, const double* dy, double* dx,
                     std::size_t rows, std::size_t cols);

    // W[r*cols + c] += u[r] * v[c]
    void (*rank1_acc)(double* w, const double* u, const double* v,
                      std::size_t rows, std::size_t cols);

    // y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);

    // x[i] *= a
    void (*scale)(double a, double* x, std::size_t n);

    // sum_i a[i]^2
    double (*sumsq)(const double* a, std::size_t n);

    // Adam with bias correction folded into inv_bc1/inv_bc2 = 1/(1-beta^t):
    //   m = beta1*m + (1-beta1)*g;  v = beta2*v + (1-beta2)*g*g
    //   p -= lr * (m*inv_bc1) / (sqrt(v*inv_bc2) + eps)
    void (*adam_update)(double* p, double* m, double* v, const double* g,
                        std::size_t n, double beta1, double beta2, double eps,
                        double lr, double inv_bc1, double inv_bc2);
};

enum class Backend { scalar, avx2 };

extern const Ops scalar_ops;
#ifdef OPRLAB_HAVE_AVX2
extern const Ops avx2_ops;
#endif

// Active dispatch table. Defaults to the widest backend the CPU supports;
// the OPRLAB_KERNELS environment variable ("scalar" or "avx2") or an explicit
// select_backend() call overrides it.
const Ops& ops();
Backend active_backend();
void select_backend(Backend b);
bool avx2_supported();
std::string backend_name(Backend b);

}  // namespace oprlab::kernels
