// AVX2 variants of the numkit kernels. Compiled with -mavx2 only; never
// referenced unless the CPU reports AVX2 at runtime. Multiplies and adds are
// kept separate (no FMA) so elementwise kernels match the scalar reference
// bit for bit.

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "oprlab/kernels.hpp"

namespace oprlab::kernels {
namespace {

// Lane sum in the fixed order (l0+l2) + (l1+l3).
inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d pair = _mm_add_pd(lo, hi);          // {l0+l2, l1+l3}
    __m128d swapped = _mm_unpackhi_pd(pair, pair);
    return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
    }
    double sum = hsum(acc);
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

void matvec_avx2(const double* w, const double* x, const double* bias,
                 double* y, std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double acc = dot_avx2(w + r * cols, x, cols);
        y[r] = bias ? bias[r] + acc : acc;
    }
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        __m256d vx = _mm256_loadu_pd(x + i);
        vy = _mm256_add_pd(vy, _mm256_mul_pd(va, vx));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void matvec_t_avx2(const double* w, const double* dy, double* dx,
                   std::size_t rows, std::size_t cols) {
    for (std::size_t c = 0; c < cols; ++c) dx[c] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) axpy_avx2(dy[r], w + r * cols, dx, cols);
}

void rank1_acc_avx2(double* w, const double* u, const double* v,
                    std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) axpy_avx2(u[r], v, w + r * cols, cols);
}

void scale_avx2(double a, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) x[i] *= a;
}

double sumsq_avx2(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(va, va));
    }
    double sum = hsum(acc);
    for (; i < n; ++i) sum += a[i] * a[i];
    return sum;
}

void adam_update_avx2(double* p, double* m, double* v, const double* g,
                      std::size_t n, double beta1, double beta2, double eps,
                      double lr, double inv_bc1, double inv_bc2) {
    const __m256d vb1 = _mm256_set1_pd(beta1);
    const __m256d vb1c = _mm256_set1_pd(1.0 - beta1);
    const __m256d vb2 = _mm256_set1_pd(beta2);
    const __m256d vb2c = _mm256_set1_pd(1.0 - beta2);
    const __m256d veps = _mm256_set1_pd(eps);
    const __m256d vlr = _mm256_set1_pd(lr);
    const __m256d vbc1 = _mm256_set1_pd(inv_bc1);
    const __m256d vbc2 = _mm256_set1_pd(inv_bc2);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vg = _mm256_loadu_pd(g + i);
        __m256d vm = _mm256_loadu_pd(m + i);
        __m256d vv = _mm256_loadu_pd(v + i);
        vm = _mm256_add_pd(_mm256_mul_pd(vb1, vm), _mm256_mul_pd(vb1c, vg));
        vv = _mm256_add_pd(_mm256_mul_pd(vb2, vv),
                           _mm256_mul_pd(vb2c, _mm256_mul_pd(vg, vg)));
        _mm256_storeu_pd(m + i, vm);
        _mm256_storeu_pd(v + i, vv);
        __m256d mhat = _mm256_mul_pd(vm, vbc1);
        __m256d vhat = _mm256_mul_pd(vv, vbc2);
        __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
        __m256d step = _mm256_div_pd(_mm256_mul_pd(vlr, mhat), denom);
        __m256d vp = _mm256_loadu_pd(p + i);
        _mm256_storeu_pd(p + i, _mm256_sub_pd(vp, step));
    }
    for (; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
        const double mhat = m[i] * inv_bc1;
        const double vhat = v[i] * inv_bc2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace

const Ops avx2_ops = {
    dot_avx2,    matvec_avx2, matvec_t_avx2,    rank1_acc_avx2,
    axpy_avx2,   scale_avx2,  sumsq_avx2,       adam_update_avx2,
};

}  // namespace oprlab::kernels
