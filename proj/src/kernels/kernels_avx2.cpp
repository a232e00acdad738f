// Compiled with -mavx2 -mfma; only reached when the CPU reports both.

#include <immintrin.h>

#include "bss/kernels.hpp"

namespace bss::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* x, const double* y, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd();
    __m256d a3 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 16 <= n; j += 16) {
        a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + j), _mm256_loadu_pd(y + j), a0);
        a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + j + 4), _mm256_loadu_pd(y + j + 4), a1);
        a2 = _mm256_fmadd_pd(_mm256_loadu_pd(x + j + 8), _mm256_loadu_pd(y + j + 8), a2);
        a3 = _mm256_fmadd_pd(_mm256_loadu_pd(x + j + 12), _mm256_loadu_pd(y + j + 12), a3);
    }
    for (; j + 4 <= n; j += 4) {
        a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + j), _mm256_loadu_pd(y + j), a0);
    }
    double acc = hsum(_mm256_add_pd(_mm256_add_pd(a0, a1), _mm256_add_pd(a2, a3)));
    for (; j < n; ++j) acc += x[j] * y[j];
    return acc;
}

double sum(const double* x, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
        a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + j));
        a1 = _mm256_add_pd(a1, _mm256_loadu_pd(x + j + 4));
    }
    for (; j + 4 <= n; j += 4) a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + j));
    double acc = hsum(_mm256_add_pd(a0, a1));
    for (; j < n; ++j) acc += x[j];
    return acc;
}

double squared_distance(const double* x, const double* y, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(x + j), _mm256_loadu_pd(y + j));
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(x + j + 4), _mm256_loadu_pd(y + j + 4));
        a0 = _mm256_fmadd_pd(d0, d0, a0);
        a1 = _mm256_fmadd_pd(d1, d1, a1);
    }
    for (; j + 4 <= n; j += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + j), _mm256_loadu_pd(y + j));
        a0 = _mm256_fmadd_pd(d, d, a0);
    }
    double acc = hsum(_mm256_add_pd(a0, a1));
    for (; j < n; ++j) {
        const double d = x[j] - y[j];
        acc += d * d;
    }
    return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        _mm256_storeu_pd(y + j, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + j), _mm256_loadu_pd(y + j)));
    }
    for (; j < n; ++j) y[j] += a * x[j];
}

void multiply_divide(double* x, const double* num, const double* den, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d d = _mm256_loadu_pd(den + j);
        const __m256d xv = _mm256_loadu_pd(x + j);
        const __m256d updated = _mm256_mul_pd(xv, _mm256_div_pd(_mm256_loadu_pd(num + j), d));
        // keep x where den == 0
        const __m256d zero_den = _mm256_cmp_pd(d, zero, _CMP_EQ_OQ);
        _mm256_storeu_pd(x + j, _mm256_blendv_pd(updated, xv, zero_den));
    }
    for (; j < n; ++j) {
        if (den[j] != 0.0) x[j] *= num[j] / den[j];
    }
}

}  // namespace

const KernelTable& table() {
    static const KernelTable t{dot, sum, squared_distance, axpy, multiply_divide};
    return t;
}

}  // namespace bss::kernels::avx2
