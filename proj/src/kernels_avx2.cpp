#include "acbe/kernels.hpp"

// AVX2+FMA variants. This translation unit is compiled with -mavx2 -mfma;
// the dispatcher only installs the table after a cpuid check.

#if defined(ACBE_HAVE_AVX2)

#include <immintrin.h>

namespace acbe::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

void matvec_avx2(const double* a, const double* x, double* y,
                 std::size_t rows, std::size_t cols) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = a + i * cols;
        __m256d acc0 = _mm256_setzero_pd();
        __m256d acc1 = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j + 8 <= cols; j += 8) {
            acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(x + j), acc0);
            acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j + 4), _mm256_loadu_pd(x + j + 4), acc1);
        }
        for (; j + 4 <= cols; j += 4)
            acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(x + j), acc0);
        double acc = hsum(_mm256_add_pd(acc0, acc1));
        for (; j < cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

void diag_mul_avx2(const double* d, const double* x, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(d + i), _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] = d[i] * x[i];
}

void decay_update_avx2(const double* decay, const double* y, double* w, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d r = _mm256_fmadd_pd(_mm256_loadu_pd(decay + i), _mm256_loadu_pd(w + i),
                                    _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(w + i, r);
    }
    for (; i < n; ++i) w[i] = decay[i] * w[i] + y[i];
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(double a, const double* x, double* y, std::size_t n) {
    __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] = a * x[i];
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double weighted_sumsq_avx2(const double* w, const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d xv = _mm256_loadu_pd(x + i);
        acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), xv), xv, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * x[i] * x[i];
    return s;
}

void double_well_avx2(const double* s, double* out, std::size_t n, double c4, double b2) {
    __m256d vc4 = _mm256_set1_pd(c4), vb2 = _mm256_set1_pd(b2);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(s + i);
        __m256d t = _mm256_sub_pd(_mm256_mul_pd(v, v), vb2);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_mul_pd(vc4, v), t));
    }
    for (; i < n; ++i) out[i] = c4 * s[i] * (s[i] * s[i] - b2);
}

void double_well_deriv_avx2(const double* s, double* out, std::size_t n, double c4, double b2) {
    __m256d vc4 = _mm256_set1_pd(c4), vb2 = _mm256_set1_pd(b2);
    __m256d three = _mm256_set1_pd(3.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(s + i);
        __m256d t = _mm256_sub_pd(_mm256_mul_pd(_mm256_mul_pd(three, v), v), vb2);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(vc4, t));
    }
    for (; i < n; ++i) out[i] = c4 * (3.0 * s[i] * s[i] - b2);
}

}  // namespace

const Ops avx2_ops = {
    matvec_avx2,       diag_mul_avx2, decay_update_avx2,
    axpy_avx2,         scale_avx2,    dot_avx2,
    weighted_sumsq_avx2, double_well_avx2, double_well_deriv_avx2,
};

}  // namespace acbe::kernels

#endif  // ACBE_HAVE_AVX2
