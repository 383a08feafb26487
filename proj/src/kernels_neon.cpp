#include "acbe/kernels.hpp"

// NEON variants for aarch64, mirroring the AVX2 set two lanes at a time.
// NEON is baseline on aarch64 so no runtime feature probe is needed.

#if defined(ACBE_HAVE_NEON)

#include <arm_neon.h>

namespace acbe::kernels {
namespace {

void matvec_neon(const double* a, const double* x, double* y,
                 std::size_t rows, std::size_t cols) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = a + i * cols;
        float64x2_t acc0 = vdupq_n_f64(0.0);
        float64x2_t acc1 = vdupq_n_f64(0.0);
        std::size_t j = 0;
        for (; j + 4 <= cols; j += 4) {
            acc0 = vfmaq_f64(acc0, vld1q_f64(row + j), vld1q_f64(x + j));
            acc1 = vfmaq_f64(acc1, vld1q_f64(row + j + 2), vld1q_f64(x + j + 2));
        }
        double acc = vaddvq_f64(acc0) + vaddvq_f64(acc1);
        for (; j < cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

void diag_mul_neon(const double* d, const double* x, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vmulq_f64(vld1q_f64(d + i), vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] = d[i] * x[i];
}

void decay_update_neon(const double* decay, const double* y, double* w, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(w + i, vfmaq_f64(vld1q_f64(y + i), vld1q_f64(decay + i), vld1q_f64(w + i)));
    for (; i < n; ++i) w[i] = decay[i] * w[i] + y[i];
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
    float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void scale_neon(double a, const double* x, double* y, std::size_t n) {
    float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vmulq_f64(va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] = a * x[i];
}

double dot_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double weighted_sumsq_neon(const double* w, const double* x, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t xv = vld1q_f64(x + i);
        acc = vfmaq_f64(acc, vmulq_f64(vld1q_f64(w + i), xv), xv);
    }
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) s += w[i] * x[i] * x[i];
    return s;
}

void double_well_neon(const double* s, double* out, std::size_t n, double c4, double b2) {
    float64x2_t vc4 = vdupq_n_f64(c4), vb2 = vdupq_n_f64(b2);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t v = vld1q_f64(s + i);
        float64x2_t t = vsubq_f64(vmulq_f64(v, v), vb2);
        vst1q_f64(out + i, vmulq_f64(vmulq_f64(vc4, v), t));
    }
    for (; i < n; ++i) out[i] = c4 * s[i] * (s[i] * s[i] - b2);
}

void double_well_deriv_neon(const double* s, double* out, std::size_t n, double c4, double b2) {
    float64x2_t vc4 = vdupq_n_f64(c4), vb2 = vdupq_n_f64(b2);
    float64x2_t three = vdupq_n_f64(3.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t v = vld1q_f64(s + i);
        float64x2_t t = vsubq_f64(vmulq_f64(vmulq_f64(three, v), v), vb2);
        vst1q_f64(out + i, vmulq_f64(vc4, t));
    }
    for (; i < n; ++i) out[i] = c4 * (3.0 * s[i] * s[i] - b2);
}

}  // namespace

const Ops neon_ops = {
    matvec_neon,       diag_mul_neon, decay_update_neon,
    axpy_neon,         scale_neon,    dot_neon,
    weighted_sumsq_neon, double_well_neon, double_well_deriv_neon,
};

}  // namespace acbe::kernels

#endif  // ACBE_HAVE_NEON
