#include "acbe/kernels.hpp"

// Reference kernels. Plain loops, no FMA contraction assumed; these define
// the semantics the SIMD variants are tested against.

namespace acbe::kernels {
namespace {

void matvec_scalar(const double* a, const double* x, double* y,
                   std::size_t rows, std::size_t cols) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = a + i * cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

void diag_mul_scalar(const double* d, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = d[i] * x[i];
}

void decay_update_scalar(const double* decay, const double* y, double* w, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) w[i] = decay[i] * w[i] + y[i];
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i];
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double weighted_sumsq_scalar(const double* w, const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * x[i] * x[i];
    return acc;
}

void double_well_scalar(const double* s, double* out, std::size_t n, double c4, double b2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = c4 * s[i] * (s[i] * s[i] - b2);
}

void double_well_deriv_scalar(const double* s, double* out, std::size_t n, double c4, double b2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = c4 * (3.0 * s[i] * s[i] - b2);
}

}  // namespace

const Ops scalar_ops = {
    matvec_scalar,       diag_mul_scalar, decay_update_scalar,
    axpy_scalar,         scale_scalar,    dot_scalar,
    weighted_sumsq_scalar, double_well_scalar, double_well_deriv_scalar,
};

}  // namespace acbe::kernels
