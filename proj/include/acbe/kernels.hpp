#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

// Inner-loop arithmetic kernels. Every kernel has a scalar reference
// implementation plus SIMD variants (AVX2 on x86-64, NEON on aarch64)
// selected at runtime. The variants are equivalence-tested against the
// scalar reference; see tests/unit/test_kernels.cpp.

namespace acbe::kernels {

struct Ops {
    // y = A x with A row-major, rows x cols.
    void (*matvec)(const double* a, const double* x, double* y,
                   std::size_t rows, std::size_t cols);
    // y[i] = d[i] * x[i]
    void (*diag_mul)(const double* d, const double* x, double* y, std::size_t n);
    // w[i] = decay[i] * w[i] + y[i]  (one step of a per-mode linear recursion)
    void (*decay_update)(const double* decay, const double* y, double* w, std::size_t n);
    // y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // y[i] = a * x[i]
    void (*scale)(double a, const double* x, double* y, std::size_t n);
    double (*dot)(const double* x, const double* y, std::size_t n);
    // sum_i w[i] * x[i]^2
    double (*weighted_sumsq)(const double* w, const double* x, std::size_t n);
    // out[i] = c4 * s[i] * (s[i]^2 - b2), the double-well gradient with c4 = 4c, b2 = beta^2
    void (*double_well)(const double* s, double* out, std::size_t n, double c4, double b2);
    // out[i] = c4 * (3 s[i]^2 - b2)
    void (*double_well_deriv)(const double* s, double* out, std::size_t n, double c4, double b2);
};

enum class Backend { scalar, avx2, neon };

/// Active kernel table. Defaults to the best backend the CPU supports.
const Ops& ops();

Backend active_backend();
bool backend_supported(Backend b);

/// Selects the backend process-wide. Throws std::runtime_error if the CPU
/// does not support it. Call before spawning workers.
void set_backend(Backend b);

/// Parses "scalar" / "avx2" / "neon"; "auto" yields nullopt (keep default).
std::optional<Backend> parse_backend(std::string_view name);
std::string backend_name(Backend b);

// Individual tables, exposed for equivalence tests. ACBE_HAVE_AVX2 and
// ACBE_HAVE_NEON are set by the build when the variant is compiled in.
extern const Ops scalar_ops;
#if defined(ACBE_HAVE_AVX2)
extern const Ops avx2_ops;
#endif
#if defined(ACBE_HAVE_NEON)
extern const Ops neon_ops;
#endif

}  // namespace acbe::kernels
