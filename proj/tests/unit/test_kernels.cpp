#include <doctest.h>

#include <cmath>
#include <vector>

#include "acbe/kernels.hpp"
#include "acbe/rng.hpp"

using namespace acbe;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t stream) {
    rng::NormalStream s(0x51D0u, stream);
    std::vector<double> v(n);
    s.fill(v.data(), n);
    return v;
}

// Equivalence between a SIMD table and the scalar reference on one size.
void check_equivalence(const kernels::Ops& simd, std::size_t n) {
    const auto x = random_vec(n, 1);
    const auto y0 = random_vec(n, 2);
    const auto d = random_vec(n, 3);
    const auto a = random_vec(n * n, 4);
    std::vector<double> out_s(n), out_v(n);

    const double tol = 1e-11;

    kernels::scalar_ops.matvec(a.data(), x.data(), out_s.data(), n, n);
    simd.matvec(a.data(), x.data(), out_v.data(), n, n);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(out_s[i] - out_v[i]) <= tol * std::max(1.0, std::abs(out_s[i])));

    // Rectangular shapes (used by the padded transforms).
    if (n >= 3) {
        const std::size_t rows = n - 2, cols = n;
        std::vector<double> rs(rows), rv(rows);
        kernels::scalar_ops.matvec(a.data(), x.data(), rs.data(), rows, cols);
        simd.matvec(a.data(), x.data(), rv.data(), rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            CHECK(std::abs(rs[i] - rv[i]) <= tol * std::max(1.0, std::abs(rs[i])));
    }

    kernels::scalar_ops.diag_mul(d.data(), x.data(), out_s.data(), n);
    simd.diag_mul(d.data(), x.data(), out_v.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(out_s[i] == out_v[i]);

    std::vector<double> ws(y0), wv(y0);
    kernels::scalar_ops.decay_update(d.data(), x.data(), ws.data(), n);
    simd.decay_update(d.data(), x.data(), wv.data(), n);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(ws[i] - wv[i]) <= tol * std::max(1.0, std::abs(ws[i])));

    std::vector<double> as(y0), av(y0);
    kernels::scalar_ops.axpy(0.37, x.data(), as.data(), n);
    simd.axpy(0.37, x.data(), av.data(), n);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(as[i] - av[i]) <= tol * std::max(1.0, std::abs(as[i])));

    kernels::scalar_ops.scale(-1.25, x.data(), out_s.data(), n);
    simd.scale(-1.25, x.data(), out_v.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(out_s[i] == out_v[i]);

    const double dot_s = kernels::scalar_ops.dot(x.data(), y0.data(), n);
    const double dot_v = simd.dot(x.data(), y0.data(), n);
    CHECK(std::abs(dot_s - dot_v) <= tol * std::max(1.0, std::abs(dot_s)));

    const double wss_s = kernels::scalar_ops.weighted_sumsq(d.data(), x.data(), n);
    const double wss_v = simd.weighted_sumsq(d.data(), x.data(), n);
    CHECK(std::abs(wss_s - wss_v) <= tol * std::max(1.0, std::abs(wss_s)));

    kernels::scalar_ops.double_well(x.data(), out_s.data(), n, 4.0, 1.0);
    simd.double_well(x.data(), out_v.data(), n, 4.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) CHECK(out_s[i] == out_v[i]);

    kernels::scalar_ops.double_well_deriv(x.data(), out_s.data(), n, 4.0, 1.0);
    simd.double_well_deriv(x.data(), out_v.data(), n, 4.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) CHECK(out_s[i] == out_v[i]);
}

}  // namespace

TEST_CASE("scalar kernels: spot values") {
    const std::vector<double> a = {1, 2, 3, 4};  // [[1,2],[3,4]]
    const std::vector<double> x = {1, -1};
    std::vector<double> y(2);
    kernels::scalar_ops.matvec(a.data(), x.data(), y.data(), 2, 2);
    CHECK(y[0] == -1.0);
    CHECK(y[1] == -1.0);
    CHECK(kernels::scalar_ops.dot(x.data(), x.data(), 2) == 2.0);

    double s[3] = {0.0, 1.0, 2.0}, out[3];
    kernels::scalar_ops.double_well(s, out, 3, 4.0, 1.0);  // c=1, beta=1
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.0);
    CHECK(out[2] == 24.0);
}

#if defined(ACBE_HAVE_AVX2)
TEST_CASE("avx2 kernels match the scalar reference") {
    if (!kernels::backend_supported(kernels::Backend::avx2)) {
        MESSAGE("avx2 not supported on this CPU; skipping");
        return;
    }
    for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 33u, 128u, 129u})
        check_equivalence(kernels::avx2_ops, n);
}
#endif

#if defined(ACBE_HAVE_NEON)
TEST_CASE("neon kernels match the scalar reference") {
    for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 33u, 128u, 129u})
        check_equivalence(kernels::neon_ops, n);
}
#endif

TEST_CASE("backend selection") {
    const auto original = kernels::active_backend();
    kernels::set_backend(kernels::Backend::scalar);
    CHECK(kernels::active_backend() == kernels::Backend::scalar);
    CHECK(!kernels::parse_backend("auto").has_value());
    CHECK(kernels::parse_backend("scalar") == kernels::Backend::scalar);
    CHECK_THROWS(kernels::parse_backend("sse9"));
    if (!kernels::backend_supported(kernels::Backend::neon))
        CHECK_THROWS(kernels::set_backend(kernels::Backend::neon));
    kernels::set_backend(original);
}
