#include <doctest.h>

#include <cmath>
#include <vector>

#include "acbe/convolution.hpp"
#include "acbe/rng.hpp"

using namespace acbe;

namespace {

// Brute-force summation oracle: W^n = sum_{k=1}^n rho^{n-k+1} dW^k.
std::vector<double> summation_oracle(const IncrementArray& inc, const EigenBasis& basis,
                                     std::int64_t n) {
    const int m = inc.mode_count;
    std::vector<double> out(m, 0.0);
    for (int mode = 1; mode <= m; ++mode) {
        const double rho = 1.0 / (1.0 + inc.dt * basis.eigenvalue(mode));
        double acc = 0.0;
        for (std::int64_t k = 1; k <= n; ++k)
            acc += std::pow(rho, static_cast<double>(n - k + 1)) * inc.step(k - 1)[mode - 1];
        out[mode - 1] = acc;
    }
    return out;
}

}  // namespace

TEST_CASE("discrete convolution: zero increments") {
    auto basis = build_basis(4);
    IncrementArray zero;
    zero.dt = 0.1;
    zero.step_count = 8;
    zero.mode_count = 4;
    zero.values.assign(32, 0.0);
    auto traj = discrete_convolution(zero, *basis);
    for (double v : traj.values) CHECK(v == 0.0);
}

TEST_CASE("discrete convolution: unrolled two-step recursion") {
    auto basis = build_basis(1);
    const double dt = 0.3, a = 0.7, b = -1.1;
    IncrementArray inc;
    inc.dt = dt;
    inc.step_count = 2;
    inc.mode_count = 1;
    inc.values = {a, b};
    auto traj = discrete_convolution(inc, *basis);
    const double rho = 1.0 / (1.0 + dt * basis->eigenvalue(1));
    CHECK(traj.at_step(1)[0] == doctest::Approx(rho * a).epsilon(1e-15));
    CHECK(traj.at_step(2)[0] == doctest::Approx(rho * rho * a + rho * b).epsilon(1e-14));
}

TEST_CASE("discrete convolution: recursion matches summation oracle") {
    auto basis = build_basis(8);
    NoiseSpec spec(1.0, 1.0, 8);
    auto rec = sample_increments(spec, 1.0 / 16.0, 16, 3, 0);
    auto inc = rec.as_increments();
    auto traj = discrete_convolution(inc, *basis);
    for (std::int64_t n : {1, 5, 16}) {
        auto oracle = summation_oracle(inc, *basis, n);
        for (int k = 0; k < 8; ++k)
            CHECK(std::abs(traj.at_step(n)[k] - oracle[k]) < 1e-10);
    }
}

TEST_CASE("discrete convolution mean square identity") {
    const double q = 1.3, dt = 0.05;
    auto basis = build_basis(1);
    const double lambda = basis->eigenvalue(1);
    // Closed form vs direct sum.
    for (std::int64_t n : {1, 4, 17}) {
        const double rho = 1.0 / (1.0 + dt * lambda);
        double direct = 0.0;
        for (std::int64_t k = 1; k <= n; ++k)
            direct += dt * q * std::pow(rho, 2.0 * static_cast<double>(n - k + 1));
        CHECK(discrete_convolution_mean_square(q, lambda, dt, n) ==
              doctest::Approx(direct).epsilon(1e-12));
    }

    // Monte Carlo agreement within three standard errors.
    NoiseSpec spec(0.0, q, 1);
    const int paths = 20000;
    const std::int64_t n = 10;
    double sum = 0.0, sumsq = 0.0;
    for (int p = 0; p < paths; ++p) {
        auto rec = sample_increments(spec, dt, n, 55, p);
        auto traj = discrete_convolution(rec.as_increments(), *basis);
        const double v = traj.at_step(n)[0];
        sum += v;
        sumsq += v * v;
    }
    const double var = sumsq / paths - (sum / paths) * (sum / paths);
    const double target = discrete_convolution_mean_square(q, lambda, dt, n);
    const double se = target * std::sqrt(2.0 / (paths - 1.0));
    CHECK(std::abs(var - target) < 3.0 * se);
}

TEST_CASE("convolution pair: coupling and provenance") {
    auto basis = build_basis(4);
    NoiseSpec spec(1.0, 1.0, 4);
    auto rec = sample_increments(spec, 1.0 / 32.0, 32, 9, 1);
    auto exact = sample_coupled_convolution(rec, *basis);

    auto pair2 = build_convolution_pair(rec, exact, *basis, 2);
    auto pair4 = build_convolution_pair(rec, exact, *basis, 4);
    // The exact member is the fine-level path restricted to coarse times:
    // shared times agree bit for bit across factors.
    for (std::int64_t n = 1; n <= pair4.step_count; ++n)
        for (int k = 0; k < 4; ++k)
            CHECK(pair4.exact[(n - 1) * 4 + k] == pair2.exact[(2 * n - 1) * 4 + k]);

    CHECK(pair2.sup_error() > 0.0);

    auto other = sample_increments(spec, 1.0 / 32.0, 32, 10, 1);
    CHECK_THROWS_AS(build_convolution_pair(other, exact, *basis, 2), std::invalid_argument);
}
