#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "acbe/experiments.hpp"
#include "acbe/kernels.hpp"
#include "acbe/rng.hpp"
#include "acbe/scheme.hpp"
#include "acbe/spectral_ops.hpp"

using namespace acbe;

namespace {

SpectralField smooth_random_field(const BasisPtr& basis, std::uint64_t stream, double decay) {
    std::vector<double> c(basis->mode_count());
    rng::NormalStream s(0xF1E1Du, stream);
    for (int k = 1; k <= basis->mode_count(); ++k)
        c[k - 1] = s.next() * std::pow(static_cast<double>(k), -decay);
    return {basis, std::move(c)};
}

IncrementArray zero_increments(int modes, std::int64_t steps, double dt) {
    IncrementArray inc;
    inc.dt = dt;
    inc.step_count = steps;
    inc.mode_count = modes;
    inc.values.assign(static_cast<std::size_t>(steps) * modes, 0.0);
    return inc;
}

}  // namespace

TEST_CASE("double-well gradient values") {
    PotentialParams pot(1.0, 1.0);
    double s[4] = {2.0, 0.0, 1.0, -1.0}, out[4];
    f_eval({s, 4}, pot, {out, 4});
    CHECK(out[0] == 24.0);             // 4 * 2 * 3
    CHECK(out[1] == 0.0);              // f(0) = 0
    CHECK(out[2] == 0.0);              // f(beta) = 0
    CHECK(out[3] == 0.0);              // f(-beta) = 0
    f_prime_eval({s, 4}, pot, {out, 4});
    CHECK(out[1] == -4.0);             // min of f' at s = 0
    CHECK(pot.one_sided_constant() == 4.0);
    CHECK(solvability_window(pot) == 0.25);

    CHECK_THROWS_AS(PotentialParams(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(PotentialParams(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("stepper rejects dt outside the solvability window") {
    auto basis = build_basis(8);
    SchemeParams scheme;
    scheme.dt = 0.25;  // equals 1/(4 c beta^2), not strictly inside
    CHECK_THROWS_AS(BackwardEulerStepper(basis, scheme, PotentialParams(1.0, 1.0)),
                    std::invalid_argument);
    scheme.dt = 0.24;
    CHECK_NOTHROW(BackwardEulerStepper(basis, scheme, PotentialParams(1.0, 1.0)));
}

TEST_CASE("backward euler step: near-linear limit") {
    auto basis = build_basis(16);
    SchemeParams scheme;
    scheme.dt = 0.1;
    PotentialParams weak(1e-8, 1.0);
    std::vector<double> e1(16, 0.0);
    e1[0] = 1.0;
    SpectralField u_prev(basis, e1);
    SpectralField zero(basis);
    auto [u, diag] = backward_euler_step(u_prev, zero, scheme, weak);
    const double expected = 1.0 / (1.0 + 0.1 * basis->eigenvalue(1));
    CHECK(std::abs(u.coeff(1) - expected) < 1e-6);  // O(c) perturbation
    CHECK(diag.residual <= scheme.newton_tol);
}

TEST_CASE("backward euler step: well bottom candidate") {
    // u_prev = projection of the constant profile at the well bottom; the
    // candidate x = (I + dt A)^{-1} u_prev has residual exactly dt * N(x).
    auto basis = build_basis(32);
    PotentialParams pot(1.0, 1.0);
    SchemeParams scheme;
    scheme.dt = 0.05;
    std::vector<double> grid(32, pot.beta_dw);
    SpectralField u_prev = from_grid(basis, grid);
    SpectralField candidate = resolvent_power_apply(u_prev, scheme.dt, 1);

    SpectralField n_candidate = nonlinearity(candidate, pot);
    SpectralField a_candidate = apply_fractional_power(candidate, 1.0);
    // G(x) = x + dt A x + dt N(x) - u_prev = dt N(x) since the linear part cancels.
    SpectralField residual =
        candidate + scheme.dt * a_candidate + scheme.dt * n_candidate - u_prev;
    CHECK(sobolev_norm(residual - scheme.dt * n_candidate, 0.0) < 1e-12);

    SpectralField zero(basis);
    auto [u, diag] = backward_euler_step(u_prev, zero, scheme, pot);
    const double bound = scheme.dt * sobolev_norm(n_candidate, 0.0) /
                         (1.0 - scheme.dt * pot.one_sided_constant());
    CHECK(sobolev_norm(u - candidate, 0.0) <= bound * 1.01 + 1e-12);
    CHECK(diag.residual <= scheme.newton_tol);
}

TEST_CASE("newton iteration contracts quadratically") {
    auto basis = build_basis(64);
    PotentialParams pot(1.0, 1.0);
    SchemeParams scheme;
    scheme.dt = 0.01;
    BackwardEulerStepper stepper(basis, scheme, pot);

    auto u = smooth_random_field(basis, 50, 1.5);
    std::vector<double> state(u.coeffs().begin(), u.coeffs().end());
    auto kick = smooth_random_field(basis, 51, 2.0);
    std::vector<double> dw(kick.coeffs().begin(), kick.coeffs().end());
    kernels::ops().scale(0.5, dw.data(), dw.data(), dw.size());

    std::vector<double> history;
    stepper.step(state, dw, &history);
    REQUIRE(history.size() >= 3);
    CHECK(history.back() <= scheme.newton_tol);
    int contractions = 0;
    for (std::size_t i = 0; i + 1 < history.size(); ++i) {
        if (history[i] < 1e-14) break;
        // r_{i+1} <= K r_i^2 with a generous K; below ~1e-10 the inexact
        // inner solves floor the residual, so only earlier pairs count.
        if (history[i + 1] > 1e-10) {
            CHECK(history[i + 1] <= 100.0 * history[i] * history[i]);
            ++contractions;
        }
    }
    CHECK(contractions >= 1);
}

TEST_CASE("newton divergence is surfaced with the step index") {
    auto basis = build_basis(16);
    PotentialParams pot(1.0, 1.0);
    SchemeParams scheme;
    scheme.dt = 0.2;
    scheme.newton_max = 1;  // starve the solver
    NoiseSpec spec(1.0, 25.0, 16);
    auto rec = sample_increments(spec, 0.2, 5, 3, 0);
    auto u0 = default_initial_datum(basis);
    try {
        simulate_path(u0, rec.as_increments(), scheme, pot);
        FAIL("expected NewtonDivergenceError");
    } catch (const NewtonDivergenceError& e) {
        CHECK(e.step_index >= 1);
        CHECK(e.iterations == 1);
    }
}

TEST_CASE("simulate_path basics") {
    auto basis = build_basis(16);
    PotentialParams pot(1.0, 1.0);
    SchemeParams scheme;
    scheme.dt = 0.05;

    auto u0 = default_initial_datum(basis);
    auto empty = simulate_path(u0, zero_increments(16, 0, 0.05), scheme, pot);
    CHECK(empty.step_count == 0);
    CHECK(empty.state_l2(0) == doctest::Approx(sobolev_norm(u0, 0.0)));

    // Zero is an equilibrium: zero noise and u0 = 0 stay exactly zero.
    SpectralField zero_field(basis);
    auto still = simulate_path(zero_field, zero_increments(16, 12, 0.05), scheme, pot);
    for (double v : still.states) CHECK(v == 0.0);
    CHECK(still.max_newton_iterations() == 0);

    // ||u0||_1 = 1 by construction.
    CHECK(sobolev_norm(u0, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("deterministic dissipativity: ||u^n||^2 <= ||u0||^2 + 2 c beta^4 T") {
    auto basis = build_basis(32);
    PotentialParams pot(1.0, 1.3);
    SchemeParams scheme;
    scheme.dt = 0.05;
    REQUIRE(scheme.dt < solvability_window(pot));
    auto u0 = 1.7 * smooth_random_field(basis, 60, 1.2);
    auto traj = simulate_path(u0, zero_increments(32, 40, scheme.dt), scheme, pot);
    const double bound = std::pow(sobolev_norm(u0, 0.0), 2) +
                         2.0 * pot.well_depth_constant() * traj.dt * traj.step_count;
    for (std::int64_t n = 0; n <= traj.step_count; ++n)
        CHECK(traj.state_l2(n) * traj.state_l2(n) <= bound + 1e-8);
}

TEST_CASE("discrete a priori energy identity per path") {
    // ||u^n||^2 + sum ||u^j - u^{j-1}||^2 + 2 dt sum ||u^j||_1^2
    //   <= ||u0||^2 + 2 C T + 2 sum <dW^j, u^j>, with C = c beta^4.
    auto basis = build_basis(32);
    PotentialParams pot(1.0, 1.0);
    SchemeParams scheme;
    scheme.dt = 1.0 / 64.0;
    NoiseSpec spec(1.6, 25.0, 32);
    auto rec = sample_increments(spec, scheme.dt, 64, 17, 0);
    auto u0 = default_initial_datum(basis);
    auto traj = simulate_path(u0, rec.as_increments(), scheme, pot);

    const int m = 32;
    double jumps = 0.0, energy = 0.0, noise_work = 0.0;
    for (std::int64_t j = 1; j <= traj.step_count; ++j) {
        double jump = 0.0, dot = 0.0;
        for (int k = 0; k < m; ++k) {
            const double d = traj.state(j)[k] - traj.state(j - 1)[k];
            jump += d * d;
            dot += rec.increments[(j - 1) * m + k] * traj.state(j)[k];
        }
        jumps += jump;
        noise_work += dot;
        energy += traj.state_h1(j) * traj.state_h1(j);

        const double lhs = traj.state_l2(j) * traj.state_l2(j) + jumps +
                           2.0 * scheme.dt * energy;
        const double rhs = traj.state_l2(0) * traj.state_l2(0) +
                           2.0 * pot.well_depth_constant() * scheme.dt * j +
                           2.0 * noise_work;
        CHECK(lhs <= rhs + 1e-6);
    }
}

TEST_CASE("cubic growth bound ||f(u)|| <= C (||u|| + ||u||_1^3)") {
    PotentialParams pot(1.0, 1.0);
    const auto max_ratio = [&](int modes) {
        auto basis = build_basis(modes);
        double worst = 0.0;
        for (std::uint64_t s = 100; s < 140; ++s) {
            auto u = smooth_random_field(basis, s, 2.0);
            const double num = sobolev_norm(nonlinearity(u, pot), 0.0);
            const double den =
                sobolev_norm(u, 0.0) + std::pow(sobolev_norm(u, 1.0), 3.0);
            worst = std::max(worst, num / den);
        }
        return worst;
    };
    const double c64 = max_ratio(64), c128 = max_ratio(128);
    CHECK(std::isfinite(c64));
    CHECK(std::abs(c128 - c64) / c64 < 0.25);  // stable under mode doubling
}

TEST_CASE("per-step monotonicity lower bound") {
    // min over the grid of 1 + dt f'(u) >= 1 - dt * 4 c beta^2.
    auto basis = build_basis(48);
    PotentialParams pot(0.7, 1.2);
    const double dt = 0.1;
    REQUIRE(dt < solvability_window(pot));
    for (std::uint64_t s = 200; s < 210; ++s) {
        auto u = smooth_random_field(basis, s, 1.0);
        auto g = to_grid(u);
        std::vector<double> fp(g.size());
        f_prime_eval(g, pot, fp);
        double lo = 1e300;
        for (double v : fp) lo = std::min(lo, 1.0 + dt * v);
        CHECK(lo >= 1.0 - dt * pot.one_sided_constant() - 1e-12);
        CHECK(lo > 0.0);
    }
}

TEST_CASE("reference solution determinism and self-consistency") {
    auto basis = build_basis(32);
    PotentialParams pot(1.0, 1.0);
    NoiseSpec spec(2.0, 1.0, 32);
    SchemeParams scheme;
    scheme.dt = 1.0;  // resolved from increments

    const double half_dt = std::pow(2.0, -9);
    auto rec = sample_increments(spec, half_dt, 512, 23, 0);
    auto u0 = default_initial_datum(basis);

    auto ref_half = reference_solution(u0, rec, scheme, pot);
    auto ref_half_again = reference_solution(u0, rec, scheme, pot);
    CHECK(ref_half.states == ref_half_again.states);  // same seed, same bits

    auto ref_base = simulate_path(u0, coarsen(rec, 2), scheme, pot);
    CHECK(pathwise_error(ref_base, ref_base) == 0.0);

    // The reference is converged enough: its own refinement moves it far
    // less than the first coarse level errs.
    const double self_diff = pathwise_error(ref_half, ref_base);
    auto coarse = simulate_path(u0, coarsen(rec, 32), scheme, pot);  // dt = 2^-4
    const double first_level_error = pathwise_error(ref_half, coarse);
    CHECK(first_level_error >= 2.0 * self_diff);
}

TEST_CASE("dealiased nonlinearity matches a high-resolution quadrature oracle") {
    const int m = 24;
    auto basis = build_basis(m);
    PotentialParams pot(1.0, 1.0);
    auto u = smooth_random_field(basis, 77, 2.0);

    // Oracle: project f(u) onto the first m modes with a much finer exact
    // quadrature (4m+3 points resolves products up to mode 4m).
    const int big = 4 * m + 3;
    auto big_basis = build_basis(big);
    std::vector<double> cu_big(big, 0.0);
    for (int k = 0; k < m; ++k) cu_big[k] = u.coeffs()[k];
    auto fu_big = nonlinearity(SpectralField(big_basis, cu_big), pot);

    auto padded = nonlinearity(u, pot, true);
    auto aliased = nonlinearity(u, pot, false);
    double worst_pad = 0.0, worst_alias = 0.0;
    for (int k = 0; k < m; ++k) {
        worst_pad = std::max(worst_pad, std::abs(padded.coeffs()[k] - fu_big.coeffs()[k]));
        worst_alias = std::max(worst_alias, std::abs(aliased.coeffs()[k] - fu_big.coeffs()[k]));
    }
    CHECK(worst_pad < 1e-12);        // 2m+1 points are alias-free for cubics
    CHECK(worst_alias > 100.0 * worst_pad);  // the plain grid does alias

    // The stepper's padded path solves against the same alias-free operator:
    // its converged state satisfies u' + dt(A u' + N_pad(u')) = rhs.
    SchemeParams scheme;
    scheme.dt = 0.01;
    scheme.dealias = true;
    BackwardEulerStepper stepper(basis, scheme, pot);
    std::vector<double> state(u.coeffs().begin(), u.coeffs().end());
    std::vector<double> zero(m, 0.0);
    stepper.step(state, zero);
    SpectralField u_next(basis, state);
    SpectralField residual = u_next + scheme.dt * apply_fractional_power(u_next, 1.0) +
                             scheme.dt * nonlinearity(u_next, pot, true) - u;
    CHECK(sobolev_norm(residual, 0.0) <= scheme.newton_tol * 1.01);
}

TEST_CASE("trajectory dump round trip") {
    auto basis = build_basis(8);
    PotentialParams pot(1.0, 1.0);
    SchemeParams scheme;
    scheme.dt = 0.05;
    NoiseSpec spec(1.0, 1.0, 8);
    auto rec = sample_increments(spec, 0.05, 10, 77, 4);
    auto traj = simulate_path(default_initial_datum(basis), rec.as_increments(), scheme, pot);

    const auto path = std::filesystem::temp_directory_path() / "acbe_traj_test.bin";
    dump_trajectory(traj, path);
    auto loaded = load_trajectory(path, basis);
    CHECK(loaded.states == traj.states);
    CHECK(loaded.dt == traj.dt);
    CHECK(loaded.master_seed == traj.master_seed);
    CHECK(loaded.path_index == traj.path_index);
    std::filesystem::remove(path);
}
