#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "acbe/eigen_basis.hpp"
#include "acbe/noise.hpp"

// Fully implicit backward Euler stepper for
//   u^j - u^{j-1} + dt A u^j + dt f(u^j) = dW^j,
// with the double-well gradient f(s) = 4c s (s^2 - beta^2). Each step solves
// its nonlinear system by Newton iteration: the linear part is diagonal in
// the eigenbasis, the cubic term and its Jacobian act pointwise on the
// collocation grid, and the Newton corrections come from a preconditioned
// conjugate-gradient solve of the symmetric positive definite system.

namespace acbe {

struct PotentialParams {
    double c = 1.0;
    double beta_dw = 1.0;  // the well location; "dw" to keep it apart from smoothness exponents

    PotentialParams() = default;
    PotentialParams(double c_in, double beta_in);

    /// f'(s) >= -4 c beta^2 for all s.
    double one_sided_constant() const { return 4.0 * c * beta_dw * beta_dw; }
    /// s f(s) >= -c beta^4 for all s.
    double well_depth_constant() const { return c * beta_dw * beta_dw * beta_dw * beta_dw; }
};

/// Pointwise double-well gradient and its derivative on grid values.
void f_eval(std::span<const double> grid_values, const PotentialParams& potential,
            std::span<double> out);
void f_prime_eval(std::span<const double> grid_values, const PotentialParams& potential,
                  std::span<double> out);

/// f(u) projected back onto the basis. With dealias the cubic is sampled on
/// a 2M+1 interior grid, whose quadrature is exact for products up to mode
/// 3M, so the projection is alias-free.
SpectralField nonlinearity(const SpectralField& u, const PotentialParams& potential,
                           bool dealias = false);

struct SchemeParams {
    double dt = 0.0;
    std::int64_t step_count = 0;
    double newton_tol = 1e-10;
    int newton_max = 25;
    bool dealias = false;

    double horizon() const { return dt * static_cast<double>(step_count); }
};

struct StepDiagnostics {
    int iterations = 0;
    double residual = 0.0;
};

class NewtonDivergenceError : public std::runtime_error {
public:
    NewtonDivergenceError(std::int64_t step_index, int iterations, double residual);
    std::int64_t step_index;  // -1 when outside a trajectory
    int iterations;
    double residual;
};

/// One nonlinear solve per time step. Owns the workspace; reuse one stepper
/// per trajectory.
class BackwardEulerStepper {
public:
    BackwardEulerStepper(BasisPtr basis, SchemeParams scheme, PotentialParams potential);

    /// Advances state (coefficients, in place) by one step with increment dW.
    /// Optionally records the Newton residual history (including the initial
    /// residual). Throws NewtonDivergenceError when the tolerance is not met
    /// within newton_max iterations.
    StepDiagnostics step(std::span<double> state, std::span<const double> increment,
                         std::vector<double>* residual_history = nullptr);

    const SchemeParams& scheme() const { return scheme_; }
    const PotentialParams& potential() const { return potential_; }
    const BasisPtr& basis() const { return basis_; }

private:
    void nonlinearity(std::span<const double> coeffs, std::span<double> out);
    void apply_jacobian(std::span<const double> x, std::span<double> out);
    double residual_norm(std::span<const double> u, std::span<const double> rhs,
                         std::span<double> out_negated);
    void solve_newton_correction(std::span<double> correction, std::span<const double> neg_residual);

    BasisPtr basis_;
    SchemeParams scheme_;
    PotentialParams potential_;
    std::vector<double> dt_lambda_;

    // Padded-grid transform used when dealias is on (grid of 2M+1 points).
    std::vector<double> pad_forward_;   // (2M+1) x M
    std::vector<double> pad_backward_;  // M x (2M+1), includes the 1/(P+1) weight
    int pad_points_ = 0;

    // Workspace
    std::vector<double> grid_, fgrid_, fprime_grid_, work_m_, work_p_;
    std::vector<double> cg_r_, cg_z_, cg_p_, cg_ap_, precond_;
};

/// Single-step convenience wrapper around the stepper.
std::pair<SpectralField, StepDiagnostics> backward_euler_step(const SpectralField& u_prev,
                                                              const SpectralField& increment,
                                                              const SchemeParams& scheme,
                                                              const PotentialParams& potential);

struct Trajectory {
    BasisPtr basis;
    double dt = 0.0;
    std::int64_t step_count = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t path_index = 0;
    std::vector<double> states;  // (step_count+1) x M, row 0 is u0
    std::vector<StepDiagnostics> diagnostics;

    int mode_count() const { return basis->mode_count(); }
    std::span<const double> state(std::int64_t n) const;
    SpectralField state_field(std::int64_t n) const;
    double state_l2(std::int64_t n) const;
    double state_h1(std::int64_t n) const;
    int max_newton_iterations() const;
    double max_newton_residual() const;
};

/// Steps sequentially through the given increments. Increment count defines
/// N; N = 0 yields the trajectory [u0].
Trajectory simulate_path(const SpectralField& u0, const IncrementArray& increments,
                         const SchemeParams& scheme, const PotentialParams& potential);

/// Fine backward Euler trajectory on the record's own grid, serving as the
/// reference u(t_n) surrogate at all coarser dyadic levels.
Trajectory reference_solution(const SpectralField& u0, const WienerRecord& record,
                              const SchemeParams& scheme, const PotentialParams& potential);

/// Largest dt for which I + dt A + dt f' stays strongly monotone:
/// dt * 4 c beta^2 < 1.
double solvability_window(const PotentialParams& potential);

/// The default initial datum: coefficients k^{-3}, scaled so that the H1
/// norm is one.
SpectralField default_initial_datum(const BasisPtr& basis);

}  // namespace acbe
