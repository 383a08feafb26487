#include "acbe/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "acbe/kernels.hpp"
#include "acbe/spectral_ops.hpp"

namespace acbe {
namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double vec_norm(std::span<const double> v) {
    return std::sqrt(kernels::ops().dot(v.data(), v.data(), v.size()));
}

}  // namespace

PotentialParams::PotentialParams(double c_in, double beta_in) : c(c_in), beta_dw(beta_in) {
    if (!(c > 0.0)) throw std::invalid_argument("PotentialParams: c must be > 0");
    if (!(beta_dw > 0.0)) throw std::invalid_argument("PotentialParams: beta must be > 0");
}

void f_eval(std::span<const double> grid_values, const PotentialParams& potential,
            std::span<double> out) {
    kernels::ops().double_well(grid_values.data(), out.data(), grid_values.size(),
                               4.0 * potential.c, potential.beta_dw * potential.beta_dw);
}

void f_prime_eval(std::span<const double> grid_values, const PotentialParams& potential,
                  std::span<double> out) {
    kernels::ops().double_well_deriv(grid_values.data(), out.data(), grid_values.size(),
                                     4.0 * potential.c, potential.beta_dw * potential.beta_dw);
}

SpectralField nonlinearity(const SpectralField& u, const PotentialParams& potential,
                           bool dealias) {
    const BasisPtr& basis = u.basis();
    const int m = basis->mode_count();
    if (!dealias) {
        std::vector<double> g = to_grid(u);
        std::vector<double> fg(g.size());
        f_eval(g, potential, fg);
        return from_grid(basis, fg);
    }
    // Embed into the (2M+1)-mode basis, whose own collocation grid has
    // 2M+1 points, evaluate there, and truncate the projection back to M.
    const int p = 2 * m + 1;
    const BasisPtr padded = build_basis(p);
    std::vector<double> cpad(p, 0.0);
    std::copy(u.coeffs().begin(), u.coeffs().end(), cpad.begin());
    SpectralField upad(padded, std::move(cpad));
    std::vector<double> g = to_grid(upad);
    std::vector<double> fg(g.size());
    f_eval(g, potential, fg);
    SpectralField fpad = from_grid(padded, fg);
    std::vector<double> out(fpad.coeffs().begin(), fpad.coeffs().begin() + m);
    return {basis, std::move(out)};
}

NewtonDivergenceError::NewtonDivergenceError(std::int64_t step, int iters, double res)
    : std::runtime_error("Newton iteration failed to reach tolerance" +
                         (step >= 0 ? " at step " + std::to_string(step) : std::string()) +
                         " (iterations=" + std::to_string(iters) +
                         ", residual=" + std::to_string(res) + ")"),
      step_index(step),
      iterations(iters),
      residual(res) {}

double solvability_window(const PotentialParams& potential) {
    return 1.0 / potential.one_sided_constant();
}

BackwardEulerStepper::BackwardEulerStepper(BasisPtr basis, SchemeParams scheme,
                                           PotentialParams potential)
    : basis_(std::move(basis)), scheme_(scheme), potential_(potential) {
    if (!(scheme_.dt > 0.0)) throw std::invalid_argument("SchemeParams: dt must be > 0");
    if (scheme_.newton_max < 1) throw std::invalid_argument("SchemeParams: newton_max must be >= 1");
    if (!(scheme_.newton_tol > 0.0))
        throw std::invalid_argument("SchemeParams: newton_tol must be > 0");
    if (!(scheme_.dt * potential_.one_sided_constant() < 1.0))
        throw std::invalid_argument(
            "dt=" + std::to_string(scheme_.dt) + " is outside the solvability window dt < " +
            std::to_string(solvability_window(potential_)) + " (dt * 4 c beta^2 < 1)");

    const int m = basis_->mode_count();
    dt_lambda_.resize(m);
    for (int k = 1; k <= m; ++k) dt_lambda_[k - 1] = scheme_.dt * basis_->eigenvalue(k);

    grid_.resize(m);
    fgrid_.resize(m);
    fprime_grid_.resize(m);
    work_m_.resize(m);
    cg_r_.resize(m);
    cg_z_.resize(m);
    cg_p_.resize(m);
    cg_ap_.resize(m);
    precond_.resize(m);

    if (scheme_.dealias) {
        // Cubic products of M modes live below mode 3M; sampling on 2M+1
        // interior points keeps their projection onto the first M modes
        // alias-free.
        pad_points_ = 2 * m + 1;
        const int p = pad_points_;
        pad_forward_.resize(static_cast<std::size_t>(p) * m);
        pad_backward_.resize(static_cast<std::size_t>(m) * p);
        const std::int64_t period = 2 * (static_cast<std::int64_t>(p) + 1);
        const double sqrt2 = std::sqrt(2.0);
        for (std::int64_t i = 1; i <= p; ++i) {
            for (std::int64_t k = 1; k <= m; ++k) {
                std::int64_t reduced = (i * k) % period;
                double value = sqrt2 * std::sin(kPi * static_cast<double>(reduced) / (p + 1));
                pad_forward_[(i - 1) * m + (k - 1)] = value;
                pad_backward_[(k - 1) * p + (i - 1)] = value / (p + 1);
            }
        }
        grid_.resize(p);
        fgrid_.resize(p);
        fprime_grid_.resize(p);
        work_p_.resize(p);
    }
}

void BackwardEulerStepper::nonlinearity(std::span<const double> coeffs, std::span<double> out) {
    const int m = basis_->mode_count();
    if (scheme_.dealias) {
        kernels::ops().matvec(pad_forward_.data(), coeffs.data(), grid_.data(), pad_points_, m);
        f_eval({grid_.data(), static_cast<std::size_t>(pad_points_)}, potential_,
               {fgrid_.data(), static_cast<std::size_t>(pad_points_)});
        kernels::ops().matvec(pad_backward_.data(), fgrid_.data(), out.data(), m, pad_points_);
    } else {
        basis_->to_grid(coeffs, {grid_.data(), static_cast<std::size_t>(m)});
        f_eval({grid_.data(), static_cast<std::size_t>(m)}, potential_,
               {fgrid_.data(), static_cast<std::size_t>(m)});
        basis_->from_grid({fgrid_.data(), static_cast<std::size_t>(m)}, out);
    }
}

// J x = x + dt Lambda x + dt * P f'(g) P^{-1} x, with f'(g) frozen at the
// current Newton iterate (fprime_grid_).
void BackwardEulerStepper::apply_jacobian(std::span<const double> x, std::span<double> out) {
    const int m = basis_->mode_count();
    if (scheme_.dealias) {
        kernels::ops().matvec(pad_forward_.data(), x.data(), work_p_.data(), pad_points_, m);
        kernels::ops().diag_mul(fprime_grid_.data(), work_p_.data(), work_p_.data(), pad_points_);
        kernels::ops().matvec(pad_backward_.data(), work_p_.data(), out.data(), m, pad_points_);
    } else {
        basis_->to_grid(x, {work_m_.data(), static_cast<std::size_t>(m)});
        kernels::ops().diag_mul(fprime_grid_.data(), work_m_.data(), work_m_.data(), m);
        basis_->from_grid({work_m_.data(), static_cast<std::size_t>(m)}, out);
    }
    for (int k = 0; k < m; ++k) out[k] = x[k] + dt_lambda_[k] * x[k] + scheme_.dt * out[k];
}

StepDiagnostics BackwardEulerStepper::step(std::span<double> state,
                                           std::span<const double> increment,
                                           std::vector<double>* residual_history) {
    const int m = basis_->mode_count();
    if (state.size() != static_cast<std::size_t>(m) ||
        increment.size() != static_cast<std::size_t>(m))
        throw std::invalid_argument("step: state/increment length mismatch");

    // rhs = u_prev + dW
    std::vector<double> rhs(state.begin(), state.end());
    kernels::ops().axpy(1.0, increment.data(), rhs.data(), m);

    std::vector<double> neg_residual(m);
    std::vector<double> correction(m);

    StepDiagnostics diag;
    double last_res = 0.0;
    for (int iter = 0; iter <= scheme_.newton_max; ++iter) {
        // G(u) = u + dt Lambda u + dt N(u) - rhs; also refreshes the grid
        // values used by the Jacobian.
        nonlinearity(state, {work_m_.data(), static_cast<std::size_t>(m)});
        for (int k = 0; k < m; ++k)
            neg_residual[k] =
                rhs[k] - (state[k] + dt_lambda_[k] * state[k] + scheme_.dt * work_m_[k]);
        last_res = vec_norm(neg_residual);
        if (residual_history) residual_history->push_back(last_res);
        if (last_res <= scheme_.newton_tol) {
            diag.iterations = iter;
            diag.residual = last_res;
            return diag;
        }
        if (iter == scheme_.newton_max) break;

        const int grid_n = scheme_.dealias ? pad_points_ : m;
        f_prime_eval({grid_.data(), static_cast<std::size_t>(grid_n)}, potential_,
                     {fprime_grid_.data(), static_cast<std::size_t>(grid_n)});
        solve_newton_correction(correction, neg_residual);
        kernels::ops().axpy(1.0, correction.data(), state.data(), m);
    }
    throw NewtonDivergenceError(-1, scheme_.newton_max, last_res);
}

// Preconditioned CG on J delta = -G. J is symmetric positive definite inside
// the solvability window; the preconditioner is the diagonal surrogate
// 1 + dt lambda_k + dt * mean(f').
void BackwardEulerStepper::solve_newton_correction(std::span<double> correction,
                                                   std::span<const double> neg_residual) {
    const int m = basis_->mode_count();
    const int grid_n = scheme_.dealias ? pad_points_ : m;
    const double mean_fprime =
        std::accumulate(fprime_grid_.begin(), fprime_grid_.begin() + grid_n, 0.0) / grid_n;
    for (int k = 0; k < m; ++k) {
        const double d = 1.0 + dt_lambda_[k] + scheme_.dt * mean_fprime;
        precond_[k] = d > 0.0 ? 1.0 / d : 1.0;
    }

    std::fill(correction.begin(), correction.end(), 0.0);
    std::copy(neg_residual.begin(), neg_residual.end(), cg_r_.begin());
    kernels::ops().diag_mul(precond_.data(), cg_r_.data(), cg_z_.data(), m);
    std::copy(cg_z_.begin(), cg_z_.end(), cg_p_.begin());
    double rz = kernels::ops().dot(cg_r_.data(), cg_z_.data(), m);

    const double tol = scheme_.newton_tol * 0.1;  // inner residual contract
    const int max_cg = 4 * m;
    for (int it = 0; it < max_cg; ++it) {
        if (vec_norm({cg_r_.data(), static_cast<std::size_t>(m)}) <= tol) return;
        apply_jacobian({cg_p_.data(), static_cast<std::size_t>(m)},
                       {cg_ap_.data(), static_cast<std::size_t>(m)});
        const double pap = kernels::ops().dot(cg_p_.data(), cg_ap_.data(), m);
        if (!(pap > 0.0))
            throw std::runtime_error("CG breakdown: system not positive definite (p'Jp=" +
                                     std::to_string(pap) + ")");
        const double alpha = rz / pap;
        kernels::ops().axpy(alpha, cg_p_.data(), correction.data(), m);
        kernels::ops().axpy(-alpha, cg_ap_.data(), cg_r_.data(), m);
        kernels::ops().diag_mul(precond_.data(), cg_r_.data(), cg_z_.data(), m);
        const double rz_new = kernels::ops().dot(cg_r_.data(), cg_z_.data(), m);
        const double beta = rz_new / rz;
        for (int k = 0; k < m; ++k) cg_p_[k] = cg_z_[k] + beta * cg_p_[k];
        rz = rz_new;
    }
    throw std::runtime_error("CG failed to converge within " + std::to_string(max_cg) +
                             " iterations");
}

std::pair<SpectralField, StepDiagnostics> backward_euler_step(const SpectralField& u_prev,
                                                              const SpectralField& increment,
                                                              const SchemeParams& scheme,
                                                              const PotentialParams& potential) {
    require_same_basis(u_prev, increment);
    BackwardEulerStepper stepper(u_prev.basis(), scheme, potential);
    std::vector<double> state(u_prev.coeffs().begin(), u_prev.coeffs().end());
    StepDiagnostics diag = stepper.step(state, increment.coeffs());
    return {SpectralField(u_prev.basis(), std::move(state)), diag};
}

std::span<const double> Trajectory::state(std::int64_t n) const {
    const int m = mode_count();
    return {states.data() + n * m, static_cast<std::size_t>(m)};
}

SpectralField Trajectory::state_field(std::int64_t n) const {
    auto s = state(n);
    return {basis, std::vector<double>(s.begin(), s.end())};
}

double Trajectory::state_l2(std::int64_t n) const {
    auto s = state(n);
    return std::sqrt(kernels::ops().dot(s.data(), s.data(), s.size()));
}

double Trajectory::state_h1(std::int64_t n) const {
    auto s = state(n);
    return std::sqrt(
        kernels::ops().weighted_sumsq(basis->eigenvalues().data(), s.data(), s.size()));
}

int Trajectory::max_newton_iterations() const {
    int worst = 0;
    for (const auto& d : diagnostics) worst = std::max(worst, d.iterations);
    return worst;
}

double Trajectory::max_newton_residual() const {
    double worst = 0.0;
    for (const auto& d : diagnostics) worst = std::max(worst, d.residual);
    return worst;
}

Trajectory simulate_path(const SpectralField& u0, const IncrementArray& increments,
                         const SchemeParams& scheme, const PotentialParams& potential) {
    if (u0.mode_count() != increments.mode_count)
        throw std::invalid_argument("simulate_path: increments do not match the basis");
    SchemeParams resolved = scheme;
    resolved.dt = increments.dt;
    resolved.step_count = increments.step_count;

    Trajectory traj;
    traj.basis = u0.basis();
    traj.dt = resolved.dt;
    traj.step_count = resolved.step_count;
    traj.master_seed = increments.master_seed;
    traj.path_index = increments.path_index;
    const int m = u0.mode_count();
    traj.states.resize(static_cast<std::size_t>(resolved.step_count + 1) * m);
    std::copy(u0.coeffs().begin(), u0.coeffs().end(), traj.states.begin());
    traj.diagnostics.reserve(resolved.step_count);

    BackwardEulerStepper stepper(u0.basis(), resolved, potential);
    std::vector<double> state(u0.coeffs().begin(), u0.coeffs().end());
    for (std::int64_t j = 0; j < resolved.step_count; ++j) {
        try {
            traj.diagnostics.push_back(stepper.step(state, {increments.step(j),
                                                            static_cast<std::size_t>(m)}));
        } catch (const NewtonDivergenceError& e) {
            throw NewtonDivergenceError(j + 1, e.iterations, e.residual);
        }
        std::copy(state.begin(), state.end(), traj.states.begin() + (j + 1) * m);
    }
    return traj;
}

Trajectory reference_solution(const SpectralField& u0, const WienerRecord& record,
                              const SchemeParams& scheme, const PotentialParams& potential) {
    return simulate_path(u0, record.as_increments(), scheme, potential);
}

SpectralField default_initial_datum(const BasisPtr& basis) {
    const int m = basis->mode_count();
    std::vector<double> c(m);
    for (int k = 1; k <= m; ++k) c[k - 1] = std::pow(static_cast<double>(k), -3.0);
    double h1sq = 0.0;
    for (int k = 1; k <= m; ++k) h1sq += basis->eigenvalue(k) * c[k - 1] * c[k - 1];
    const double scale = 1.0 / std::sqrt(h1sq);
    for (double& v : c) v *= scale;
    return {basis, std::move(c)};
}

}  // namespace acbe
