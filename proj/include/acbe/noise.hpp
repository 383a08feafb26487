#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "acbe/eigen_basis.hpp"

// Sampling of the Q-Wiener increments driving the equation. Q is diagonal in
// the eigenbasis with eigenvalues q_k = amplitude * lambda_k^{-decay}. The
// fine level is always sampled first; coarser levels are derived by exact
// summation so that coarse and fine paths share their randomness.

namespace acbe {

class NoiseSpec {
public:
    /// q_k = amplitude * lambda_k^{-decay_exponent}. Rejects amplitude <= 0,
    /// decay_exponent < 0, mode_count < 1.
    NoiseSpec(double decay_exponent, double amplitude, int mode_count);

    double decay_exponent() const { return decay_exponent_; }
    double amplitude() const { return amplitude_; }
    int mode_count() const { return mode_count_; }

    double mode_variance(int k) const;  // q_k, 1-based mode index
    std::vector<double> mode_variances() const;

private:
    double decay_exponent_;
    double amplitude_;
    int mode_count_;
};

struct HsNorm {
    double value;    // truncated sum (sum_{k<=M} lambda_k^{2s} q_k)^{1/2}
    bool converges;  // whether the infinite series converges (exponent test)
};

/// ||A^s Q^{1/2}||_HS truncated at M, plus a convergence flag for the full
/// series. With lambda_k ~ k^2 and q_k ~ k^{-2r} the terms decay like
/// k^{4s-2r}, so the series converges iff 4s - 2r < -1.
HsNorm hs_norm(const NoiseSpec& spec, double s);

/// A block of per-mode increments at a fixed step size, step-major layout:
/// values[j*M + k] is the increment of mode k+1 over (t_j, t_{j+1}].
struct IncrementArray {
    double dt = 0.0;
    std::int64_t step_count = 0;
    int mode_count = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t path_index = 0;
    std::vector<double> values;

    const double* step(std::int64_t j) const { return values.data() + j * mode_count; }
};

/// Fine-level increments plus the provenance needed to regenerate them.
struct WienerRecord {
    double fine_dt = 0.0;
    std::int64_t fine_count = 0;
    int mode_count = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t path_index = 0;
    std::vector<double> mode_variances;  // q_k of the generating spec
    std::vector<double> increments;      // step-major, fine_count x mode_count

    const double* step(std::int64_t j) const { return increments.data() + j * mode_count; }
    IncrementArray as_increments() const;
};

/// Independent Gaussians, mode-k step variance fine_dt * q_k. Mode streams
/// are keyed by (master_seed, path_index, mode), so enlarging M or the path
/// count does not perturb existing draws.
WienerRecord sample_increments(const NoiseSpec& spec, double fine_dt, std::int64_t fine_count,
                               std::uint64_t master_seed, std::uint64_t path_index = 0);

/// Coarse increments at dt = factor * fine_dt by exact summation. For
/// power-of-two factors the summation is a pairwise tree, which makes
/// iterated halving bit-identical to direct coarsening. Rejects factors
/// that do not divide the step count.
IncrementArray coarsen(const IncrementArray& increments, std::int64_t factor);
IncrementArray coarsen(const WienerRecord& record, std::int64_t factor);

/// Exact stochastic-convolution samples at the fine grid, coupled to the
/// record's increments. values[j*M + k] is W_A(t_{j+1}) for mode k+1;
/// W_A(0) = 0.
struct OUCoupledPath {
    double fine_dt = 0.0;
    std::int64_t fine_count = 0;
    int mode_count = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t path_index = 0;
    std::vector<double> values;

    const double* at_step(std::int64_t j) const { return values.data() + (j - 1) * mode_count; }
};

/// Draws, for each mode and fine substep, the convolution integral
/// Y = int e^{-lambda (t_j - s)} dW(s) from its exact law conditional on the
/// substep increment X (jointly Gaussian, Var X = q dt,
/// Var Y = q (1 - e^{-2 lambda dt})/(2 lambda), Cov = q (1 - e^{-lambda dt})/lambda),
/// then advances W_A(t_j) = e^{-lambda dt} W_A(t_{j-1}) + Y.
OUCoupledPath sample_coupled_convolution(const WienerRecord& record, const EigenBasis& basis);

// Conditional-law ingredients, exposed for direct testing.
struct OUSubstepLaw {
    double var_x;    // q dt
    double var_y;    // q (1 - e^{-2 lambda dt}) / (2 lambda)
    double cov_xy;   // q (1 - e^{-lambda dt}) / lambda
    double cond_coeff;  // Cov / Var X
    double cond_std;    // sqrt(Var Y - Cov^2 / Var X)
};
OUSubstepLaw ou_substep_law(double q, double lambda, double dt);

/// Reproducibility dump: header lines with M, N_f, fine_dt, seed and path,
/// then one row per mode (mode-major) of the raw increments.
void dump_record_csv(const WienerRecord& record, std::ostream& os);

}  // namespace acbe
