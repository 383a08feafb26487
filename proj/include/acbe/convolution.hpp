#pragma once

#include <cstdint>
#include <vector>

#include "acbe/eigen_basis.hpp"
#include "acbe/noise.hpp"

// Backward-Euler approximation of the stochastic convolution: the recursion
// W^n = (I + dt A)^{-1} (W^{n-1} + dW^n), coupled against the exact
// convolution samples from the noise module.

namespace acbe {

/// Per-mode trajectory of the discrete convolution, step-major; values at
/// t_1..t_N (W^0 = 0).
struct DiscreteConvolution {
    double dt = 0.0;
    std::int64_t step_count = 0;
    int mode_count = 0;
    std::vector<double> values;

    const double* at_step(std::int64_t n) const { return values.data() + (n - 1) * mode_count; }
};

DiscreteConvolution discrete_convolution(const IncrementArray& increments,
                                         const EigenBasis& basis);

/// Exact and discrete convolution members on a common coarse grid, driven by
/// the same increments.
struct ConvolutionPair {
    double dt = 0.0;                // coarse step
    std::int64_t step_count = 0;
    std::int64_t factor = 0;        // coarse dt / fine dt
    std::uint64_t master_seed = 0;
    std::uint64_t path_index = 0;
    int mode_count = 0;
    std::vector<double> exact;      // step-major at t_1..t_N
    std::vector<double> discrete;

    /// sup over coarse grid times of the L2 distance between the members.
    double sup_error() const;
};

ConvolutionPair build_convolution_pair(const WienerRecord& record, const OUCoupledPath& exact,
                                       const EigenBasis& basis, std::int64_t factor);

/// Closed-form mean square of the discrete convolution of one mode at step n:
/// E|W^n|^2 = dt q sum_{k=1}^n rho^{2(n-k+1)} with rho = 1/(1 + dt lambda).
double discrete_convolution_mean_square(double q, double lambda, double dt, std::int64_t n);

}  // namespace acbe
