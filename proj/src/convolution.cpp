#include "acbe/convolution.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "acbe/kernels.hpp"

namespace acbe {

DiscreteConvolution discrete_convolution(const IncrementArray& increments,
                                         const EigenBasis& basis) {
    if (increments.mode_count != basis.mode_count())
        throw std::invalid_argument("discrete_convolution: mode count mismatch");
    if (!(increments.dt > 0.0))
        throw std::invalid_argument("discrete_convolution: dt must be > 0");
    const int m = increments.mode_count;
    DiscreteConvolution out;
    out.dt = increments.dt;
    out.step_count = increments.step_count;
    out.mode_count = m;
    out.values.resize(static_cast<std::size_t>(increments.step_count) * m);

    std::vector<double> rho(m);
    for (int k = 1; k <= m; ++k) rho[k - 1] = 1.0 / (1.0 + increments.dt * basis.eigenvalue(k));

    std::vector<double> w(m, 0.0);
    for (std::int64_t n = 0; n < increments.step_count; ++n) {
        kernels::ops().axpy(1.0, increments.step(n), w.data(), m);
        kernels::ops().diag_mul(rho.data(), w.data(), w.data(), m);
        for (int k = 0; k < m; ++k) out.values[n * m + k] = w[k];
    }
    return out;
}

double ConvolutionPair::sup_error() const {
    double sup = 0.0;
    for (std::int64_t n = 0; n < step_count; ++n) {
        double s = 0.0;
        for (int k = 0; k < mode_count; ++k) {
            const double d = exact[n * mode_count + k] - discrete[n * mode_count + k];
            s += d * d;
        }
        sup = std::max(sup, s);
    }
    return std::sqrt(sup);
}

ConvolutionPair build_convolution_pair(const WienerRecord& record, const OUCoupledPath& exact,
                                       const EigenBasis& basis, std::int64_t factor) {
    if (exact.fine_count != record.fine_count || exact.mode_count != record.mode_count)
        throw std::invalid_argument("build_convolution_pair: record and exact path disagree");
    if (exact.master_seed != record.master_seed || exact.path_index != record.path_index)
        throw std::invalid_argument("build_convolution_pair: shared-randomness provenance mismatch");
    IncrementArray coarse = coarsen(record, factor);
    DiscreteConvolution disc = discrete_convolution(coarse, basis);

    ConvolutionPair pair;
    pair.dt = coarse.dt;
    pair.step_count = coarse.step_count;
    pair.factor = factor;
    pair.master_seed = record.master_seed;
    pair.path_index = record.path_index;
    pair.mode_count = record.mode_count;
    pair.discrete = std::move(disc.values);
    pair.exact.resize(pair.discrete.size());
    const int m = record.mode_count;
    // The exact member is computed once at the fine level and restricted to
    // coarse times, so it does not depend on the coarsening factor.
    for (std::int64_t n = 1; n <= pair.step_count; ++n) {
        const double* src = exact.at_step(n * factor);
        double* dst = pair.exact.data() + (n - 1) * m;
        for (int k = 0; k < m; ++k) dst[k] = src[k];
    }
    return pair;
}

double discrete_convolution_mean_square(double q, double lambda, double dt, std::int64_t n) {
    const double rho2 = 1.0 / ((1.0 + dt * lambda) * (1.0 + dt * lambda));
    // dt q (rho^2 + rho^4 + ... + rho^{2n}) as a closed geometric sum.
    return dt * q * rho2 * (1.0 - std::pow(rho2, static_cast<double>(n))) / (1.0 - rho2);
}

}  // namespace acbe
