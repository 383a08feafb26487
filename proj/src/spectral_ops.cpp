#include "acbe/spectral_ops.hpp"

#include <cmath>
#include <stdexcept>

#include "acbe/kernels.hpp"

namespace acbe {
namespace {

SpectralField apply_per_mode(const SpectralField& v, auto&& factor) {
    const auto lambdas = v.basis()->eigenvalues();
    std::vector<double> out(v.coeffs().begin(), v.coeffs().end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= factor(lambdas[i]);
    return {v.basis(), std::move(out)};
}

}  // namespace

double semigroup_factor(double lambda, double t) { return std::exp(-lambda * t); }

double resolvent_factor(double lambda, double dt, std::int64_t n) {
    return std::pow(1.0 + dt * lambda, -static_cast<double>(n));
}

double deterministic_error_factor(double lambda, double dt, std::int64_t n) {
    return semigroup_factor(lambda, static_cast<double>(n) * dt) - resolvent_factor(lambda, dt, n);
}

SpectralField apply_fractional_power(const SpectralField& v, double s) {
    if (s == 0.0) return v;
    return apply_per_mode(v, [s](double lambda) { return std::pow(lambda, s); });
}

double sobolev_norm(const SpectralField& v, double beta) {
    const auto lambdas = v.basis()->eigenvalues();
    const auto c = v.coeffs();
    if (beta == 0.0) return std::sqrt(kernels::ops().dot(c.data(), c.data(), c.size()));
    if (beta == 1.0)
        return std::sqrt(kernels::ops().weighted_sumsq(lambdas.data(), c.data(), c.size()));
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) acc += std::pow(lambdas[i], beta) * c[i] * c[i];
    return std::sqrt(acc);
}

SpectralField semigroup_apply(const SpectralField& v, double t) {
    if (t < 0.0) throw std::invalid_argument("semigroup_apply: t must be >= 0");
    if (t == 0.0) return v;
    return apply_per_mode(v, [t](double lambda) { return semigroup_factor(lambda, t); });
}

SpectralField resolvent_power_apply(const SpectralField& v, double dt, std::int64_t n) {
    if (dt <= 0.0) throw std::invalid_argument("resolvent_power_apply: dt must be > 0");
    if (n < 0) throw std::invalid_argument("resolvent_power_apply: n must be >= 0");
    if (n == 0) return v;
    return apply_per_mode(v, [dt, n](double lambda) { return resolvent_factor(lambda, dt, n); });
}

SpectralField deterministic_error_apply(const SpectralField& v, double dt, std::int64_t n) {
    if (dt <= 0.0) throw std::invalid_argument("deterministic_error_apply: dt must be > 0");
    if (n < 1) throw std::invalid_argument("deterministic_error_apply: n must be >= 1");
    return apply_per_mode(v,
                          [dt, n](double lambda) { return deterministic_error_factor(lambda, dt, n); });
}

}  // namespace acbe
