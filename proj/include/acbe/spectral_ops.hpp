#pragma once

#include <cstdint>

#include "acbe/eigen_basis.hpp"

// Diagonal operator actions in the eigenbasis: fractional powers A^s, the
// semigroup E(t) = exp(-tA), resolvent powers (I + dt A)^-n, and the
// time-discretization error operator F_n = E(t_n) - (I + dt A)^-n.

namespace acbe {

// Per-mode factors; the field-level operations apply these across modes.
double semigroup_factor(double lambda, double t);
double resolvent_factor(double lambda, double dt, std::int64_t n);
double deterministic_error_factor(double lambda, double dt, std::int64_t n);

/// A^s v: coefficient k becomes lambda_k^s v_k.
SpectralField apply_fractional_power(const SpectralField& v, double s);

/// ||A^{beta/2} v|| = (sum_k lambda_k^beta v_k^2)^{1/2}.
double sobolev_norm(const SpectralField& v, double beta);

/// E(t) v. Rejects t < 0.
SpectralField semigroup_apply(const SpectralField& v, double t);

/// (I + dt A)^{-n} v. Rejects dt <= 0 or n < 0.
SpectralField resolvent_power_apply(const SpectralField& v, double dt, std::int64_t n);

/// F_n v = E(t_n) v - (I + dt A)^{-n} v with t_n = n dt. Rejects dt <= 0, n < 1.
SpectralField deterministic_error_apply(const SpectralField& v, double dt, std::int64_t n);

}  // namespace acbe
