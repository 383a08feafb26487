#include "acbe/eigen_basis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "acbe/kernels.hpp"

namespace acbe {
namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void check_finite(std::span<const double> values, const char* what) {
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument(std::string(what) + " contains a non-finite value");
}

}  // namespace

EigenBasis::EigenBasis(int mode_count) : mode_count_(mode_count) {
    if (mode_count < 1) throw std::invalid_argument("mode_count must be >= 1");
    const int m = mode_count;
    eigenvalues_.resize(m);
    grid_points_.resize(m);
    quadrature_weight_ = 1.0 / (m + 1);
    for (int k = 1; k <= m; ++k) {
        eigenvalues_[k - 1] = (k * kPi) * (k * kPi);
        grid_points_[k - 1] = static_cast<double>(k) / (m + 1);
    }
    // S[i][k] = sqrt(2) sin(i k pi / (M+1)). The angle is reduced modulo
    // 2(M+1) in exact integer arithmetic so large i*k do not lose precision.
    transform_.resize(static_cast<std::size_t>(m) * m);
    const std::int64_t period = 2 * (static_cast<std::int64_t>(m) + 1);
    const double sqrt2 = std::sqrt(2.0);
    for (std::int64_t i = 1; i <= m; ++i) {
        for (std::int64_t k = i; k <= m; ++k) {
            std::int64_t reduced = (i * k) % period;
            double value = sqrt2 * std::sin(kPi * static_cast<double>(reduced) / (m + 1));
            transform_[(i - 1) * m + (k - 1)] = value;
            transform_[(k - 1) * m + (i - 1)] = value;
        }
    }
}

void EigenBasis::to_grid(std::span<const double> coeffs, std::span<double> grid_values) const {
    if (coeffs.size() != static_cast<std::size_t>(mode_count_) ||
        grid_values.size() != static_cast<std::size_t>(mode_count_))
        throw std::invalid_argument("to_grid: length does not match mode count " +
                                    std::to_string(mode_count_));
    kernels::ops().matvec(transform_.data(), coeffs.data(), grid_values.data(),
                          mode_count_, mode_count_);
}

void EigenBasis::from_grid(std::span<const double> grid_values, std::span<double> coeffs) const {
    if (coeffs.size() != static_cast<std::size_t>(mode_count_) ||
        grid_values.size() != static_cast<std::size_t>(mode_count_))
        throw std::invalid_argument("from_grid: length does not match mode count " +
                                    std::to_string(mode_count_));
    kernels::ops().matvec(transform_.data(), grid_values.data(), coeffs.data(),
                          mode_count_, mode_count_);
    kernels::ops().scale(quadrature_weight_, coeffs.data(), coeffs.data(), mode_count_);
}

BasisPtr build_basis(int mode_count) { return std::make_shared<EigenBasis>(mode_count); }

SpectralField::SpectralField(BasisPtr basis, std::vector<double> coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
    if (!basis_) throw std::invalid_argument("SpectralField: null basis");
    if (coeffs_.size() != static_cast<std::size_t>(basis_->mode_count()))
        throw std::invalid_argument("SpectralField: coefficient count " +
                                    std::to_string(coeffs_.size()) + " does not match basis M=" +
                                    std::to_string(basis_->mode_count()));
    check_finite(coeffs_, "SpectralField coefficients");
}

SpectralField::SpectralField(BasisPtr basis) : basis_(std::move(basis)) {
    if (!basis_) throw std::invalid_argument("SpectralField: null basis");
    coeffs_.assign(basis_->mode_count(), 0.0);
}

void require_same_basis(const SpectralField& a, const SpectralField& b) {
    if (a.mode_count() != b.mode_count())
        throw std::invalid_argument("fields live in different bases (M=" +
                                    std::to_string(a.mode_count()) + " vs M=" +
                                    std::to_string(b.mode_count()) + ")");
}

void require_basis(const SpectralField& a, const EigenBasis& basis) {
    if (a.mode_count() != basis.mode_count())
        throw std::invalid_argument("field does not live in the given basis (M=" +
                                    std::to_string(a.mode_count()) + " vs M=" +
                                    std::to_string(basis.mode_count()) + ")");
}

SpectralField operator+(const SpectralField& a, const SpectralField& b) {
    require_same_basis(a, b);
    std::vector<double> out(a.coeffs().begin(), a.coeffs().end());
    kernels::ops().axpy(1.0, b.coeffs().data(), out.data(), out.size());
    return {a.basis(), std::move(out)};
}

SpectralField operator-(const SpectralField& a, const SpectralField& b) {
    require_same_basis(a, b);
    std::vector<double> out(a.coeffs().begin(), a.coeffs().end());
    kernels::ops().axpy(-1.0, b.coeffs().data(), out.data(), out.size());
    return {a.basis(), std::move(out)};
}

SpectralField operator*(double a, const SpectralField& v) {
    std::vector<double> out(v.coeffs().size());
    kernels::ops().scale(a, v.coeffs().data(), out.data(), out.size());
    return {v.basis(), std::move(out)};
}

double l2_norm(const SpectralField& v) {
    return std::sqrt(kernels::ops().dot(v.coeffs().data(), v.coeffs().data(), v.coeffs().size()));
}

std::vector<double> to_grid(const SpectralField& v) {
    std::vector<double> g(v.mode_count());
    v.basis()->to_grid(v.coeffs(), g);
    return g;
}

SpectralField from_grid(const BasisPtr& basis, std::span<const double> grid_values) {
    check_finite(grid_values, "grid values");
    std::vector<double> c(basis->mode_count());
    basis->from_grid(grid_values, c);
    return {basis, std::move(c)};
}

}  // namespace acbe
