#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

// Spectral representation of the Dirichlet Laplacian on (0,1): eigenvalues
// lambda_k = (k pi)^2, eigenfunctions e_k(x) = sqrt(2) sin(k pi x), and the
// sine-transform pair between mode coefficients and values on the interior
// collocation grid x_i = i/(M+1).

namespace acbe {

class EigenBasis {
public:
    explicit EigenBasis(int mode_count);

    int mode_count() const { return mode_count_; }
    double eigenvalue(int k) const { return eigenvalues_[k - 1]; }  // 1-based mode index
    std::span<const double> eigenvalues() const { return eigenvalues_; }
    std::span<const double> grid_points() const { return grid_points_; }
    double quadrature_weight() const { return quadrature_weight_; }

    // Dense sine-transform matrix, row-major M x M, symmetric,
    // S*S = (M+1) * I. to_grid is v -> S v; from_grid is g -> S g / (M+1).
    const double* transform_matrix() const { return transform_.data(); }

    void to_grid(std::span<const double> coeffs, std::span<double> grid_values) const;
    void from_grid(std::span<const double> grid_values, std::span<double> coeffs) const;

private:
    int mode_count_;
    std::vector<double> eigenvalues_;
    std::vector<double> grid_points_;
    double quadrature_weight_;
    std::vector<double> transform_;
};

using BasisPtr = std::shared_ptr<const EigenBasis>;

/// Builds the M-mode basis. Rejects M < 1.
BasisPtr build_basis(int mode_count);

/// A function represented by its coefficients in an EigenBasis.
class SpectralField {
public:
    SpectralField(BasisPtr basis, std::vector<double> coeffs);

    /// Zero field.
    explicit SpectralField(BasisPtr basis);

    const BasisPtr& basis() const { return basis_; }
    int mode_count() const { return basis_->mode_count(); }
    std::span<const double> coeffs() const { return coeffs_; }
    std::span<double> coeffs() { return coeffs_; }
    double coeff(int k) const { return coeffs_[k - 1]; }  // 1-based mode index

private:
    BasisPtr basis_;
    std::vector<double> coeffs_;
};

/// Throws std::invalid_argument if the fields live in different bases.
void require_same_basis(const SpectralField& a, const SpectralField& b);
void require_basis(const SpectralField& a, const EigenBasis& basis);

SpectralField operator+(const SpectralField& a, const SpectralField& b);
SpectralField operator-(const SpectralField& a, const SpectralField& b);
SpectralField operator*(double a, const SpectralField& v);

/// L2 norm, equal to the plain Euclidean norm of the coefficients.
double l2_norm(const SpectralField& v);

std::vector<double> to_grid(const SpectralField& v);
SpectralField from_grid(const BasisPtr& basis, std::span<const double> grid_values);

}  // namespace acbe
