#pragma once

#include "functensor/tensor.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace functensor {

/// Quadratic forms are clamped to this bound before exponentiation.
inline constexpr double kQuadraticFormClamp = 50.0;

/// exp(-gamma * (mu - v)^2). Throws DomainError on non-finite input or gamma < 0.
[[nodiscard]] double rbf_univariate(double v, double mu, double gamma);

/// A bank of one-dimensional RBF kernels with independent centers and widths.
struct UnivariateRbfBank {
    std::vector<double> centers;
    std::vector<double> widths;

    [[nodiscard]] std::size_t rank() const { return centers.size(); }
    [[nodiscard]] FactorRow row(double v) const;
};

/// How the per-kernel precision matrix D_r is stored.
enum class Precision {
    /// shape holds L_r and D_r = L_r L_r^T (PSD by construction).
    Factored,
    /// shape holds D_r directly; the quadratic form is clamped to [-50, 50].
    Free,
};

/// Bank of `rank` multivariate Gaussian kernels over a c-dimensional input:
/// activation_r(x) = exp(-(mu_r - x)^T D_r (mu_r - x)).
struct GaussianBasis {
    std::size_t rank = 0;
    std::size_t dim = 0;
    Precision precision = Precision::Factored;
    std::vector<double> centers;  // rank x dim
    std::vector<double> shape;    // rank x dim x dim (L_r or D_r, row-major)

    /// Centers zero, every shape block the identity.
    [[nodiscard]] static GaussianBasis identity(std::size_t rank, std::size_t dim,
                                                Precision precision = Precision::Factored);

    [[nodiscard]] std::span<const double> center(std::size_t r) const {
        return {centers.data() + r * dim, dim};
    }
    [[nodiscard]] std::span<const double> shape_block(std::size_t r) const {
        return {shape.data() + r * dim * dim, dim * dim};
    }

    /// Precision matrix D_r (dim x dim, row-major).
    [[nodiscard]] std::vector<double> precision_matrix(std::size_t r) const;

    /// Throws ShapeError if the storage does not match rank/dim.
    void validate() const;

    friend bool operator==(const GaussianBasis&, const GaussianBasis&) = default;
};

/// Gradient of a scalar loss with respect to a GaussianBasis' parameters.
struct BasisGradient {
    std::vector<double> d_centers;  // rank x dim
    std::vector<double> d_shape;    // rank x dim x dim

    [[nodiscard]] static BasisGradient zeros_like(const GaussianBasis& basis);
    void add(const BasisGradient& other);
};

[[nodiscard]] double gaussian_activation(std::span<const double> x, const GaussianBasis& basis,
                                         std::size_t r);

[[nodiscard]] FactorRow basis_row(std::span<const double> x, const GaussianBasis& basis);

/// Gradient of sum_r upstream[r] * activation_r(x).
[[nodiscard]] BasisGradient basis_backward(std::span<const double> x, const GaussianBasis& basis,
                                           std::span<const double> upstream);

/// Accumulating form of basis_backward: adds scale * gradient into `grad`.
void basis_backward_into(std::span<const double> x, const GaussianBasis& basis,
                         std::span<const double> upstream, double scale, BasisGradient& grad);

}  // namespace functensor
