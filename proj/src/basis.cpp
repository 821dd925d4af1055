#include "functensor/basis.hpp"

#include "functensor/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace functensor {

namespace {

void check_input(std::span<const double> x, const GaussianBasis& basis) {
    if (x.size() != basis.dim) {
        throw ShapeError("basis input has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(basis.dim));
    }
}

/// Quadratic form (mu_r - x)^T D_r (mu_r - x). For the factored form, also
/// writes delta = mu_r - x and u = L_r^T delta into the scratch buffers.
double quadratic_form(std::span<const double> x, const GaussianBasis& basis, std::size_t r,
                      std::span<double> delta, std::span<double> u) {
    const std::size_t c = basis.dim;
    auto mu = basis.center(r);
    auto block = basis.shape_block(r);
    for (std::size_t i = 0; i < c; ++i) delta[i] = mu[i] - x[i];

    double q = 0.0;
    if (basis.precision == Precision::Factored) {
        for (std::size_t n = 0; n < c; ++n) {
            double s = 0.0;
            for (std::size_t m = 0; m < c; ++m) s += block[m * c + n] * delta[m];
            u[n] = s;
            q += s * s;
        }
    } else {
        for (std::size_t m = 0; m < c; ++m) {
            double s = 0.0;
            for (std::size_t n = 0; n < c; ++n) s += block[m * c + n] * delta[n];
            q += delta[m] * s;
        }
    }
    return q;
}

bool clamped(double q, Precision p) {
    return q >= kQuadraticFormClamp || (p == Precision::Free && q <= -kQuadraticFormClamp);
}

double clamp_form(double q, Precision p) {
    const double lo = p == Precision::Free ? -kQuadraticFormClamp : 0.0;
    return std::clamp(q, lo, kQuadraticFormClamp);
}

}  // namespace

double rbf_univariate(double v, double mu, double gamma) {
    if (!std::isfinite(v) || !std::isfinite(mu) || !std::isfinite(gamma)) {
        throw DomainError("rbf_univariate: non-finite input");
    }
    if (gamma < 0.0) {
        throw DomainError("rbf_univariate: gamma must be >= 0");
    }
    const double d = mu - v;
    return std::exp(-gamma * d * d);
}

FactorRow UnivariateRbfBank::row(double v) const {
    if (widths.size() != centers.size()) {
        throw ShapeError("UnivariateRbfBank: centers and widths differ in length");
    }
    FactorRow out(centers.size());
    for (std::size_t r = 0; r < centers.size(); ++r) {
        out[r] = rbf_univariate(v, centers[r], widths[r]);
    }
    return out;
}

GaussianBasis GaussianBasis::identity(std::size_t rank, std::size_t dim, Precision precision) {
    GaussianBasis b;
    b.rank = rank;
    b.dim = dim;
    b.precision = precision;
    b.centers.assign(rank * dim, 0.0);
    b.shape.assign(rank * dim * dim, 0.0);
    for (std::size_t r = 0; r < rank; ++r) {
        for (std::size_t i = 0; i < dim; ++i) b.shape[r * dim * dim + i * dim + i] = 1.0;
    }
    return b;
}

std::vector<double> GaussianBasis::precision_matrix(std::size_t r) const {
    auto block = shape_block(r);
    if (precision == Precision::Free) return {block.begin(), block.end()};
    std::vector<double> d(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < dim; ++k) s += block[i * dim + k] * block[j * dim + k];
            d[i * dim + j] = s;
        }
    }
    return d;
}

void GaussianBasis::validate() const {
    if (rank == 0 || dim == 0) {
        throw ShapeError("GaussianBasis: rank and dim must be >= 1");
    }
    if (centers.size() != rank * dim || shape.size() != rank * dim * dim) {
        throw ShapeError("GaussianBasis: parameter storage does not match rank " +
                         std::to_string(rank) + " and dim " + std::to_string(dim));
    }
}

BasisGradient BasisGradient::zeros_like(const GaussianBasis& basis) {
    return {std::vector<double>(basis.centers.size(), 0.0),
            std::vector<double>(basis.shape.size(), 0.0)};
}

void BasisGradient::add(const BasisGradient& other) {
    if (other.d_centers.size() != d_centers.size() || other.d_shape.size() != d_shape.size()) {
        throw ShapeError("BasisGradient::add: shape mismatch");
    }
    for (std::size_t i = 0; i < d_centers.size(); ++i) d_centers[i] += other.d_centers[i];
    for (std::size_t i = 0; i < d_shape.size(); ++i) d_shape[i] += other.d_shape[i];
}

double gaussian_activation(std::span<const double> x, const GaussianBasis& basis, std::size_t r) {
    check_input(x, basis);
    if (r >= basis.rank) {
        throw ShapeError("kernel index " + std::to_string(r) + " out of range");
    }
    std::vector<double> delta(basis.dim), u(basis.dim);
    const double q = quadratic_form(x, basis, r, delta, u);
    return std::exp(-clamp_form(q, basis.precision));
}

FactorRow basis_row(std::span<const double> x, const GaussianBasis& basis) {
    check_input(x, basis);
    std::vector<double> delta(basis.dim), u(basis.dim);
    FactorRow row(basis.rank);
    for (std::size_t r = 0; r < basis.rank; ++r) {
        row[r] = std::exp(-clamp_form(quadratic_form(x, basis, r, delta, u), basis.precision));
    }
    return row;
}

void basis_backward_into(std::span<const double> x, const GaussianBasis& basis,
                         std::span<const double> upstream, double scale, BasisGradient& grad) {
    check_input(x, basis);
    if (upstream.size() != basis.rank) {
        throw ShapeError("basis_backward: upstream has length " + std::to_string(upstream.size()) +
                         ", expected " + std::to_string(basis.rank));
    }
    const std::size_t c = basis.dim;
    std::vector<double> delta(c), u(c);
    for (std::size_t r = 0; r < basis.rank; ++r) {
        if (upstream[r] == 0.0) continue;
        const double q = quadratic_form(x, basis, r, delta, u);
        if (clamped(q, basis.precision)) continue;
        // d/dq of upstream * exp(-q)
        const double g = -scale * upstream[r] * std::exp(-q);
        double* d_mu = grad.d_centers.data() + r * c;
        double* d_shape = grad.d_shape.data() + r * c * c;
        auto block = basis.shape_block(r);
        if (basis.precision == Precision::Factored) {
            // q = |L^T delta|^2: dq/dmu = 2 L u, dq/dL = 2 delta u^T
            for (std::size_t m = 0; m < c; ++m) {
                double lu = 0.0;
                for (std::size_t n = 0; n < c; ++n) {
                    lu += block[m * c + n] * u[n];
                    d_shape[m * c + n] += g * 2.0 * delta[m] * u[n];
                }
                d_mu[m] += g * 2.0 * lu;
            }
        } else {
            // q = delta^T D delta: dq/dmu = (D + D^T) delta, dq/dD = delta delta^T
            for (std::size_t m = 0; m < c; ++m) {
                double s = 0.0;
                for (std::size_t n = 0; n < c; ++n) {
                    s += (block[m * c + n] + block[n * c + m]) * delta[n];
                    d_shape[m * c + n] += g * delta[m] * delta[n];
                }
                d_mu[m] += g * s;
            }
        }
    }
}

BasisGradient basis_backward(std::span<const double> x, const GaussianBasis& basis,
                             std::span<const double> upstream) {
    auto grad = BasisGradient::zeros_like(basis);
    basis_backward_into(x, basis, upstream, 1.0, grad);
    return grad;
}

}  // namespace functensor
