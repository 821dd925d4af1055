#pragma once

// Reference implementations used only by tests. None of these share code paths
// with the library routines they check.

#include "functensor/matrix.hpp"
#include "functensor/tensor.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace oracle {

/// S-nested-loop Tucker sum via an odometer over all multi-indices.
inline double naive_tucker(const std::vector<std::size_t>& dims, const std::vector<double>& values,
                           const std::vector<std::vector<double>>& rows) {
    const std::size_t order = dims.size();
    std::vector<std::size_t> idx(order, 0);
    double sum = 0.0;
    for (std::size_t flat = 0; flat < values.size(); ++flat) {
        double term = values[flat];
        for (std::size_t m = 0; m < order; ++m) term *= rows[m][idx[m]];
        sum += term;
        for (std::size_t m = order; m-- > 0;) {
            if (++idx[m] < dims[m]) break;
            idx[m] = 0;
        }
    }
    return sum;
}

/// Central difference of f with respect to *param.
inline double central_difference(const std::function<double()>& f, double* param, double h) {
    const double saved = *param;
    *param = saved + h;
    const double plus = f();
    *param = saved - h;
    const double minus = f();
    *param = saved;
    return (plus - minus) / (2.0 * h);
}

inline double relative_error(double analytic, double numeric) {
    return std::abs(analytic - numeric) /
           std::max({std::abs(analytic), std::abs(numeric), 1e-12});
}

/// One Lloyd iteration (assign to nearest, move to means; empty clusters keep
/// their center) followed by the objective.
inline double lloyd_step_objective(const functensor::Matrix& points, functensor::Matrix centers) {
    const std::size_t k = centers.rows;
    const std::size_t c = points.cols;
    std::vector<std::size_t> label(points.rows);
    for (std::size_t i = 0; i < points.rows; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
            double d = 0.0;
            for (std::size_t t = 0; t < c; ++t) d += std::pow(points(i, t) - centers(j, t), 2);
            if (d < best) {
                best = d;
                label[i] = j;
            }
        }
    }
    functensor::Matrix sums(k, c);
    std::vector<double> counts(k, 0.0);
    for (std::size_t i = 0; i < points.rows; ++i) {
        for (std::size_t t = 0; t < c; ++t) sums(label[i], t) += points(i, t);
        counts[label[i]] += 1.0;
    }
    for (std::size_t j = 0; j < k; ++j) {
        if (counts[j] == 0.0) continue;
        for (std::size_t t = 0; t < c; ++t) centers(j, t) = sums(j, t) / counts[j];
    }
    double objective = 0.0;
    for (std::size_t i = 0; i < points.rows; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
            double d = 0.0;
            for (std::size_t t = 0; t < c; ++t) d += std::pow(points(i, t) - centers(j, t), 2);
            best = std::min(best, d);
        }
        objective += best;
    }
    return objective;
}

// Two-link planar arm from its Lagrangian: point masses m1 = m2 = 1 at the ends
// of unit links, angles from the horizontal, gravity along -y. M(q) comes from
// the link Jacobians; dM/dq and dV/dq by complex-step differentiation.
namespace two_link {

constexpr double kG = 9.81;
constexpr double kStep = 1e-30;

template <class T>
std::array<T, 4> mass_matrix(T q1, T q2) {
    using std::cos;
    using std::sin;
    // Jacobians of the two point masses (rows: x, y; cols: q1, q2).
    const std::array<T, 4> j1{-sin(q1), T(0), cos(q1), T(0)};
    const std::array<T, 4> j2{-sin(q1) - sin(q1 + q2), -sin(q1 + q2), cos(q1) + cos(q1 + q2),
                              cos(q1 + q2)};
    std::array<T, 4> m{};
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) {
            m[a * 2 + b] = j1[a] * j1[b] + j1[2 + a] * j1[2 + b] + j2[a] * j2[b] + j2[2 + a] * j2[2 + b];
        }
    }
    return m;
}

template <class T>
T potential(T q1, T q2) {
    using std::sin;
    return kG * (sin(q1) + (sin(q1) + sin(q1 + q2)));
}

/// dM_ab/dq_k, indexed [k][a*2+b].
inline std::array<std::array<double, 4>, 2> mass_matrix_derivative(double q1, double q2) {
    using C = std::complex<double>;
    std::array<std::array<double, 4>, 2> out{};
    const auto m1 = mass_matrix<C>(C(q1, kStep), C(q2, 0));
    const auto m2 = mass_matrix<C>(C(q1, 0), C(q2, kStep));
    for (std::size_t i = 0; i < 4; ++i) {
        out[0][i] = m1[i].imag() / kStep;
        out[1][i] = m2[i].imag() / kStep;
    }
    return out;
}

inline std::array<double, 2> gravity(double q1, double q2) {
    using C = std::complex<double>;
    return {potential<C>(C(q1, kStep), C(q2, 0)).imag() / kStep,
            potential<C>(C(q1, 0), C(q2, kStep)).imag() / kStep};
}

/// M(q) qdd + sum_jk Gamma_ijk qd_j qd_k + dV/dq (no friction).
inline std::array<double, 2> torque(std::span<const double> q, std::span<const double> qd,
                                    std::span<const double> qdd) {
    const auto m = mass_matrix<double>(q[0], q[1]);
    const auto dm = mass_matrix_derivative(q[0], q[1]);
    const auto g = gravity(q[0], q[1]);
    std::array<double, 2> tau{};
    for (std::size_t i = 0; i < 2; ++i) {
        tau[i] = m[i * 2] * qdd[0] + m[i * 2 + 1] * qdd[1] + g[i];
        for (std::size_t j = 0; j < 2; ++j) {
            for (std::size_t k = 0; k < 2; ++k) {
                const double christoffel =
                    0.5 * (dm[k][i * 2 + j] + dm[j][i * 2 + k] - dm[i][j * 2 + k]);
                tau[i] += christoffel * qd[j] * qd[k];
            }
        }
    }
    return tau;
}

}  // namespace two_link

}  // namespace oracle
