#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace functensor {

/// Row-major dense matrix used for sample blocks (N x c) and small parameter arrays.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    [[nodiscard]] std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {data.data() + i * cols, cols};
    }
    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    /// Rows selected by index, in the given order.
    [[nodiscard]] Matrix gather(std::span<const std::size_t> indices) const {
        Matrix out(indices.size(), cols);
        for (std::size_t k = 0; k < indices.size(); ++k) {
            auto src = row(indices[k]);
            std::copy(src.begin(), src.end(), out.row(k).begin());
        }
        return out;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

}  // namespace functensor
