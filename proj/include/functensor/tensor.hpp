#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace functensor {

/// A mode's evaluated latent representation: one row of a factor matrix, or
/// the output of a basis bank at a given input.
using FactorRow = std::vector<double>;

/// Order-S array of doubles in row-major layout (last index fastest).
///
/// An order-0 tensor (empty dims) holds a single scalar; it only arises as the
/// result of contracting the last remaining mode.
class DenseTensor {
public:
    DenseTensor() = default;

    /// Zero-filled tensor. Throws ShapeError on empty dims or a zero extent.
    explicit DenseTensor(std::vector<std::size_t> dims);

    /// Throws ShapeError unless values.size() == product(dims).
    DenseTensor(std::vector<std::size_t> dims, std::vector<double> values);

    [[nodiscard]] static DenseTensor scalar(double value);

    [[nodiscard]] std::size_t order() const { return dims_.size(); }
    [[nodiscard]] const std::vector<std::size_t>& dims() const { return dims_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }

    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::span<double> values() { return values_; }

    [[nodiscard]] double at(std::span<const std::size_t> index) const;
    double& at(std::span<const std::size_t> index);

    [[nodiscard]] std::size_t flat_index(std::span<const std::size_t> index) const;

    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    std::vector<std::size_t> dims_;
    std::vector<double> values_{0.0};
};

/// Contracts one mode of `t` against `v`, returning a tensor of order S-1
/// (order 0 when S == 1).
[[nodiscard]] DenseTensor mode_contract(const DenseTensor& t, std::span<const double> v,
                                        std::size_t mode);

/// Full Tucker evaluation: sum over all (r1..rS) of core(r1..rS) * prod_i rows[i][ri].
/// Modes are contracted in order 1, 2, ..., S.
[[nodiscard]] double tucker_eval(const DenseTensor& core, std::span<const FactorRow> rows);

/// PARAFAC evaluation: sum_r weights[r] * prod_i rows[i][r].
[[nodiscard]] double parafac_eval(std::span<const double> weights,
                                  std::span<const FactorRow> rows);

/// Order-S tensor with weights on the superdiagonal and zeros elsewhere.
[[nodiscard]] DenseTensor embed_parafac_as_tucker(std::span<const double> weights,
                                                  std::size_t order);

}  // namespace functensor
