#include "functensor/tensor.hpp"

#include "functensor/errors.hpp"

#include <functional>
#include <numeric>
#include <string>

namespace functensor {

namespace {

std::size_t product(const std::vector<std::size_t>& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

void check_dims(const std::vector<std::size_t>& dims) {
    if (dims.empty()) {
        throw ShapeError("tensor dims must be non-empty");
    }
    for (std::size_t d : dims) {
        if (d == 0) {
            throw ShapeError("tensor extents must be >= 1");
        }
    }
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    check_dims(dims_);
    values_.assign(product(dims_), 0.0);
}

DenseTensor::DenseTensor(std::vector<std::size_t> dims, std::vector<double> values)
    : dims_(std::move(dims)), values_(std::move(values)) {
    check_dims(dims_);
    if (values_.size() != product(dims_)) {
        throw ShapeError("tensor has " + std::to_string(values_.size()) +
                         " values but dims require " + std::to_string(product(dims_)));
    }
}

DenseTensor DenseTensor::scalar(double value) {
    DenseTensor t;
    t.values_ = {value};
    return t;
}

std::size_t DenseTensor::flat_index(std::span<const std::size_t> index) const {
    if (index.size() != dims_.size()) {
        throw ShapeError("index order does not match tensor order");
    }
    std::size_t flat = 0;
    for (std::size_t m = 0; m < dims_.size(); ++m) {
        if (index[m] >= dims_[m]) {
            throw ShapeError("index out of range in mode " + std::to_string(m));
        }
        flat = flat * dims_[m] + index[m];
    }
    return flat;
}

double DenseTensor::at(std::span<const std::size_t> index) const {
    return values_[flat_index(index)];
}

double& DenseTensor::at(std::span<const std::size_t> index) { return values_[flat_index(index)]; }

DenseTensor mode_contract(const DenseTensor& t, std::span<const double> v, std::size_t mode) {
    if (mode >= t.order()) {
        throw ShapeError("mode " + std::to_string(mode) + " out of range for order-" +
                         std::to_string(t.order()) + " tensor");
    }
    const auto& dims = t.dims();
    if (v.size() != dims[mode]) {
        throw ShapeError("contraction vector length " + std::to_string(v.size()) +
                         " does not match mode extent " + std::to_string(dims[mode]));
    }

    // View t as (outer, extent, inner) around the contracted mode.
    std::size_t outer = 1;
    for (std::size_t m = 0; m < mode; ++m) outer *= dims[m];
    std::size_t inner = 1;
    for (std::size_t m = mode + 1; m < dims.size(); ++m) inner *= dims[m];
    const std::size_t extent = dims[mode];

    std::vector<double> out(outer * inner, 0.0);
    auto src = t.values();
    for (std::size_t o = 0; o < outer; ++o) {
        double* dst = out.data() + o * inner;
        for (std::size_t k = 0; k < extent; ++k) {
            const double w = v[k];
            const double* slice = src.data() + (o * extent + k) * inner;
            for (std::size_t i = 0; i < inner; ++i) {
                dst[i] += w * slice[i];
            }
        }
    }

    if (t.order() == 1) {
        return DenseTensor::scalar(out[0]);
    }
    std::vector<std::size_t> out_dims;
    out_dims.reserve(dims.size() - 1);
    for (std::size_t m = 0; m < dims.size(); ++m) {
        if (m != mode) out_dims.push_back(dims[m]);
    }
    return DenseTensor(std::move(out_dims), std::move(out));
}

double tucker_eval(const DenseTensor& core, std::span<const FactorRow> rows) {
    if (rows.size() != core.order()) {
        throw ShapeError("tucker_eval: " + std::to_string(rows.size()) + " rows for order-" +
                         std::to_string(core.order()) + " core");
    }
    for (std::size_t m = 0; m < rows.size(); ++m) {
        if (rows[m].size() != core.dims()[m]) {
            throw ShapeError("tucker_eval: row " + std::to_string(m) + " has length " +
                             std::to_string(rows[m].size()) + ", core extent is " +
                             std::to_string(core.dims()[m]));
        }
    }
    // Contracting the leading mode each time keeps the remaining modes in order.
    DenseTensor acc = mode_contract(core, rows[0], 0);
    for (std::size_t m = 1; m < rows.size(); ++m) {
        acc = mode_contract(acc, rows[m], 0);
    }
    return acc.values()[0];
}

double parafac_eval(std::span<const double> weights, std::span<const FactorRow> rows) {
    for (std::size_t m = 0; m < rows.size(); ++m) {
        if (rows[m].size() != weights.size()) {
            throw ShapeError("parafac_eval: row " + std::to_string(m) + " has length " +
                             std::to_string(rows[m].size()) + ", rank is " +
                             std::to_string(weights.size()));
        }
    }
    double sum = 0.0;
    for (std::size_t r = 0; r < weights.size(); ++r) {
        double term = weights[r];
        for (const auto& row : rows) term *= row[r];
        sum += term;
    }
    return sum;
}

DenseTensor embed_parafac_as_tucker(std::span<const double> weights, std::size_t order) {
    if (weights.empty()) {
        throw ConfigError("embed_parafac_as_tucker: rank must be >= 1");
    }
    if (order < 2) {
        throw ConfigError("embed_parafac_as_tucker: order must be >= 2");
    }
    const std::size_t rank = weights.size();
    DenseTensor core(std::vector<std::size_t>(order, rank));
    // Stride between consecutive superdiagonal entries: 1 + r + r^2 + ... + r^(S-1).
    std::size_t stride = 0;
    std::size_t power = 1;
    for (std::size_t m = 0; m < order; ++m) {
        stride += power;
        power *= rank;
    }
    auto values = core.values();
    for (std::size_t r = 0; r < rank; ++r) {
        values[r * stride] = weights[r];
    }
    return core;
}

}  // namespace functensor
