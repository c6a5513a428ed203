#include "eenet/tensor.hpp"

#include <cmath>
#include <string>

#include "eenet/errors.hpp"

namespace eenet {

Tensor::Tensor(std::vector<size_t> shape_in, std::vector<double> data_in)
    : shape(std::move(shape_in)), data(std::move(data_in)) {
    size_t expect = 1;
    for (size_t extent : shape) {
        if (extent == 0) {
            throw InputError("tensor shape extents must be positive");
        }
        expect *= extent;
    }
    if (shape.empty() || expect != data.size()) {
        throw DimensionError("tensor data length " + std::to_string(data.size()) +
                             " does not match shape product " + std::to_string(expect));
    }
}

Tensor Tensor::zeros(size_t n) {
    return Tensor({n}, std::vector<double>(n, 0.0));
}

Tensor Tensor::zeros(size_t rows, size_t cols) {
    return Tensor({rows, cols}, std::vector<double>(rows * cols, 0.0));
}

Tensor Tensor::vector(std::vector<double> values) {
    const size_t n = values.size();
    return Tensor({n}, std::move(values));
}

void Tensor::check_finite(const char* context) const {
    for (double v : data) {
        if (!std::isfinite(v)) {
            throw ValidationError(std::string("non-finite value in ") + context);
        }
    }
}

bool same_shape(const Tensor& a, const Tensor& b) {
    return a.shape == b.shape;
}

} // namespace eenet
