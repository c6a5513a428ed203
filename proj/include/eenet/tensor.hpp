#ifndef EENET_TENSOR_HPP
#define EENET_TENSOR_HPP

#include <cstddef>
#include <vector>

namespace eenet {

// Dense row-major array of doubles; the currency of all layer computation.
struct Tensor {
    std::vector<size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<size_t> shape_in, std::vector<double> data_in);

    // Zero-filled vector of length n.
    static Tensor zeros(size_t n);
    // Zero-filled matrix (rows x cols).
    static Tensor zeros(size_t rows, size_t cols);
    static Tensor vector(std::vector<double> values);

    size_t numel() const { return data.size(); }
    bool is_vector() const { return shape.size() == 1; }
    bool is_matrix() const { return shape.size() == 2; }

    double& at(size_t r, size_t c) { return data[r * shape[1] + c]; }
    double at(size_t r, size_t c) const { return data[r * shape[1] + c]; }

    // Throws ValidationError if any entry is non-finite.
    void check_finite(const char* context) const;
};

bool same_shape(const Tensor& a, const Tensor& b);

} // namespace eenet

#endif
