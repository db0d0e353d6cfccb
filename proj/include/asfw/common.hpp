#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace asfw {

using Vec = std::vector<double>;

/// Dense row-major matrix. Small desk-scale problems only, no sparsity.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

struct EvalError : std::runtime_error {
    int node;
    EvalError(int node_index, const std::string& what)
        : std::runtime_error("node " + std::to_string(node_index) + ": " + what), node(node_index) {}
};

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Kink membership tolerance: z_i counts as zero when |z_i| <= kink_tol(z_i).
inline double kink_tol(double z) { return 1e-12 * (1.0 + std::abs(z)); }

}  // namespace asfw
