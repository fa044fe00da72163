#pragma once

#include <cstddef>
#include <vector>

namespace oprlab::numkit {

// Row-major dense float64 matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
    std::size_t size() const { return data.size(); }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
    void zero() { std::fill(data.begin(), data.end(), 0.0); }
};

bool all_finite(const std::vector<double>& v);
bool all_finite(const Matrix& m);

}  // namespace oprlab::numkit
