#include "lightts/matrix.hpp"

#include <algorithm>

#include "lightts/errors.hpp"

namespace lightts {

std::string_view to_string(ErrorClass c) {
    switch (c) {
        case ErrorClass::config: return "config";
        case ErrorClass::data: return "data";
        case ErrorClass::numeric: return "numeric";
        case ErrorClass::io: return "io";
    }
    return "unknown";
}

int exit_code(ErrorClass c) {
    switch (c) {
        case ErrorClass::config: return 2;
        case ErrorClass::data: return 3;
        case ErrorClass::numeric: return 4;
        case ErrorClass::io: return 5;
    }
    return 1;
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols) {
    if (rows == 0 || cols == 0) {
        throw ShapeError("matrix must be at least 1x1, got " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    }
    data_.assign(rows * cols, fill);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows == 0 || cols == 0) {
        throw ShapeError("matrix must be at least 1x1, got " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    }
    if (data_.size() != rows * cols) {
        throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_str());
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    if (rows_ == 0 || cols_ == 0) throw ShapeError("matrix literal must be non-empty");
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw ShapeError("ragged matrix literal");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::row(std::span<const double> values) {
    return Matrix(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::string Matrix::shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

}  // namespace lightts
