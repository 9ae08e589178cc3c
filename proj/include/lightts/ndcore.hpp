#pragma once

#include <functional>
#include <span>
#include <string>

#include "lightts/matrix.hpp"

namespace lightts {

/// A trainable array together with its accumulated gradient.
struct ParamTensor {
    Matrix value;
    Matrix grad;

    ParamTensor() = default;
    explicit ParamTensor(Matrix v) : value(std::move(v)), grad(value.rows(), value.cols()) {}
    ParamTensor(std::size_t rows, std::size_t cols) : value(rows, cols), grad(rows, cols) {}

    void zero_grad() { grad.fill(0.0); }
};

/// C = A * B. Each entry is summed left to right over the inner index.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

/// Row-wise affine map: out[i] = x[i] * w + b, with b a 1 x d_out row.
Matrix affine_forward(const Matrix& x, const Matrix& w, const Matrix& b);

struct AffineGrads {
    Matrix dx;  // dOut * W^T
    Matrix dw;  // x^T * dOut
    Matrix db;  // column sums of dOut, 1 x d_out
};

AffineGrads affine_backward(const Matrix& x, const Matrix& w, const Matrix& d_out);

/// Same as affine_backward but adds dW and dB into existing buffers and
/// returns only dX. Skips the weight/bias terms when the buffers are null.
Matrix affine_backward_accumulate(const Matrix& x, const Matrix& w, const Matrix& d_out,
                                  Matrix* dw, Matrix* db);

Matrix leaky_relu_forward(const Matrix& x, double slope);
/// Derivative is 1 where x >= 0 (including x == 0), slope elsewhere.
Matrix leaky_relu_backward(const Matrix& x, const Matrix& d_out, double slope);

/// Adds `src` into `dst` elementwise.
void add_into(Matrix& dst, const Matrix& src);

/// Central-difference gradient check.
///
/// `loss` must read the current values of `params` and be deterministic.
/// The analytic gradient is taken from each tensor's `grad` field as it is
/// on entry; values are restored exactly after each probe. Returns the
/// largest |analytic - numeric| / max(|analytic|, |numeric|, 1e-12) over all
/// entries. Throws NumericError if any probe produces a non-finite loss.
double grad_check(const std::function<double()>& loss, std::span<ParamTensor* const> params,
                  double eps);

}  // namespace lightts
