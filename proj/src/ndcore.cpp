#include "lightts/ndcore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lightts/errors.hpp"

namespace lightts {

namespace {

[[noreturn]] void shape_mismatch(const char* op, const Matrix& a, const Matrix& b) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                     b.shape_str());
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) shape_mismatch("matmul", a, b);
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    Matrix c(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t l = 0; l < k; ++l) acc += a(i, l) * b(l, j);
            c(i, j) = acc;
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Matrix affine_forward(const Matrix& x, const Matrix& w, const Matrix& b) {
    if (x.cols() != w.rows()) shape_mismatch("affine_forward (x, W)", x, w);
    if (b.rows() != 1 || b.cols() != w.cols()) shape_mismatch("affine_forward (W, b)", w, b);
    const std::size_t m = x.rows(), k = x.cols(), n = w.cols();
    Matrix out(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t l = 0; l < k; ++l) acc += x(i, l) * w(l, j);
            out(i, j) = acc + b(0, j);
        }
    }
    return out;
}

Matrix affine_backward_accumulate(const Matrix& x, const Matrix& w, const Matrix& d_out,
                                  Matrix* dw, Matrix* db) {
    if (x.cols() != w.rows()) shape_mismatch("affine_backward (x, W)", x, w);
    if (d_out.rows() != x.rows() || d_out.cols() != w.cols())
        shape_mismatch("affine_backward (x, dOut)", x, d_out);
    const std::size_t m = x.rows(), k = x.cols(), n = w.cols();

    Matrix dx(m, k);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t l = 0; l < k; ++l) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += d_out(i, j) * w(l, j);
            dx(i, l) = acc;
        }
    }
    if (dw) {
        if (!dw->same_shape(w)) shape_mismatch("affine_backward (dW)", *dw, w);
        for (std::size_t l = 0; l < k; ++l) {
            for (std::size_t j = 0; j < n; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m; ++i) acc += x(i, l) * d_out(i, j);
                (*dw)(l, j) += acc;
            }
        }
    }
    if (db) {
        if (db->rows() != 1 || db->cols() != n) shape_mismatch("affine_backward (dB)", *db, d_out);
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < m; ++i) acc += d_out(i, j);
            (*db)(0, j) += acc;
        }
    }
    return dx;
}

AffineGrads affine_backward(const Matrix& x, const Matrix& w, const Matrix& d_out) {
    Matrix dw(w.rows(), w.cols());
    Matrix db(1, w.cols());
    Matrix dx = affine_backward_accumulate(x, w, d_out, &dw, &db);
    return {std::move(dx), std::move(dw), std::move(db)};
}

Matrix leaky_relu_forward(const Matrix& x, double slope) {
    Matrix out = x;
    for (double& v : out.data())
        if (v < 0.0) v *= slope;
    return out;
}

Matrix leaky_relu_backward(const Matrix& x, const Matrix& d_out, double slope) {
    if (!x.same_shape(d_out)) shape_mismatch("leaky_relu_backward", x, d_out);
    Matrix dx = d_out;
    auto xs = x.data();
    auto ds = dx.data();
    for (std::size_t i = 0; i < ds.size(); ++i)
        if (xs[i] < 0.0) ds[i] *= slope;
    return dx;
}

void add_into(Matrix& dst, const Matrix& src) {
    if (!dst.same_shape(src)) shape_mismatch("add_into", dst, src);
    auto d = dst.data();
    auto s = src.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

double grad_check(const std::function<double()>& loss, std::span<ParamTensor* const> params,
                  double eps) {
    if (!(eps >= 1e-7 && eps <= 1e-3))
        throw std::invalid_argument("grad_check: eps must lie in [1e-7, 1e-3]");

    double worst = 0.0;
    for (std::size_t p = 0; p < params.size(); ++p) {
        auto values = params[p]->value.data();
        auto grads = params[p]->grad.data();
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double saved = values[i];
            values[i] = saved + eps;
            const double up = loss();
            values[i] = saved - eps;
            const double down = loss();
            values[i] = saved;
            if (!std::isfinite(up) || !std::isfinite(down)) {
                throw NumericError("grad_check: non-finite loss probing parameter " +
                                   std::to_string(p) + " entry " + std::to_string(i));
            }
            const double numeric = (up - down) / (2.0 * eps);
            const double analytic = grads[i];
            const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-12});
            worst = std::max(worst, std::abs(analytic - numeric) / denom);
        }
    }
    return worst;
}

}  // namespace lightts
