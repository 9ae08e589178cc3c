#include "lightts/ieblock.hpp"

#include <cmath>

#include "lightts/errors.hpp"

namespace lightts {

void IEBlockShape::validate() const {
    if (H == 0 || W == 0 || Fp == 0 || F == 0) {
        throw ShapeError("IEBlock dimensions must be >= 1 (H=" + std::to_string(H) +
                         ", W=" + std::to_string(W) + ", Fp=" + std::to_string(Fp) +
                         ", F=" + std::to_string(F) + ")");
    }
}

std::vector<std::string> IEBlockShape::bottleneck_warnings() const {
    std::vector<std::string> out;
    if (Fp > F)
        out.push_back("bottleneck Fp=" + std::to_string(Fp) + " exceeds output F=" +
                      std::to_string(F));
    if (Fp > H)
        out.push_back("bottleneck Fp=" + std::to_string(Fp) + " exceeds input H=" +
                      std::to_string(H));
    return out;
}

IEBlockParams IEBlockParams::zeros(const IEBlockShape& s) {
    s.validate();
    IEBlockParams p;
    p.shape = s;
    p.wt = ParamTensor(s.H, s.Fp);
    p.bt = ParamTensor(1, s.Fp);
    p.wc = ParamTensor(s.W, s.W);
    p.bc = ParamTensor(1, s.W);
    p.wo = ParamTensor(s.Fp, s.F);
    p.bo = ParamTensor(1, s.F);
    return p;
}

namespace {

void fill_uniform(Matrix& m, Rng& rng) {
    const double bound = std::sqrt(1.0 / static_cast<double>(m.rows()));
    for (double& v : m.data()) v = rng.uniform(-bound, bound);
}

}  // namespace

IEBlockParams IEBlockParams::random(const IEBlockShape& s, Rng& rng) {
    IEBlockParams p = zeros(s);
    fill_uniform(p.wt.value, rng);
    fill_uniform(p.wc.value, rng);
    fill_uniform(p.wo.value, rng);
    return p;
}

void IEBlockParams::freeze_channel() {
    wc.value = Matrix::identity(shape.W);
    bc.value.fill(0.0);
    wc.zero_grad();
    bc.zero_grad();
    channel_frozen = true;
}

void IEBlockParams::zero_grads() {
    for (ParamTensor* t : all()) t->zero_grad();
}

std::vector<ParamTensor*> IEBlockParams::all() { return {&wt, &bt, &wc, &bc, &wo, &bo}; }

std::vector<ParamTensor*> IEBlockParams::trainable() {
    if (channel_frozen) return {&wt, &bt, &wo, &bo};
    return all();
}

const std::vector<std::string>& IEBlockParams::names() {
    static const std::vector<std::string> n{"wt", "bt", "wc", "bc", "wo", "bo"};
    return n;
}

IEBlockResult ieblock_forward(const Matrix& z, const IEBlockParams& p, double slope) {
    if (z.rows() != p.shape.H || z.cols() != p.shape.W) {
        throw ShapeError("ieblock_forward: input " + z.shape_str() + " does not match block H x W " +
                         std::to_string(p.shape.H) + "x" + std::to_string(p.shape.W));
    }
    IEBlockResult r;
    IEBlockCache& c = r.cache;
    c.slope = slope;
    c.x = transpose(z);
    c.pre_t = affine_forward(c.x, p.wt.value, p.bt.value);
    c.zt = transpose(leaky_relu_forward(c.pre_t, slope));
    if (p.channel_frozen) {
        c.y = transpose(c.zt);
    } else {
        c.pre_c = affine_forward(c.zt, p.wc.value, p.bc.value);
        c.y = transpose(leaky_relu_forward(c.pre_c, slope));
    }
    r.out = transpose(affine_forward(c.y, p.wo.value, p.bo.value));
    return r;
}

Matrix ieblock_backward(const IEBlockCache& c, IEBlockParams& p, const Matrix& d_out) {
    if (d_out.rows() != p.shape.F || d_out.cols() != p.shape.W) {
        throw ShapeError("ieblock_backward: upstream gradient " + d_out.shape_str() +
                         " does not match block output F x W " + std::to_string(p.shape.F) +
                         "x" + std::to_string(p.shape.W));
    }
    const Matrix dy = affine_backward_accumulate(c.y, p.wo.value, transpose(d_out), &p.wo.grad,
                                                 &p.bo.grad);
    Matrix dzt = transpose(dy);
    if (!p.channel_frozen) {
        const Matrix d_pre_c = leaky_relu_backward(c.pre_c, dzt, c.slope);
        dzt = affine_backward_accumulate(c.zt, p.wc.value, d_pre_c, &p.wc.grad, &p.bc.grad);
    }
    const Matrix d_pre_t = leaky_relu_backward(c.pre_t, transpose(dzt), c.slope);
    const Matrix dx =
        affine_backward_accumulate(c.x, p.wt.value, d_pre_t, &p.wt.grad, &p.bt.grad);
    return transpose(dx);
}

std::uint64_t param_count(const IEBlockShape& s) {
    return s.H * s.Fp + s.Fp + s.W * s.W + s.W + s.Fp * s.F + s.F;
}

OpCount mac_count(const IEBlockShape& s, bool with_channel) {
    OpCount c;
    c.macs = s.W * s.H * s.Fp + s.W * s.Fp * s.F;
    c.adds = s.W * s.Fp + s.W * s.F;
    c.activations = s.Fp * s.W;
    if (with_channel) {
        c.macs += s.Fp * s.W * s.W;
        c.adds += s.Fp * s.W;
        c.activations += s.Fp * s.W;
    }
    return c;
}

}  // namespace lightts
