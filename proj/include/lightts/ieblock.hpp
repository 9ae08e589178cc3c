#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lightts/ndcore.hpp"
#include "lightts/rng.hpp"

namespace lightts {

/// Information Exchange Block dimensions.
///   H  - temporal (row) size of the input
///   W  - channel (column) size, preserved through the block
///   Fp - bottleneck width
///   F  - output feature size
struct IEBlockShape {
    std::size_t H = 1;
    std::size_t W = 1;
    std::size_t Fp = 1;
    std::size_t F = 1;

    /// Throws ShapeError if any dimension is zero.
    void validate() const;
    /// Non-fatal notes when the bottleneck is wider than H or F.
    std::vector<std::string> bottleneck_warnings() const;

    friend bool operator==(const IEBlockShape&, const IEBlockShape&) = default;
};

/// Weights of one block. Biases are stored as 1 x d rows.
///   wt: H x Fp, bt: 1 x Fp   (temporal projection, shared over columns)
///   wc: W x W,  bc: 1 x W    (channel projection, shared over rows)
///   wo: Fp x F, bo: 1 x F    (output projection, shared over columns)
struct IEBlockParams {
    IEBlockShape shape;
    ParamTensor wt, bt, wc, bc, wo, bo;
    /// When set, the channel projection is bypassed: wc/bc stay at
    /// identity/zero, receive no gradient and are not trainable.
    bool channel_frozen = false;

    static IEBlockParams zeros(const IEBlockShape& shape);
    /// Weights uniform on +-sqrt(1/fan_in) in the order wt, wc, wo; biases 0.
    static IEBlockParams random(const IEBlockShape& shape, Rng& rng);

    /// Pins wc = I, bc = 0 and marks them frozen.
    void freeze_channel();

    void zero_grads();
    std::vector<ParamTensor*> all();
    std::vector<ParamTensor*> trainable();
    /// Suffixes matching all(): "wt", "bt", "wc", "bc", "wo", "bo".
    static const std::vector<std::string>& names();
};

struct IEBlockCache {
    Matrix x;      // input transposed, W x H
    Matrix pre_t;  // W x Fp
    Matrix zt;     // activated temporal output, Fp x W
    Matrix pre_c;  // Fp x W (unused when the channel stage is frozen)
    Matrix y;      // activated channel output transposed, W x Fp
    double slope = 0.01;
};

struct IEBlockResult {
    Matrix out;  // F x W
    IEBlockCache cache;
};

/// Temporal projection then channel projection (each followed by a leaky
/// rectifier) then a linear output projection. Z is H x W, result F x W.
IEBlockResult ieblock_forward(const Matrix& z, const IEBlockParams& p, double slope);

/// Accumulates (+=) parameter gradients into `p` and returns dZ (H x W).
Matrix ieblock_backward(const IEBlockCache& cache, IEBlockParams& p, const Matrix& d_out);

std::uint64_t param_count(const IEBlockShape& s);

struct OpCount {
    std::uint64_t macs = 0;         // multiply-accumulates
    std::uint64_t adds = 0;         // bias additions
    std::uint64_t activations = 0;  // leaky-rectifier evaluations

    OpCount& operator+=(const OpCount& o) {
        macs += o.macs;
        adds += o.adds;
        activations += o.activations;
        return *this;
    }
    friend bool operator==(const OpCount&, const OpCount&) = default;
};

/// One forward pass: W*H*Fp + Fp*W^2 + W*Fp*F MACs. Without the channel
/// stage the Fp*W^2 term (and its adds/activations) drops out.
OpCount mac_count(const IEBlockShape& s, bool with_channel = true);

}  // namespace lightts
