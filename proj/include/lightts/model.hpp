#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lightts/ieblock.hpp"

namespace lightts {

enum class ForecastMode { multi_step, single_step };

enum class Variant { full, no_cp, no_is, no_cs };

std::string_view to_string(ForecastMode m);
std::string_view to_string(Variant v);
ForecastMode parse_mode(std::string_view s);
Variant parse_variant(std::string_view s);

struct Ablation {
    bool no_cp = false;  // block C channel projection pinned to identity
    bool no_is = false;  // interval-sampling branch removed
    bool no_cs = false;  // continuous-sampling branch removed

    bool empty() const { return !no_cp && !no_is && !no_cs; }
    /// Comma-separated flag list, or "full" when empty.
    std::string str() const;
    friend bool operator==(const Ablation&, const Ablation&) = default;
};

struct LightTSConfig {
    std::size_t N = 1;      // number of series
    std::size_t T = 2;      // look-back length
    std::size_t L = 1;      // horizon
    std::size_t C = 1;      // sub-sequence length, must divide T
    std::size_t F = 64;     // feature size of blocks A/B
    std::size_t Fp_ab = 16; // bottleneck of blocks A/B
    std::size_t Fp_c = 16;  // bottleneck of block C
    ForecastMode mode = ForecastMode::multi_step;
    double slope = 0.01;
    Ablation ablation;

    /// Throws ConfigError / ShapeError on an invalid configuration.
    void validate() const;

    std::size_t output_len() const { return mode == ForecastMode::multi_step ? L : 1; }
    std::size_t subseq_count() const { return T / C; }
    bool has_continuous() const { return !ablation.no_cs; }
    bool has_interval() const { return !ablation.no_is; }
    IEBlockShape block_ab_shape() const;
    IEBlockShape block_c_shape() const;

    friend bool operator==(const LightTSConfig&, const LightTSConfig&) = default;
};

/// Sets the flag for `variant` on top of `base`. Throws ConfigError when the
/// result would drop both sampling branches.
LightTSConfig build_ablation(const LightTSConfig& base, Variant variant);

/// Linear map R^{T/C} -> R applied to every feature row of a block A/B output.
struct DownProjection {
    ParamTensor w;  // (T/C) x 1
    ParamTensor b;  // 1 x 1
};

struct NamedParam {
    std::string name;
    ParamTensor* tensor;
};

struct ModelParams {
    std::optional<IEBlockParams> block_a;  // continuous branch, shared over series
    std::optional<IEBlockParams> block_b;  // interval branch, shared over series
    std::optional<DownProjection> down_a;
    std::optional<DownProjection> down_b;
    IEBlockParams block_c;

    /// Every stored array in checkpoint order, e.g. "block_a.wt", "down_a.w".
    std::vector<NamedParam> named_all();
    /// Arrays the optimizer updates (frozen channel arrays excluded).
    std::vector<NamedParam> named_trainable();
    std::vector<ParamTensor*> trainable();
    std::uint64_t trainable_count();
    void zero_grads();
};

ModelParams zero_params(const LightTSConfig& cfg);
ModelParams init_params(const LightTSConfig& cfg, std::uint64_t seed);

/// Analytic trainable-parameter count for a config.
std::uint64_t trainable_param_count(const LightTSConfig& cfg);

struct ModelCache {
    std::vector<IEBlockCache> a, b;
    std::vector<Matrix> a_out, b_out;  // F x (T/C) per series
    IEBlockCache c;
};

struct ForwardResult {
    Matrix forecast;  // output_len x N
    ModelCache cache;
};

/// window is N x T, oldest observation in column 0.
ForwardResult forward(const ModelParams& params, const LightTSConfig& cfg, const Matrix& window);

/// Accumulates gradients into `params` and returns dWindow (N x T).
Matrix backward(const ModelCache& cache, ModelParams& params, const LightTSConfig& cfg,
                const Matrix& d_forecast);

/// MACs (and bias adds / activations) of one forward pass.
OpCount model_mac_count(const LightTSConfig& cfg);

}  // namespace lightts
