#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lightts/model.hpp"
#include "lightts/pipeline.hpp"

namespace lightts {

struct TrainConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_adam = 1e-8;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 100;
    std::size_t patience = 10;
    std::uint64_t seed = 0;
    bool shuffle = true;
    double clip_norm = 0.0;     // global gradient-norm clip; 0 disables
    std::size_t max_steps = 0;  // optimizer-step budget; 0 means unlimited

    void validate() const;
};

struct LossGrad {
    double loss = 0.0;
    Matrix grad;
};

/// Mean squared error and its gradient 2 (forecast - target) / count.
LossGrad mse_loss(const Matrix& forecast, const Matrix& target);

/// First/second moment buffers for a fixed list of parameters.
struct AdamState {
    std::vector<Matrix> m;
    std::vector<Matrix> v;
    std::uint64_t t = 0;

    static AdamState for_params(std::span<const NamedParam> params);
};

/// One bias-corrected Adam update followed by zeroing the gradients.
/// Throws NumericError naming the first parameter with a non-finite gradient.
void adam_step(std::span<const NamedParam> params, AdamState& state, const TrainConfig& cfg);

/// Scales gradients so their global L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
double clip_grad_norm(std::span<const NamedParam> params, double max_norm);

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_mse = 0.0; // mean per-window loss seen during the epoch
    double val_mse = 0.0;
    double wall_ms = 0.0;
};

struct TrainResult {
    ModelParams best;
    std::vector<EpochRecord> history;
    std::size_t best_epoch = 0;
    double best_val_mse = 0.0;
    std::size_t steps = 0;
    std::string stop_reason;  // "patience", "max_epochs" or "max_steps"
};

/// Selects which named arrays the optimizer may update; empty means all.
using ParamFilter = std::function<bool(const std::string&)>;

/// Forecasts for every window of a batch, in window order.
std::vector<Matrix> predict(const ModelParams& params, const LightTSConfig& cfg,
                            const WindowBatch& windows);

/// Mini-batch Adam with early stopping on validation MSE. Batch gradients
/// are the mean over windows, reduced in window order. Returns the
/// parameters of the epoch with the lowest validation MSE.
TrainResult train_loop(const LightTSConfig& cfg, ModelParams params, const WindowBatch& train,
                       const WindowBatch& val, const TrainConfig& tcfg,
                       const ParamFilter& filter = {});

/// "epoch,train_mse,val_mse,wall_ms" header plus one row per epoch.
void write_history_csv(std::ostream& out, std::span<const EpochRecord> history);

}  // namespace lightts
