#include "lightts/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include "lightts/errors.hpp"
#include "lightts/eval.hpp"
#include "lightts/rng.hpp"

namespace lightts {

void TrainConfig::validate() const {
    if (!(lr > 0.0)) throw ConfigError("lr must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("beta1 must lie in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("beta2 must lie in [0, 1)");
    if (!(eps_adam > 0.0)) throw ConfigError("eps_adam must be > 0");
    if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
    if (max_epochs == 0) throw ConfigError("max_epochs must be >= 1");
    if (patience == 0) throw ConfigError("patience must be >= 1");
    if (clip_norm < 0.0) throw ConfigError("clip_norm must be >= 0");
}

LossGrad mse_loss(const Matrix& forecast, const Matrix& target) {
    if (!forecast.same_shape(target)) {
        throw ShapeError("mse_loss: forecast " + forecast.shape_str() + " vs target " +
                         target.shape_str());
    }
    LossGrad r{0.0, Matrix(forecast.rows(), forecast.cols())};
    const double count = static_cast<double>(forecast.size());
    auto f = forecast.data();
    auto t = target.data();
    auto g = r.grad.data();
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double d = f[i] - t[i];
        r.loss += d * d;
        g[i] = 2.0 * d / count;
    }
    r.loss /= count;
    return r;
}

AdamState AdamState::for_params(std::span<const NamedParam> params) {
    AdamState s;
    for (const NamedParam& p : params) {
        s.m.emplace_back(p.tensor->value.rows(), p.tensor->value.cols());
        s.v.emplace_back(p.tensor->value.rows(), p.tensor->value.cols());
    }
    return s;
}

void adam_step(std::span<const NamedParam> params, AdamState& state, const TrainConfig& cfg) {
    if (state.m.size() != params.size())
        throw ShapeError("adam_step: optimizer state does not match parameter list");
    for (const NamedParam& p : params)
        for (double g : p.tensor->grad.data())
            if (!std::isfinite(g)) throw NumericError("non-finite gradient in " + p.name);

    ++state.t;
    const double t = static_cast<double>(state.t);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto theta = params[k].tensor->value.data();
        auto grad = params[k].tensor->grad.data();
        auto m = state.m[k].data();
        auto v = state.v[k].data();
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double g = grad[i];
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
            const double m_hat = m[i] / c1;
            const double v_hat = v[i] / c2;
            theta[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps_adam);
        }
        params[k].tensor->zero_grad();
    }
}

double clip_grad_norm(std::span<const NamedParam> params, double max_norm) {
    double sq = 0.0;
    for (const NamedParam& p : params)
        for (double g : p.tensor->grad.data()) sq += g * g;
    const double norm = std::sqrt(sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double scale = max_norm / norm;
        for (const NamedParam& p : params)
            for (double& g : p.tensor->grad.data()) g *= scale;
    }
    return norm;
}

std::vector<Matrix> predict(const ModelParams& params, const LightTSConfig& cfg,
                            const WindowBatch& windows) {
    std::vector<Matrix> out;
    out.reserve(windows.size());
    for (const Matrix& in : windows.inputs) out.push_back(forward(params, cfg, in).forecast);
    return out;
}

TrainResult train_loop(const LightTSConfig& cfg, ModelParams params, const WindowBatch& train,
                       const WindowBatch& val, const TrainConfig& tcfg, const ParamFilter& filter) {
    tcfg.validate();
    if (train.size() == 0) throw DataError("no training windows");
    if (val.size() == 0) throw DataError("no validation windows");

    std::vector<NamedParam> trainable;
    for (const NamedParam& p : params.named_trainable())
        if (!filter || filter(p.name)) trainable.push_back(p);
    AdamState adam = AdamState::for_params(trainable);
    params.zero_grads();

    Rng shuffle_rng = seeded_rng(tcfg.seed, Stream::shuffle);
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainResult result;
    result.best = params;
    result.best_val_mse = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;
    bool out_of_steps = false;

    for (std::size_t epoch = 1; epoch <= tcfg.max_epochs && !out_of_steps; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        if (tcfg.shuffle) {
            for (std::size_t i = order.size() - 1; i > 0; --i)
                std::swap(order[i], order[shuffle_rng.below(i + 1)]);
        }

        double loss_sum = 0.0;
        std::size_t seen = 0;
        for (std::size_t b0 = 0; b0 < order.size(); b0 += tcfg.batch_size) {
            const std::size_t b1 = std::min(order.size(), b0 + tcfg.batch_size);
            const double inv = 1.0 / static_cast<double>(b1 - b0);
            for (std::size_t k = b0; k < b1; ++k) {
                const std::size_t w = order[k];
                ForwardResult fr = forward(params, cfg, train.inputs[w]);
                LossGrad lg = mse_loss(fr.forecast, train.targets[w]);
                if (!std::isfinite(lg.loss)) {
                    throw NumericError("non-finite training loss at epoch " +
                                       std::to_string(epoch) + ", batch " +
                                       std::to_string(b0 / tcfg.batch_size + 1));
                }
                loss_sum += lg.loss;
                ++seen;
                for (double& g : lg.grad.data()) g *= inv;
                backward(fr.cache, params, cfg, lg.grad);
            }
            if (tcfg.clip_norm > 0.0) clip_grad_norm(trainable, tcfg.clip_norm);
            adam_step(trainable, adam, tcfg);
            // frozen or filtered arrays still collect gradients; drop them
            params.zero_grads();
            ++result.steps;
            if (tcfg.max_steps > 0 && result.steps >= tcfg.max_steps) {
                out_of_steps = true;
                break;
            }
        }

        const std::vector<Matrix> val_pred = predict(params, cfg, val);
        const double val_mse = mse(val.targets, val_pred);
        if (!std::isfinite(val_mse))
            throw NumericError("non-finite validation loss at epoch " + std::to_string(epoch));
        const auto stop = std::chrono::steady_clock::now();
        result.history.push_back(
            {epoch, loss_sum / static_cast<double>(seen), val_mse,
             std::chrono::duration<double, std::milli>(stop - start).count()});

        if (val_mse < result.best_val_mse) {
            result.best_val_mse = val_mse;
            result.best_epoch = epoch;
            result.best = params;
            since_best = 0;
        } else if (++since_best >= tcfg.patience) {
            result.stop_reason = "patience";
            return result;
        }
    }
    result.stop_reason = out_of_steps ? "max_steps" : "max_epochs";
    return result;
}

void write_history_csv(std::ostream& out, std::span<const EpochRecord> history) {
    out << "epoch,train_mse,val_mse,wall_ms\n";
    char buf[128];
    for (const EpochRecord& r : history) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.3f\n", r.epoch, r.train_mse, r.val_mse,
                      r.wall_ms);
        out << buf;
    }
}

}  // namespace lightts
