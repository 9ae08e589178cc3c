#include "lightts/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "lightts/errors.hpp"

namespace lightts {

namespace {

void check_pair(std::span<const Matrix> truth, std::span<const Matrix> pred, const char* op) {
    if (truth.empty()) throw ShapeError(std::string(op) + ": empty evaluation set");
    if (truth.size() != pred.size()) {
        throw ShapeError(std::string(op) + ": " + std::to_string(truth.size()) +
                         " targets vs " + std::to_string(pred.size()) + " predictions");
    }
    for (std::size_t k = 0; k < truth.size(); ++k) {
        if (!truth[k].same_shape(truth[0]) || !pred[k].same_shape(truth[0])) {
            throw ShapeError(std::string(op) + ": shape mismatch at window " + std::to_string(k) +
                             " (" + truth[k].shape_str() + " vs " + pred[k].shape_str() + ")");
        }
    }
}

std::size_t entry_count(std::span<const Matrix> m) { return m.size() * m[0].size(); }

}  // namespace

double mse(std::span<const Matrix> truth, std::span<const Matrix> pred) {
    check_pair(truth, pred, "mse");
    double sum = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        auto y = truth[k].data();
        auto p = pred[k].data();
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double d = y[i] - p[i];
            sum += d * d;
        }
    }
    return sum / static_cast<double>(entry_count(truth));
}

double mae(std::span<const Matrix> truth, std::span<const Matrix> pred) {
    check_pair(truth, pred, "mae");
    double sum = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        auto y = truth[k].data();
        auto p = pred[k].data();
        for (std::size_t i = 0; i < y.size(); ++i) sum += std::abs(y[i] - p[i]);
    }
    return sum / static_cast<double>(entry_count(truth));
}

double rse(std::span<const Matrix> truth, std::span<const Matrix> pred) {
    check_pair(truth, pred, "rse");
    double total = 0.0;
    for (const Matrix& y : truth)
        for (double v : y.data()) total += v;
    const double grand_mean = total / static_cast<double>(entry_count(truth));

    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        auto y = truth[k].data();
        auto p = pred[k].data();
        for (std::size_t i = 0; i < y.size(); ++i) {
            num += (y[i] - p[i]) * (y[i] - p[i]);
            den += (y[i] - grand_mean) * (y[i] - grand_mean);
        }
    }
    if (den == 0.0) throw NumericError("rse: ground truth is constant (zero denominator)");
    return std::sqrt(num) / std::sqrt(den);
}

CorrResult corr(std::span<const Matrix> truth, std::span<const Matrix> pred) {
    check_pair(truth, pred, "corr");
    const std::size_t vars = truth[0].cols();
    const std::size_t steps = truth[0].rows();
    const double count = static_cast<double>(truth.size() * steps);

    CorrResult r;
    double acc = 0.0;
    for (std::size_t i = 0; i < vars; ++i) {
        double sy = 0.0, sp = 0.0;
        for (std::size_t k = 0; k < truth.size(); ++k)
            for (std::size_t h = 0; h < steps; ++h) {
                sy += truth[k](h, i);
                sp += pred[k](h, i);
            }
        const double my = sy / count, mp = sp / count;
        double cov = 0.0, vy = 0.0, vp = 0.0;
        for (std::size_t k = 0; k < truth.size(); ++k)
            for (std::size_t h = 0; h < steps; ++h) {
                const double dy = truth[k](h, i) - my;
                const double dp = pred[k](h, i) - mp;
                cov += dy * dp;
                vy += dy * dy;
                vp += dp * dp;
            }
        if (vy == 0.0 || vp == 0.0) {
            ++r.skipped;
            continue;
        }
        acc += cov / std::sqrt(vy * vp);
        ++r.used;
    }
    if (r.used == 0) throw NumericError("corr: every variable has zero variance");
    r.value = acc / static_cast<double>(r.used);
    return r;
}

std::string_view to_string(MetricScale s) {
    return s == MetricScale::standardized ? "standardized" : "raw";
}

MetricScale parse_scale(std::string_view s) {
    if (s == "standardized") return MetricScale::standardized;
    if (s == "raw") return MetricScale::raw;
    throw ConfigError("unknown metric scale '" + std::string(s) +
                      "' (expected standardized or raw)");
}

MetricsReport compute_metrics(std::span<const Matrix> truth, std::span<const Matrix> pred,
                              MetricScale scale) {
    MetricsReport m;
    m.scale = scale;
    m.n_windows = truth.size();
    m.mse = mse(truth, pred);
    m.mae = mae(truth, pred);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
        m.rse = rse(truth, pred);
    } catch (const NumericError&) {
        m.rse = nan;
    }
    try {
        const CorrResult c = corr(truth, pred);
        m.corr = c.value;
        m.corr_skipped = c.skipped;
    } catch (const NumericError&) {
        m.corr = nan;
        m.corr_skipped = truth[0].cols();
    }
    return m;
}

Matrix naive_repeat_last(const Matrix& window, std::size_t L, ForecastMode mode) {
    const std::size_t steps = mode == ForecastMode::multi_step ? L : 1;
    Matrix out(steps, window.rows());
    const std::size_t last = window.cols() - 1;
    for (std::size_t h = 0; h < steps; ++h)
        for (std::size_t i = 0; i < window.rows(); ++i) out(h, i) = window(i, last);
    return out;
}

std::string SeedSummary::mean_std() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f_%.3f", mean, std);
    return buf;
}

SeedSummary aggregate_seeds(std::span<const double> values) {
    if (values.size() < 2)
        throw ConfigError("aggregate_seeds needs at least two values, got " +
                          std::to_string(values.size()));
    SeedSummary s;
    s.values.assign(values.begin(), values.end());
    // Reduce in sorted order so the summary does not depend on seed order.
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double v : sorted) sum += v;
    s.mean = sum / static_cast<double>(sorted.size());
    double sq = 0.0;
    for (double v : sorted) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
    return s;
}

}  // namespace lightts
