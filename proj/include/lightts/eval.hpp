#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lightts/matrix.hpp"
#include "lightts/model.hpp"

namespace lightts {

// Metrics pool every (window, horizon step, variable) entry of the given
// forecasts. Each Matrix is steps x variables; all must share one shape.

double mse(std::span<const Matrix> truth, std::span<const Matrix> pred);
double mae(std::span<const Matrix> truth, std::span<const Matrix> pred);

/// Root relative squared error against the grand mean of `truth`.
/// Throws NumericError when `truth` is constant.
double rse(std::span<const Matrix> truth, std::span<const Matrix> pred);

struct CorrResult {
    double value = 0.0;         // mean Pearson correlation over usable variables
    std::size_t used = 0;
    std::size_t skipped = 0;    // variables with zero variance in truth or prediction
};

/// Per-variable Pearson correlation over all pooled time points, averaged
/// across variables. Throws NumericError if every variable is degenerate.
CorrResult corr(std::span<const Matrix> truth, std::span<const Matrix> pred);

enum class MetricScale { standardized, raw };
std::string_view to_string(MetricScale s);
MetricScale parse_scale(std::string_view s);

struct MetricsReport {
    double mse = 0.0;
    double mae = 0.0;
    double rse = 0.0;
    double corr = 0.0;
    std::size_t corr_skipped = 0;
    std::size_t n_windows = 0;
    MetricScale scale = MetricScale::standardized;
};

/// All four metrics. RSE/CORR are reported as NaN when degenerate.
MetricsReport compute_metrics(std::span<const Matrix> truth, std::span<const Matrix> pred,
                              MetricScale scale);

/// Repeats the last observed column of an N x T window for every step.
Matrix naive_repeat_last(const Matrix& window, std::size_t L, ForecastMode mode);

struct SeedSummary {
    std::vector<double> values;
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation (n - 1)

    /// "mean_std" with three decimals, e.g. "0.314_0.011".
    std::string mean_std() const;
};

/// Throws ConfigError for fewer than two values.
SeedSummary aggregate_seeds(std::span<const double> values);

}  // namespace lightts
