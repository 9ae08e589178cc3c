#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "lightts/matrix.hpp"
#include "lightts/model.hpp"

namespace lightts {

/// Time-major multivariate series: values(t, i) is variable i at step t.
struct Dataset {
    std::vector<std::string> names;
    Matrix values;  // M x N
    std::string granularity;

    std::size_t length() const { return values.rows(); }
    std::size_t series() const { return values.cols(); }
};

/// Reads a comma-separated file with a header row. A first column named
/// `date` is dropped; every other column must parse as a finite real.
/// Throws IoError if the file cannot be opened and DataError (with 1-based
/// line and column) for empty files, malformed or non-finite cells.
Dataset load_csv(const std::filesystem::path& path);
Dataset parse_csv(const std::string& text, const std::string& source = "<memory>");

enum class SplitScheme { r622, r712, custom };

struct SplitSpec {
    double train = 0.6;
    double val = 0.2;
    double test = 0.2;
    SplitScheme scheme = SplitScheme::r622;

    static SplitSpec from_scheme(SplitScheme s);
    static SplitSpec parse(std::string_view name);
    std::string name() const;
    void validate() const;
};

/// Half-open row range [begin, end).
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
    friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct Splits {
    IndexRange train, val, test;
};

/// Chronological split: floor(M*train), floor(M*val), remainder. Throws
/// DataError when any part is shorter than `min_len` (normally T + L).
Splits split(std::size_t rows, const SplitSpec& spec, std::size_t min_len);

struct Scaler {
    std::vector<double> mean;
    std::vector<double> std;

    static constexpr double kStdFloor = 1e-8;
};

/// Per-column mean and population standard deviation over `train` rows.
Scaler fit_scaler(const Dataset& ds, IndexRange train);
Dataset apply_scaler(const Dataset& ds, const Scaler& s);
/// Maps a forecast (rows = steps, cols = variables) back to the raw scale.
Matrix invert_scaler(const Matrix& forecast, const Scaler& s);

struct WindowBatch {
    std::vector<Matrix> inputs;   // N x T each, oldest step first
    std::vector<Matrix> targets;  // L x N (multi_step) or 1 x N (single_step)
    std::vector<std::size_t> origins;  // dataset row of the last input step

    std::size_t size() const { return inputs.size(); }
};

/// Stride-1 windows inside `range`. The window with origin t uses rows
/// t-T+1..t as input and t+1..t+L (or only t+L) as target.
WindowBatch make_windows(const Dataset& ds, IndexRange range, std::size_t T, std::size_t L,
                         ForecastMode mode);

/// 64-bit FNV-1a of a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace lightts
