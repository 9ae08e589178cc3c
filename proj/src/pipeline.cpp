#include "lightts/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lightts/errors.hpp"

namespace lightts {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

std::string location(const std::string& source, std::size_t line, std::size_t col) {
    return source + ": line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

Dataset parse_csv(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    std::vector<std::string_view> header;
    std::string header_line;
    while (std::getline(in, header_line)) {
        ++line_no;
        if (!trim(header_line).empty()) break;
    }
    if (trim(header_line).empty()) throw DataError(source + ": empty file");
    header = split_fields(header_line);

    const bool drop_date = !header.empty() && header.front() == "date";
    const std::size_t first = drop_date ? 1 : 0;
    if (header.size() <= first) throw DataError(source + ": no numeric columns in header");

    Dataset ds;
    for (std::size_t i = first; i < header.size(); ++i) ds.names.emplace_back(header[i]);
    const std::size_t n = ds.names.size();

    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw DataError(source + ": line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, header has " +
                            std::to_string(header.size()));
        }
        for (std::size_t i = first; i < fields.size(); ++i) {
            const std::string_view f = fields[i];
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) {
                throw DataError(location(source, line_no, i + 1) + ": cannot parse '" +
                                std::string(f) + "' as a number");
            }
            if (!std::isfinite(v)) {
                throw DataError(location(source, line_no, i + 1) + ": non-finite value '" +
                                std::string(f) + "' in data row " + std::to_string(rows + 1));
            }
            values.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) throw DataError(source + ": no data rows");
    ds.values = Matrix(rows, n, std::move(values));
    return ds;
}

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), path.string());
}

SplitSpec SplitSpec::from_scheme(SplitScheme s) {
    switch (s) {
        case SplitScheme::r622: return {0.6, 0.2, 0.2, s};
        case SplitScheme::r712: return {0.7, 0.1, 0.2, s};
        case SplitScheme::custom: break;
    }
    throw ConfigError("custom split needs explicit ratios");
}

SplitSpec SplitSpec::parse(std::string_view name) {
    if (name == "r622" || name == "6/2/2") return from_scheme(SplitScheme::r622);
    if (name == "r712" || name == "7/1/2") return from_scheme(SplitScheme::r712);
    throw ConfigError("unknown split scheme '" + std::string(name) + "' (expected r622 or r712)");
}

std::string SplitSpec::name() const {
    switch (scheme) {
        case SplitScheme::r622: return "r622";
        case SplitScheme::r712: return "r712";
        case SplitScheme::custom: break;
    }
    return "custom";
}

void SplitSpec::validate() const {
    if (!(train > 0 && val > 0 && test > 0))
        throw ConfigError("split ratios must be positive");
    if (std::abs(train + val + test - 1.0) > 1e-9)
        throw ConfigError("split ratios must sum to 1");
}

Splits split(std::size_t rows, const SplitSpec& spec, std::size_t min_len) {
    spec.validate();
    // The small offset keeps products such as 17420 * 0.6 from landing one
    // below the intended integer.
    auto part = [&](double r) {
        return static_cast<std::size_t>(std::floor(static_cast<double>(rows) * r + 1e-9));
    };
    const std::size_t n_train = part(spec.train);
    const std::size_t n_val = part(spec.val);
    Splits s;
    s.train = {0, n_train};
    s.val = {n_train, n_train + n_val};
    s.test = {n_train + n_val, rows};
    const std::pair<const char*, IndexRange> parts[] = {
        {"train", s.train}, {"val", s.val}, {"test", s.test}};
    for (const auto& [name, r] : parts) {
        if (r.size() < min_len) {
            throw DataError(std::string("insufficient data: ") + name + " split has " +
                            std::to_string(r.size()) + " rows, need at least T+L=" +
                            std::to_string(min_len));
        }
    }
    return s;
}

Scaler fit_scaler(const Dataset& ds, IndexRange train) {
    if (train.size() == 0 || train.end > ds.length())
        throw DataError("scaler needs a non-empty training range inside the dataset");
    const std::size_t n = ds.series();
    Scaler s;
    s.mean.assign(n, 0.0);
    s.std.assign(n, 0.0);
    const double count = static_cast<double>(train.size());
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t t = train.begin; t < train.end; ++t) sum += ds.values(t, i);
        const double mean = sum / count;
        double sq = 0.0;
        for (std::size_t t = train.begin; t < train.end; ++t) {
            const double d = ds.values(t, i) - mean;
            sq += d * d;
        }
        s.mean[i] = mean;
        s.std[i] = std::max(std::sqrt(sq / count), Scaler::kStdFloor);
    }
    return s;
}

Dataset apply_scaler(const Dataset& ds, const Scaler& s) {
    if (s.mean.size() != ds.series()) throw ShapeError("scaler width does not match dataset");
    Dataset out = ds;
    for (std::size_t t = 0; t < ds.length(); ++t)
        for (std::size_t i = 0; i < ds.series(); ++i)
            out.values(t, i) = (ds.values(t, i) - s.mean[i]) / s.std[i];
    return out;
}

Matrix invert_scaler(const Matrix& forecast, const Scaler& s) {
    if (s.mean.size() != forecast.cols())
        throw ShapeError("scaler width does not match forecast " + forecast.shape_str());
    Matrix out = forecast;
    for (std::size_t r = 0; r < out.rows(); ++r)
        for (std::size_t i = 0; i < out.cols(); ++i) out(r, i) = out(r, i) * s.std[i] + s.mean[i];
    return out;
}

WindowBatch make_windows(const Dataset& ds, IndexRange range, std::size_t T, std::size_t L,
                         ForecastMode mode) {
    if (range.end > ds.length() || range.begin > range.end)
        throw DataError("window range outside dataset");
    if (T == 0 || L == 0) throw ConfigError("T and L must be >= 1");
    if (range.size() < T + L) {
        throw DataError("insufficient data: range of " + std::to_string(range.size()) +
                        " rows cannot hold T+L=" + std::to_string(T + L));
    }
    const std::size_t n = ds.series();
    const std::size_t count = range.size() - T - L + 1;
    WindowBatch b;
    b.inputs.reserve(count);
    b.targets.reserve(count);
    b.origins.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t origin = range.begin + k + T - 1;
        Matrix in(n, T);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < T; ++j) in(i, j) = ds.values(origin - T + 1 + j, i);
        Matrix target(mode == ForecastMode::multi_step ? L : 1, n);
        if (mode == ForecastMode::multi_step) {
            for (std::size_t h = 0; h < L; ++h)
                for (std::size_t i = 0; i < n; ++i) target(h, i) = ds.values(origin + 1 + h, i);
        } else {
            for (std::size_t i = 0; i < n; ++i) target(0, i) = ds.values(origin + L, i);
        }
        b.inputs.push_back(std::move(in));
        b.targets.push_back(std::move(target));
        b.origins.push_back(origin);
    }
    return b;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace lightts
