#include "lightts/sampling.hpp"

#include <cmath>
#include <sstream>

#include "lightts/errors.hpp"

namespace lightts {

std::vector<std::size_t> divisors(std::size_t length) {
    std::vector<std::size_t> out;
    for (std::size_t d = 1; d <= length; ++d)
        if (length % d == 0) out.push_back(d);
    return out;
}

std::size_t default_chunk(std::size_t length) {
    const double root = std::sqrt(static_cast<double>(length));
    std::size_t best = 1;
    double best_gap = std::abs(1.0 - root);
    for (std::size_t d : divisors(length)) {
        const double gap = std::abs(static_cast<double>(d) - root);
        if (gap < best_gap) {
            best = d;
            best_gap = gap;
        }
    }
    return best;
}

void check_chunk(std::size_t length, std::size_t chunk) {
    if (length < 2) throw ShapeError("look-back window needs T >= 2");
    if (chunk == 0) throw ShapeError("sub-sequence length C must be >= 1");
    if (chunk > length) {
        throw ShapeError("sub-sequence length C=" + std::to_string(chunk) +
                         " exceeds look-back T=" + std::to_string(length));
    }
    if (length % chunk != 0) {
        std::ostringstream msg;
        msg << "C=" << chunk << " does not divide T=" << length << "; valid C values:";
        for (std::size_t d : divisors(length)) msg << ' ' << d;
        throw ConfigError(msg.str());
    }
}

std::size_t source_index(SampleKind kind, std::size_t length, std::size_t chunk, std::size_t row,
                         std::size_t col) {
    if (kind == SampleKind::continuous) return col * chunk + row;
    return col + row * (length / chunk);
}

SampleMatrix sample(std::span<const double> window, std::size_t chunk, SampleKind kind) {
    check_chunk(window.size(), chunk);
    const std::size_t length = window.size();
    const std::size_t cols = length / chunk;
    SampleMatrix out{Matrix(chunk, cols), chunk, kind};
    for (std::size_t i = 0; i < chunk; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            out.data(i, j) = window[source_index(kind, length, chunk, i, j)];
    return out;
}

SampleMatrix continuous_sample(std::span<const double> window, std::size_t chunk) {
    return sample(window, chunk, SampleKind::continuous);
}

SampleMatrix interval_sample(std::span<const double> window, std::size_t chunk) {
    return sample(window, chunk, SampleKind::interval);
}

std::vector<double> reconstruct(const SampleMatrix& m) {
    const std::size_t chunk = m.data.rows();
    const std::size_t length = chunk * m.data.cols();
    std::vector<double> window(length);
    for (std::size_t i = 0; i < chunk; ++i)
        for (std::size_t j = 0; j < m.data.cols(); ++j)
            window[source_index(m.kind, length, chunk, i, j)] = m.data(i, j);
    return window;
}

}  // namespace lightts
