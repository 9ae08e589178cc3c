#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lightts/matrix.hpp"

namespace lightts {

enum class SampleKind { continuous, interval };

/// A length-T window folded into a C x (T/C) matrix.
///
/// Continuous: column j holds the j-th run of C consecutive tokens,
///   entry (i, j) = w[j*C + i].
/// Interval: column j holds every (T/C)-th token starting at j,
///   entry (i, j) = w[j + i*(T/C)].
/// Both are permutations of the window; no token is dropped or repeated.
struct SampleMatrix {
    Matrix data;
    std::size_t chunk = 1;  // C
    SampleKind kind = SampleKind::continuous;
};

/// Throws ShapeError if chunk == 0 or chunk > window length, ConfigError if
/// chunk does not divide the window length.
void check_chunk(std::size_t length, std::size_t chunk);

SampleMatrix continuous_sample(std::span<const double> window, std::size_t chunk);
SampleMatrix interval_sample(std::span<const double> window, std::size_t chunk);
SampleMatrix sample(std::span<const double> window, std::size_t chunk, SampleKind kind);

/// Inverse of the matching sampler.
std::vector<double> reconstruct(const SampleMatrix& m);

/// Position in the source window of entry (row, col) for a C x (T/C) sample.
std::size_t source_index(SampleKind kind, std::size_t length, std::size_t chunk, std::size_t row,
                         std::size_t col);

/// Divisors of T in ascending order.
std::vector<std::size_t> divisors(std::size_t length);

/// Divisor of T closest to sqrt(T); ties resolve to the smaller divisor.
std::size_t default_chunk(std::size_t length);

}  // namespace lightts
