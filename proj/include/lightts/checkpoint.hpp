#pragma once

#include <filesystem>

#include "lightts/model.hpp"

namespace lightts {

// On-disk layout, two files in one directory:
//
//   checkpoint.manifest  one line per array: "<name> <rows> <cols> <byte offset>"
//   checkpoint.bin       IEEE-754 binary64 values, little-endian, row-major,
//                        arrays concatenated in manifest order
//
// Every array of the model is stored, including frozen ones.

inline constexpr const char* kManifestFile = "checkpoint.manifest";
inline constexpr const char* kBlobFile = "checkpoint.bin";

void save_checkpoint(const std::filesystem::path& dir, ModelParams& params);

/// Fills `params` (already shaped for the expected config) from disk.
/// Throws ConfigError when names or shapes differ, IoError on read failure.
void load_checkpoint(const std::filesystem::path& dir, ModelParams& params);

}  // namespace lightts
