#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lightts/config.hpp"
#include "lightts/eval.hpp"
#include "lightts/pipeline.hpp"

namespace lightts {

/// Loaded, split, standardized data for one config. `model` carries N.
struct PreparedData {
    Dataset raw;
    Dataset scaled;
    Scaler scaler;
    Splits splits;
    WindowBatch train, val, test;
    LightTSConfig model;
    std::string content_hash;  // FNV-1a 64 of the file bytes, hex
};

PreparedData prepare_data(const ExperimentConfig& cfg);

enum class SplitName { val, test };
SplitName parse_split_name(std::string_view s);

/// runs/<name>-<seed>
std::filesystem::path run_dir(const ExperimentConfig& cfg, const std::filesystem::path& out_root);

nlohmann::json to_json(const MetricsReport& m);

/// Standardized and raw metrics for a window set, plus the headline set
/// picked by the eval scales.
nlohmann::json evaluate_windows(const PreparedData& data, const WindowBatch& windows,
                                const std::vector<Matrix>& pred, const EvalConfig& eval);

/// Trains with cfg.train.seed and writes checkpoint, history.csv and
/// report.json into run_dir(cfg, out_root). Returns the report.
nlohmann::json cmd_train(const ExperimentConfig& cfg, const std::filesystem::path& out_root);

/// Evaluates the checkpoint in `checkpoint_dir` (default run_dir) on a split
/// and writes eval-<split>.json next to it.
nlohmann::json cmd_evaluate(const ExperimentConfig& cfg, const std::filesystem::path& out_root,
                            SplitName split,
                            const std::optional<std::filesystem::path>& checkpoint_dir = {});

/// Trainable parameters and forward-pass op counts for every ablation
/// variant that is valid for the config. Written to <out>/<name>-flops/.
nlohmann::json cmd_flops(const ExperimentConfig& cfg, const std::filesystem::path& out_root);

struct SweepOutcome {
    nlohmann::json report;
    bool ok = true;
};

/// Independent training per seed, then mean/std of the test metrics.
/// Failed seeds are recorded in the report and make `ok` false.
SweepOutcome cmd_sweep(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds,
                       const std::filesystem::path& out_root);

/// Writes `j` as UTF-8 JSON with sorted keys.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Entry point shared by the `lightts` executable and the tests.
/// `train|evaluate|flops|sweep --config <path> [--seed k] [--seeds k1,k2,...]
///  [--split val|test] [--out dir] [--checkpoint dir]`
int run_cli(int argc, const char* const* argv);

}  // namespace lightts
