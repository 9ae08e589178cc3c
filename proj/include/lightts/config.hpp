#pragma once

#include <filesystem>
#include <string>

#include "lightts/eval.hpp"
#include "lightts/model.hpp"
#include "lightts/pipeline.hpp"
#include "lightts/train.hpp"

namespace lightts {

struct DataConfig {
    std::string path;  // resolved against the config file's directory
    SplitSpec split = SplitSpec::from_scheme(SplitScheme::r622);
    std::string granularity;
};

struct EvalConfig {
    MetricScale long_scale = MetricScale::standardized;  // scale of headline MSE/MAE
    MetricScale short_scale = MetricScale::raw;          // scale of headline RSE/CORR
};

/// Everything that determines a run. `model.N` is filled from the dataset.
struct ExperimentConfig {
    std::string name = "lightts";
    DataConfig data;
    LightTSConfig model;
    bool chunk_given = false;  // C set explicitly rather than defaulted
    TrainConfig train;
    EvalConfig eval;
};

/// Parses the sectioned key = value format:
///
///   name = "etth1-h24"          # keys before any section are global
///   [data]
///   path = "ETTh1.csv"          # required
///   split = "r622"              # r622 | r712
///   [model]
///   T = 96                      # required
///   L = 24                      # required
///   mode = "multi_step"         # required: multi_step | single_step
///   C = 8                       # default: divisor of T nearest sqrt(T)
///   ablation = "full"           # full | no_cp | no_is | no_cs, comma-joined
///   [train]
///   lr = 0.001
///   [eval]
///   long_scale = "standardized"
///
/// `#` starts a comment outside quotes. Unknown keys are rejected.
/// Relative data paths resolve against `base_dir`.
ExperimentConfig parse_config(const std::string& text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form with every key spelled out. parse_config of the
/// result yields the same configuration.
std::string to_config_text(const ExperimentConfig& cfg);

}  // namespace lightts
