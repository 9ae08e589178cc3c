#include "lightts/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lightts/checkpoint.hpp"
#include "lightts/errors.hpp"
#include "lightts/train.hpp"

namespace lightts {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json model_json(const LightTSConfig& m) {
    return {{"N", m.N},         {"T", m.T},         {"L", m.L},
            {"C", m.C},         {"F", m.F},         {"fp_ab", m.Fp_ab},
            {"fp_c", m.Fp_c},   {"slope", m.slope}, {"mode", to_string(m.mode)},
            {"ablation", m.ablation.str()}};
}

json config_json(const ExperimentConfig& cfg) {
    const TrainConfig& t = cfg.train;
    return {{"name", cfg.name},
            {"data",
             {{"path", cfg.data.path},
              {"split", cfg.data.split.name()},
              {"granularity", cfg.data.granularity}}},
            {"model", model_json(cfg.model)},
            {"train",
             {{"lr", t.lr},
              {"beta1", t.beta1},
              {"beta2", t.beta2},
              {"eps_adam", t.eps_adam},
              {"batch_size", t.batch_size},
              {"max_epochs", t.max_epochs},
              {"patience", t.patience},
              {"seed", t.seed},
              {"shuffle", t.shuffle},
              {"clip_norm", t.clip_norm},
              {"max_steps", t.max_steps}}},
            {"eval",
             {{"long_scale", to_string(cfg.eval.long_scale)},
              {"short_scale", to_string(cfg.eval.short_scale)}}}};
}

json range_json(IndexRange r) { return json::array({r.begin, r.end}); }

json dataset_json(const ExperimentConfig& cfg, const PreparedData& d) {
    return {{"path", cfg.data.path},
            {"rows", d.raw.length()},
            {"series", d.raw.series()},
            {"names", d.raw.names},
            {"fnv1a64", d.content_hash},
            {"granularity", cfg.data.granularity},
            {"splits",
             {{"scheme", cfg.data.split.name()},
              {"train", range_json(d.splits.train)},
              {"val", range_json(d.splits.val)},
              {"test", range_json(d.splits.test)}}},
            {"windows",
             {{"train", d.train.size()}, {"val", d.val.size()}, {"test", d.test.size()}}}};
}

json ops_json(const OpCount& c) {
    return {{"macs", c.macs}, {"adds", c.adds}, {"activations", c.activations}};
}

std::vector<Matrix> to_raw(const std::vector<Matrix>& xs, const Scaler& s) {
    std::vector<Matrix> out;
    out.reserve(xs.size());
    for (const Matrix& x : xs) out.push_back(invert_scaler(x, s));
    return out;
}

json report_header(const std::string& command, const ExperimentConfig& cfg,
                   const PreparedData& data) {
    LightTSConfig model = data.model;
    json r;
    r["command"] = command;
    r["name"] = cfg.name;
    r["seed"] = cfg.train.seed;
    r["config"] = config_json(cfg);
    r["config"]["model"]["N"] = model.N;
    r["config_text"] = to_config_text(cfg);
    r["dataset"] = dataset_json(cfg, data);
    r["trainable_params"] = trainable_param_count(model);
    r["forward_ops"] = ops_json(model_mac_count(model));
    json warnings = json::array();
    for (const auto& w : model.block_ab_shape().bottleneck_warnings()) warnings.push_back("ab: " + w);
    for (const auto& w : model.block_c_shape().bottleneck_warnings()) warnings.push_back("c: " + w);
    r["bottleneck_warnings"] = warnings;
    return r;
}

const WindowBatch& windows_for(const PreparedData& d, SplitName s) {
    return s == SplitName::val ? d.val : d.test;
}

std::vector<Matrix> naive_predictions(const WindowBatch& w, const LightTSConfig& m) {
    std::vector<Matrix> out;
    out.reserve(w.size());
    for (const Matrix& in : w.inputs) out.push_back(naive_repeat_last(in, m.L, m.mode));
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

PreparedData prepare_data(const ExperimentConfig& cfg) {
    PreparedData d;
    const std::string bytes = read_file(cfg.data.path);
    d.raw = parse_csv(bytes, cfg.data.path);
    d.raw.granularity = cfg.data.granularity;
    d.content_hash = hex64(fnv1a64(bytes));

    d.model = cfg.model;
    d.model.N = d.raw.series();
    d.model.validate();

    const std::size_t T = d.model.T, L = d.model.L;
    d.splits = split(d.raw.length(), cfg.data.split, T + L);
    d.scaler = fit_scaler(d.raw, d.splits.train);
    d.scaled = apply_scaler(d.raw, d.scaler);
    d.train = make_windows(d.scaled, d.splits.train, T, L, d.model.mode);
    d.val = make_windows(d.scaled, d.splits.val, T, L, d.model.mode);
    d.test = make_windows(d.scaled, d.splits.test, T, L, d.model.mode);
    return d;
}

SplitName parse_split_name(std::string_view s) {
    if (s == "val") return SplitName::val;
    if (s == "test") return SplitName::test;
    throw ConfigError("unknown split '" + std::string(s) + "' (expected val or test)");
}

fs::path run_dir(const ExperimentConfig& cfg, const fs::path& out_root) {
    return out_root / (cfg.name + "-" + std::to_string(cfg.train.seed));
}

json to_json(const MetricsReport& m) {
    return {{"mse", m.mse},
            {"mae", m.mae},
            {"rse", m.rse},
            {"corr", m.corr},
            {"corr_skipped", m.corr_skipped},
            {"n_windows", m.n_windows},
            {"scale", to_string(m.scale)}};
}

json evaluate_windows(const PreparedData& data, const WindowBatch& windows,
                      const std::vector<Matrix>& pred, const EvalConfig& eval) {
    const MetricsReport std_m =
        compute_metrics(windows.targets, pred, MetricScale::standardized);
    const std::vector<Matrix> raw_truth = to_raw(windows.targets, data.scaler);
    const std::vector<Matrix> raw_pred = to_raw(pred, data.scaler);
    const MetricsReport raw_m = compute_metrics(raw_truth, raw_pred, MetricScale::raw);

    const MetricsReport& long_m = eval.long_scale == MetricScale::standardized ? std_m : raw_m;
    const MetricsReport& short_m = eval.short_scale == MetricScale::standardized ? std_m : raw_m;
    return {{"standardized", to_json(std_m)},
            {"raw", to_json(raw_m)},
            {"headline",
             {{"mse", long_m.mse},
              {"mae", long_m.mae},
              {"rse", short_m.rse},
              {"corr", short_m.corr},
              {"long_scale", to_string(eval.long_scale)},
              {"short_scale", to_string(eval.short_scale)}}}};
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

json cmd_train(const ExperimentConfig& cfg, const fs::path& out_root) {
    const auto start = std::chrono::steady_clock::now();
    const PreparedData data = prepare_data(cfg);
    const LightTSConfig& model = data.model;

    const auto train_start = std::chrono::steady_clock::now();
    TrainResult tr = train_loop(model, init_params(model, cfg.train.seed), data.train, data.val,
                                cfg.train);
    const double train_seconds = seconds_since(train_start);

    const fs::path dir = run_dir(cfg, out_root);
    save_checkpoint(dir, tr.best);
    {
        std::ofstream hist(dir / "history.csv", std::ios::binary);
        if (!hist) throw IoError("cannot write " + (dir / "history.csv").string());
        write_history_csv(hist, tr.history);
    }

    json r = report_header("train", cfg, data);
    r["history"] = {{"file", "history.csv"},
                    {"epochs", tr.history.size()},
                    {"best_epoch", tr.best_epoch},
                    {"best_val_mse", tr.best_val_mse},
                    {"optimizer_steps", tr.steps},
                    {"stop_reason", tr.stop_reason}};
    json epoch_ms = json::array();
    for (const EpochRecord& e : tr.history) epoch_ms.push_back(e.wall_ms);
    r["metrics"]["val"] = evaluate_windows(data, data.val, predict(tr.best, model, data.val),
                                           cfg.eval);
    r["metrics"]["test"] = evaluate_windows(data, data.test, predict(tr.best, model, data.test),
                                            cfg.eval);
    r["naive"]["val"] =
        evaluate_windows(data, data.val, naive_predictions(data.val, model), cfg.eval);
    r["naive"]["test"] =
        evaluate_windows(data, data.test, naive_predictions(data.test, model), cfg.eval);
    r["artifacts"] = {{"dir", dir.string()},
                      {"checkpoint_manifest", kManifestFile},
                      {"checkpoint_blob", kBlobFile},
                      {"history", "history.csv"},
                      {"report", "report.json"}};
    r["wall_clock"] = {{"train_seconds", train_seconds},
                       {"total_seconds", seconds_since(start)},
                       {"epoch_ms", epoch_ms}};
    write_json(dir / "report.json", r);
    return r;
}

json cmd_evaluate(const ExperimentConfig& cfg, const fs::path& out_root, SplitName split,
                  const std::optional<fs::path>& checkpoint_dir) {
    const auto start = std::chrono::steady_clock::now();
    const PreparedData data = prepare_data(cfg);
    const LightTSConfig& model = data.model;
    const fs::path dir = checkpoint_dir.value_or(run_dir(cfg, out_root));

    ModelParams params = zero_params(model);
    load_checkpoint(dir, params);

    const WindowBatch& w = windows_for(data, split);
    const std::string split_name = split == SplitName::val ? "val" : "test";
    json r = report_header("evaluate", cfg, data);
    r["split"] = split_name;
    r["checkpoint"] = dir.string();
    r["metrics"][split_name] = evaluate_windows(data, w, predict(params, model, w), cfg.eval);
    r["naive"][split_name] = evaluate_windows(data, w, naive_predictions(w, model), cfg.eval);
    r["wall_clock"] = {{"total_seconds", seconds_since(start)}};
    write_json(dir / ("eval-" + split_name + ".json"), r);
    return r;
}

json cmd_flops(const ExperimentConfig& cfg, const fs::path& out_root) {
    const std::string bytes = read_file(cfg.data.path);
    const Dataset ds = parse_csv(bytes, cfg.data.path);
    LightTSConfig base = cfg.model;
    base.N = ds.series();
    base.ablation = {};
    base.validate();

    json r;
    r["command"] = "flops";
    r["name"] = cfg.name;
    r["config"] = config_json(cfg);
    r["config"]["model"]["N"] = base.N;
    r["config_text"] = to_config_text(cfg);
    r["dataset"] = {{"path", cfg.data.path},
                    {"rows", ds.length()},
                    {"series", ds.series()},
                    {"fnv1a64", hex64(fnv1a64(bytes))}};
    json variants = json::object();
    for (Variant v : {Variant::full, Variant::no_cp, Variant::no_is, Variant::no_cs}) {
        const LightTSConfig c = build_ablation(base, v);
        json entry = ops_json(model_mac_count(c));
        entry["trainable_params"] = trainable_param_count(c);
        variants[std::string(to_string(v))] = entry;
    }
    r["variants"] = variants;
    const fs::path dir = out_root / (cfg.name + "-flops");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    write_json(dir / "report.json", r);
    return r;
}

SweepOutcome cmd_sweep(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds,
                       const fs::path& out_root) {
    if (seeds.size() < 2) throw ConfigError("sweep needs at least two seeds");
    const auto start = std::chrono::steady_clock::now();
    SweepOutcome out;
    json runs = json::array();
    json failures = json::array();
    std::vector<double> mse_v, mae_v, rse_v, corr_v;
    for (std::uint64_t seed : seeds) {
        ExperimentConfig c = cfg;
        c.train.seed = seed;
        try {
            json sub = cmd_train(c, out_root);
            const json& h = sub["metrics"]["test"]["headline"];
            mse_v.push_back(h["mse"].get<double>());
            mae_v.push_back(h["mae"].get<double>());
            rse_v.push_back(h["rse"].is_number() ? h["rse"].get<double>() : NAN);
            corr_v.push_back(h["corr"].is_number() ? h["corr"].get<double>() : NAN);
            runs.push_back(std::move(sub));
        } catch (const Error& e) {
            out.ok = false;
            failures.push_back({{"seed", seed},
                                {"class", to_string(e.error_class())},
                                {"message", e.what()}});
        }
    }

    json r;
    r["command"] = "sweep";
    r["name"] = cfg.name;
    r["seeds"] = seeds;
    r["config"] = config_json(cfg);
    r["config_text"] = to_config_text(cfg);
    r["runs"] = runs;
    r["failures"] = failures;
    if (mse_v.size() >= 2) {
        auto summary = [](const std::vector<double>& v) {
            const SeedSummary s = aggregate_seeds(v);
            return json{{"values", s.values}, {"mean", s.mean}, {"std", s.std},
                        {"mean_std", s.mean_std()}};
        };
        r["summary"] = {{"split", "test"},
                        {"mse", summary(mse_v)},
                        {"mae", summary(mae_v)},
                        {"rse", summary(rse_v)},
                        {"corr", summary(corr_v)}};
    } else {
        out.ok = false;
    }
    r["wall_clock"] = {{"total_seconds", seconds_since(start)}};
    const fs::path dir = out_root / (cfg.name + "-sweep");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    write_json(dir / "report.json", r);
    out.report = std::move(r);
    return out;
}

}  // namespace lightts
