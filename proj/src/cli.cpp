#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lightts/errors.hpp"
#include "lightts/experiment.hpp"

namespace lightts {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            seeds.push_back(std::stoull(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad seed '" + item + "' in --seeds");
        }
    }
    return seeds;
}

std::string fmt(const json& v) {
    if (!v.is_number()) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
    return buf;
}

void print_train(const json& r) {
    const json& h = r["history"];
    std::cout << "run " << r["artifacts"]["dir"].get<std::string>() << "\n"
              << "  epochs " << h["epochs"] << " (best " << h["best_epoch"] << ", "
              << h["stop_reason"].get<std::string>() << "), best val mse "
              << fmt(h["best_val_mse"]) << "\n";
    for (const char* split : {"val", "test"}) {
        const json& m = r["metrics"][split]["headline"];
        const json& n = r["naive"][split]["headline"];
        std::cout << "  " << split << ": mse " << fmt(m["mse"]) << " mae " << fmt(m["mae"])
                  << " rse " << fmt(m["rse"]) << " corr " << fmt(m["corr"]) << " | naive mse "
                  << fmt(n["mse"]) << " mae " << fmt(n["mae"]) << "\n";
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"LightTS forecaster: train, evaluate, count ops, sweep seeds"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "runs";
    std::optional<std::uint64_t> seed;
    std::string seeds_text = "0,1,2,3,4";
    std::string split_text = "test";
    std::string checkpoint;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--out", out_dir, "output root directory");
    };
    CLI::App* train = app.add_subcommand("train", "train one model and write its run directory");
    add_common(train);
    train->add_option("--seed", seed, "override [train] seed");

    CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate a trained checkpoint");
    add_common(evaluate);
    evaluate->add_option("--seed", seed, "seed of the run to evaluate");
    evaluate->add_option("--split", split_text, "val or test");
    evaluate->add_option("--checkpoint", checkpoint, "run directory holding the checkpoint");

    CLI::App* flops = app.add_subcommand("flops", "parameter and MAC counts per ablation");
    add_common(flops);

    CLI::App* sweep = app.add_subcommand("sweep", "train once per seed and aggregate");
    add_common(sweep);
    sweep->add_option("--seeds", seeds_text, "comma-separated seeds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_code(ErrorClass::config);
    }

    try {
        ExperimentConfig cfg = load_config(config_path);
        if (seed) cfg.train.seed = *seed;
        const fs::path out_root = out_dir;

        if (train->parsed()) {
            print_train(cmd_train(cfg, out_root));
        } else if (evaluate->parsed()) {
            const SplitName split = parse_split_name(split_text);
            std::optional<fs::path> ckpt;
            if (!checkpoint.empty()) ckpt = checkpoint;
            const json r = cmd_evaluate(cfg, out_root, split, ckpt);
            const json& m = r["metrics"][split_text]["headline"];
            const json& n = r["naive"][split_text]["headline"];
            std::cout << split_text << ": mse " << fmt(m["mse"]) << " mae " << fmt(m["mae"])
                      << " rse " << fmt(m["rse"]) << " corr " << fmt(m["corr"])
                      << " | naive mse " << fmt(n["mse"]) << " mae " << fmt(n["mae"]) << "\n";
        } else if (flops->parsed()) {
            const json r = cmd_flops(cfg, out_root);
            std::printf("%-8s %14s %16s %14s %14s\n", "variant", "params", "macs", "adds",
                        "activations");
            for (const char* v : {"full", "no_cp", "no_is", "no_cs"}) {
                const json& e = r["variants"][v];
                std::printf("%-8s %14llu %16llu %14llu %14llu\n", v,
                            e["trainable_params"].get<unsigned long long>(),
                            e["macs"].get<unsigned long long>(),
                            e["adds"].get<unsigned long long>(),
                            e["activations"].get<unsigned long long>());
            }
        } else if (sweep->parsed()) {
            const SweepOutcome s = cmd_sweep(cfg, parse_seed_list(seeds_text), out_root);
            if (s.report.contains("summary")) {
                const json& sum = s.report["summary"];
                for (const char* k : {"mse", "mae", "rse", "corr"})
                    std::cout << "test " << k << " " << sum[k]["mean_std"].get<std::string>()
                              << "\n";
            }
            for (const json& f : s.report["failures"]) {
                std::cerr << "error[" << f["class"].get<std::string>() << "]: seed " << f["seed"]
                          << ": " << f["message"].get<std::string>() << "\n";
            }
            if (!s.ok) {
                const auto& failures = s.report["failures"];
                if (!failures.empty()) {
                    const std::string cls = failures[0]["class"].get<std::string>();
                    for (ErrorClass c : {ErrorClass::config, ErrorClass::data,
                                         ErrorClass::numeric, ErrorClass::io})
                        if (to_string(c) == cls) return exit_code(c);
                }
                return exit_code(ErrorClass::numeric);
            }
        }
    } catch (const Error& e) {
        std::string msg = e.what();
        for (char& c : msg)
            if (c == '\n') c = ' ';
        std::cerr << "error[" << to_string(e.error_class()) << "]: " << msg << "\n";
        return exit_code(e.error_class());
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error[io]: report serialization failed: " << e.what() << "\n";
        return exit_code(ErrorClass::io);
    }
    return 0;
}

}  // namespace lightts
