// Command-line front end: certification, attack, training and data
// generation runs described by a key=value config file with flag overrides.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "pointcert/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Robustness certification for point-cloud classifiers"};
    app.get_formatter()->column_width(26);

    std::string config_path;
    app.add_option("--config", config_path, "key=value config file; flags override its entries");

    // Every flag mirrors a config key. Values are collected as strings and
    // pushed through the same parser as the config file, so "20deg" works in
    // both places.
    std::vector<std::pair<std::string, std::string>> overrides;
    const auto add = [&](const std::string& flag, const std::string& key,
                         const std::string& help) {
        app.add_option_function<std::string>(
            flag, [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); },
            help);
    };
    add("--command", "command", "train | certify | attack | gen-data | eval");
    add("--dataset", "dataset", "dataset manifest path");
    add("--classifier", "classifier", "tiny | centroid | oracle");
    add("--weights", "weights", "classifier file (output path for train)");
    add("--family", "family", "transformation family (also l2, linf, zyx_rotation)");
    add("--radius", "radius", "region parameters, comma separated; angles accept a deg suffix");
    add("--region-kind", "region_kind", "interval | box | l2_ball | frobenius_ball");
    add("--sigma", "sigma", "smoothing scales, comma separated");
    add("--grid-m", "grid_m", "grid resolution M for sampled protocols");
    add("--samples", "samples", "Monte-Carlo samples per estimate");
    add("--alpha", "alpha", "total failure probability (default 0.001)");
    add("--seed", "seed", "base seed; every record derives its own stream");
    add("--out", "out", "report path (gen-data: output directory)");
    add("--format", "format", "json | csv");
    add("--threads", "threads", "parallel inputs");
    add("--timestamp", "timestamp", "provenance string stored in the report header");
    add("--epochs", "epochs", "training epochs");
    add("--lr", "lr", "learning rate");
    add("--batch", "batch", "minibatch size");
    add("--hidden1", "h1", "per-point layer width");
    add("--hidden2", "h2", "pooled feature width");
    add("--hidden3", "h3", "head layer width");
    add("--classes", "classes", "gen-data shape list, e.g. sphere,cube");
    add("--per-class", "per_class", "gen-data clouds per class");
    add("--n-points", "n_points", "gen-data points per cloud");
    add("--noise-sd", "noise_sd", "gen-data jitter standard deviation");
    add("--attack-mode", "attack_mode", "grid | random");
    add("--resolution", "resolution", "attack lattice points per axis");
    add("--probes", "probes", "random-attack probe count");
    add("--rotation-bound", "rotation_bound", "standard | tight");
    add("--max-grid", "max_grid", "grid/lattice size budget");

    CLI11_PARSE(app, argc, argv);

    pointcert::RunConfig config;
    try {
        if (!config_path.empty()) config = pointcert::parse_config_file(config_path);
        for (const auto& [key, value] : overrides)
            pointcert::apply_config_entry(config, key, value);
    } catch (const std::exception& e) {
        std::cerr << "config error";
        if (!config_path.empty()) std::cerr << " (" << config_path << ")";
        std::cerr << ": " << e.what() << "\n";
        return 2;
    }
    return pointcert::run(config, std::cout, std::cerr);
}
