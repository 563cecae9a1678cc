#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace pointcert {

/// Resolved configuration of one batch run. The CLI builds this from a
/// key=value config file plus flag overrides (flags win); tests may build it
/// directly. Angle-valued entries are stored in radians.
struct RunConfig {
    std::string command; // train | certify | attack | gen-data | eval

    std::string dataset;         // manifest path
    std::string classifier_kind; // tiny | centroid | oracle
    std::string weights;         // classifier file (output path for train)

    std::string family;         // transformation family, or l2 / linf / zyx_rotation
    std::vector<double> radius; // region parameters (one per family parameter, or a ball radius)
    std::string region_kind;    // optional override: interval | box | l2_ball | frobenius_ball
    std::vector<double> sigma;  // smoothing scales
    int grid_m = 10;
    std::int64_t samples = -1; // -1 = protocol default (1000 additive, 10000 sampled)
    double alpha = 1e-3;
    std::uint64_t seed = 0;

    std::string out;           // report path (gen-data: output directory)
    std::string format = "json"; // json | csv
    int threads = 1;
    std::string timestamp; // provenance string copied into the report header

    // train
    int epochs = 30;
    double learning_rate = 0.05;
    int batch_size = 16;
    int hidden1 = 32;
    int hidden2 = 64;
    int hidden3 = 32;

    // gen-data
    std::string classes = "sphere,cube";
    int per_class = 10;
    int n_points = 64;
    double noise_sd = 0.02;

    // attack
    std::string attack_mode = "grid"; // grid | random
    int attack_resolution = 50;       // lattice points per axis
    std::int64_t attack_probes = 1000; // random-mode probe count

    std::string rotation_bound = "standard"; // standard | tight
    std::int64_t max_grid = 1000000;
};

/// Parses a key=value config file ('#' starts a comment). Unknown keys are
/// rejected. Values accepted by numeric keys may carry a "deg" suffix.
RunConfig parse_config_file(const std::filesystem::path& path);

/// Applies one key=value assignment (the config-file grammar) to a config.
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

/// Runs a command. Returns 0 on success, 2 on configuration errors, 3 on
/// runtime failures. Reports are byte-identical across reruns with the same
/// config and seed.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

} // namespace pointcert
